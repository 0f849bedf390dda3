use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::RngSeed;

use super::{IsingParams, SampleMatrix};

pub const MAX_EXACT_NODES: usize = 20;

/// Probability table over `{-1,+1}^p`. State index `s` has `z_v = +1`
/// exactly when bit `v` of `s` is set.
#[derive(Debug, Clone)]
pub struct ExactDistribution {
    p: usize,
    probs: Vec<f64>,
}

pub fn exact_distribution(params: &IsingParams) -> Result<ExactDistribution> {
    let p = params.p();
    if p > MAX_EXACT_NODES {
        return Err(Error::Capacity(format!(
            "exact enumeration supports p <= {MAX_EXACT_NODES}, got {p}"
        )));
    }
    let edges = params.edges();
    let states = 1usize << p;
    let mut log_weights: Vec<f64> = (0..states)
        .map(|s| {
            edges
                .iter()
                .map(|&(v, w, t)| {
                    let same = ((s >> v) & 1) == ((s >> w) & 1);
                    if same {
                        t
                    } else {
                        -t
                    }
                })
                .sum()
        })
        .collect();
    let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for lw in &mut log_weights {
        *lw = (*lw - max).exp();
    }
    let total: f64 = log_weights.iter().sum();
    for lw in &mut log_weights {
        *lw /= total;
    }
    Ok(ExactDistribution { p, probs: log_weights })
}

impl ExactDistribution {
    pub fn p(&self) -> usize {
        self.p
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, state: usize) -> f64 {
        self.probs[state]
    }

    pub fn state(&self, index: usize) -> Vec<i8> {
        state_vector(index, self.p)
    }

    pub fn index_of(z: &[i8]) -> usize {
        z.iter()
            .enumerate()
            .filter(|(_, &x)| x > 0)
            .fold(0usize, |acc, (v, _)| acc | (1 << v))
    }

    /// `P(Z_v = +1 | Z_{-v})` at the state `index` (the value of bit `v`
    /// in `index` is ignored).
    pub fn conditional_plus(&self, v: usize, index: usize) -> f64 {
        let plus = self.probs[index | (1 << v)];
        let minus = self.probs[index & !(1 << v)];
        plus / (plus + minus)
    }

    /// `E[Z Z^T]`, row-major.
    pub fn second_moment(&self) -> Vec<f64> {
        let p = self.p;
        let mut out = vec![0.0; p * p];
        for (s, &pr) in self.probs.iter().enumerate() {
            for a in 0..p {
                for b in a + 1..p {
                    let same = ((s >> a) & 1) == ((s >> b) & 1);
                    out[a * p + b] += if same { pr } else { -pr };
                }
            }
        }
        for a in 0..p {
            out[a * p + a] = 1.0;
            for b in a + 1..p {
                out[b * p + a] = out[a * p + b];
            }
        }
        out
    }

    /// Total-variation distance to the empirical distribution of `samples`.
    pub fn total_variation(&self, samples: &SampleMatrix) -> f64 {
        assert_eq!(samples.p(), self.p);
        let mut counts = vec![0usize; self.probs.len()];
        for row in samples.rows() {
            counts[Self::index_of(row)] += 1;
        }
        let n = samples.n() as f64;
        0.5 * counts
            .iter()
            .zip(&self.probs)
            .map(|(&c, &pr)| (c as f64 / n - pr).abs())
            .sum::<f64>()
    }
}

fn state_vector(index: usize, p: usize) -> Vec<i8> {
    (0..p).map(|v| if (index >> v) & 1 == 1 { 1 } else { -1 }).collect()
}

/// i.i.d. draws from the exact distribution by inverse-CDF lookup.
pub fn exact_sample(params: &IsingParams, n: usize, seed: RngSeed) -> Result<SampleMatrix> {
    let dist = exact_distribution(params)?;
    let p = dist.p;
    let mut cdf = Vec::with_capacity(dist.probs.len());
    let mut acc = 0.0;
    for &pr in &dist.probs {
        acc += pr;
        cdf.push(acc);
    }
    let mut rng = seed.rng();
    let mut values = Vec::with_capacity(n * p);
    for _ in 0..n {
        let u: f64 = rng.random::<f64>() * acc;
        let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        values.extend(state_vector(idx, p));
    }
    SampleMatrix::new(n, p, values)
}
