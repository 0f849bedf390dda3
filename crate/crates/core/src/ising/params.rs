use crate::error::{Error, Result};

use super::Graph;

/// Symmetric interaction matrix with zero diagonal. The support of `theta`
/// is the model's graph.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingParams {
    p: usize,
    theta: Vec<f64>,
    // (neighbor, theta) per node, nonzero entries only
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl IsingParams {
    pub fn zeros(p: usize) -> Self {
        IsingParams {
            p,
            theta: vec![0.0; p * p],
            adjacency: vec![Vec::new(); p],
        }
    }

    /// Builds parameters from `(v, w, theta_vw)` triples; each unordered
    /// pair may appear at most once. Zero weights are accepted and simply
    /// leave the pair out of the support.
    pub fn from_edges(p: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut theta = vec![0.0; p * p];
        let mut seen = Graph::empty(p);
        for (v, w, t) in edges {
            if !t.is_finite() {
                return Err(Error::invalid(format!("non-finite theta on {{{v},{w}}}")));
            }
            if !seen.insert(v, w)? {
                return Err(Error::invalid(format!("duplicate edge {{{v},{w}}}")));
            }
            theta[v * p + w] = t;
            theta[w * p + v] = t;
        }
        Ok(Self::from_dense_unchecked(p, theta))
    }

    /// Builds parameters from a dense row-major `p x p` matrix.
    pub fn from_dense(p: usize, theta: Vec<f64>) -> Result<Self> {
        if theta.len() != p * p {
            return Err(Error::invalid(format!(
                "theta has {} entries, expected {}",
                theta.len(),
                p * p
            )));
        }
        for v in 0..p {
            if theta[v * p + v] != 0.0 {
                return Err(Error::invalid(format!("nonzero diagonal at node {v}")));
            }
            for w in v + 1..p {
                let (a, b) = (theta[v * p + w], theta[w * p + v]);
                if a != b || !a.is_finite() {
                    return Err(Error::invalid(format!("theta not symmetric/finite at ({v},{w})")));
                }
            }
        }
        Ok(Self::from_dense_unchecked(p, theta))
    }

    fn from_dense_unchecked(p: usize, theta: Vec<f64>) -> Self {
        let adjacency = (0..p)
            .map(|v| {
                (0..p)
                    .filter_map(|w| {
                        let t = theta[v * p + w];
                        (t != 0.0).then_some((w, t))
                    })
                    .collect()
            })
            .collect();
        IsingParams { p, theta, adjacency }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn theta(&self, v: usize, w: usize) -> f64 {
        self.theta[v * self.p + w]
    }

    pub fn dense(&self) -> &[f64] {
        &self.theta
    }

    /// Nonzero interactions of `v` as `(neighbor, theta)`.
    pub fn neighborhood(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    /// Edges `(v, w, theta)` with `v < w` in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for v in 0..self.p {
            for &(w, t) in &self.adjacency[v] {
                if v < w {
                    out.push((v, w, t));
                }
            }
        }
        out
    }

    pub fn graph(&self) -> Graph {
        Graph::new(self.p, self.edges().into_iter().map(|(v, w, _)| (v, w)))
            .expect("support of a valid theta is a simple graph")
    }

    /// `sqrt(sum_w theta_vw^2)`.
    pub fn neighborhood_norm(&self, v: usize) -> f64 {
        self.adjacency[v].iter().map(|&(_, t)| t * t).sum::<f64>().sqrt()
    }

    /// Largest neighborhood norm over all nodes (`b0`).
    pub fn max_neighborhood_norm(&self) -> f64 {
        (0..self.p).map(|v| self.neighborhood_norm(v)).fold(0.0, f64::max)
    }

    /// Smallest nonzero `|theta_vw|`; `None` for the empty model.
    pub fn theta_min(&self) -> Option<f64> {
        self.edges().into_iter().map(|(_, _, t)| t.abs()).min_by(f64::total_cmp)
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// `sum_{v<w} theta_vw z_v z_w` for a state given as signs.
    pub fn energy(&self, z: &[i8]) -> f64 {
        self.edges()
            .into_iter()
            .map(|(v, w, t)| t * f64::from(z[v]) * f64::from(z[w]))
            .sum()
    }

    /// Relabels node `v` as `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> IsingParams {
        let edges = self.edges().into_iter().map(|(v, w, t)| (perm[v], perm[w], t));
        IsingParams::from_edges(self.p, edges).expect("permutation of valid params")
    }
}

/// Log-odds of `Z_v = +1` given the other coordinates of `z`:
/// `sum_{w in nei(v)} 2 theta_vw z_w`. The entry `z[v]` is ignored.
pub fn conditional_logit(params: &IsingParams, v: usize, z: &[i8]) -> f64 {
    assert!(v < params.p, "node {v} out of range");
    params.adjacency[v]
        .iter()
        .map(|&(w, t)| 2.0 * t * f64::from(z[w]))
        .sum()
}
