//! Empirical checks of the distributional assumptions behind the
//! consistency results: sparse eigenvalues of second-moment matrices, sparse
//! third moments, the bounded-degree eigenvalue bound for Ising models, the
//! mixture counterexample to bounded Hessian change, and a likelihood-ratio
//! monitor over supersets of the true neighborhood.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glm::{cumulant_d2, fit_mle, loglik_score_hessian, RegressionData};
use crate::ising::{exact_distribution, IsingParams, SampleMatrix};
use crate::rng::RngSeed;

/// Largest number of subsets the exhaustive eigenvalue search will visit.
pub const MAX_EXHAUSTIVE_SUBSETS: u64 = 1_000_000;
/// Ascent steps per random subset in [`third_moment_bound`].
pub const THIRD_MOMENT_ASCENT_STEPS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum EigMethod {
    Exhaustive,
    MonteCarlo { trials: usize, seed: RngSeed },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SparseEigBounds {
    /// Smallest eigenvalue over the principal submatrices examined.
    pub min: f64,
    /// Largest eigenvalue over the principal submatrices examined.
    pub max: f64,
    pub subsets_examined: u64,
    /// True for exhaustive enumeration; Monte Carlo values only bracket the
    /// true extremes from the inside.
    pub exact: bool,
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Calls `f` on every increasing `k`-subset of `0..n`, in lexicographic
/// order.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // rightmost position that can still advance
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn submatrix_eigen_range(m: &DMatrix<f64>, subset: &[usize]) -> (f64, f64) {
    let sub = m.select_rows(subset).select_columns(subset);
    let eig = SymmetricEigen::new(sub).eigenvalues;
    (eig.min(), eig.max())
}

/// Extreme eigenvalues over principal submatrices of size at most `q`.
///
/// By Cauchy interlacing the extremes over sizes `<= q` are attained at size
/// `min(q, p)`, so only those subsets are visited.
pub fn sparse_eig_bounds(second_moment: &DMatrix<f64>, q: usize, method: EigMethod) -> Result<SparseEigBounds> {
    let p = second_moment.nrows();
    if second_moment.ncols() != p {
        return Err(Error::invalid("second-moment matrix must be square"));
    }
    if q == 0 || q > p {
        return Err(Error::invalid(format!(
            "sparsity q must satisfy 1 <= q <= p = {p}, got {q}"
        )));
    }
    let asym = (0..p)
        .flat_map(|a| (0..p).map(move |b| (a, b)))
        .map(|(a, b)| (second_moment[(a, b)] - second_moment[(b, a)]).abs())
        .fold(0.0, f64::max);
    if asym > 1e-12 * (1.0 + second_moment.amax()) {
        return Err(Error::invalid("second-moment matrix is not symmetric"));
    }
    let k = q;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    match method {
        EigMethod::Exhaustive => {
            let count = binomial(p, k);
            if count > MAX_EXHAUSTIVE_SUBSETS {
                return Err(Error::Capacity(format!(
                    "C({p}, {k}) = {count} subsets exceeds {MAX_EXHAUSTIVE_SUBSETS}; use the monte_carlo method"
                )));
            }
            for_each_subset(p, k, |s| {
                let (a, b) = submatrix_eigen_range(second_moment, s);
                lo = lo.min(a);
                hi = hi.max(b);
            });
            Ok(SparseEigBounds {
                min: lo,
                max: hi,
                subsets_examined: count,
                exact: true,
            })
        }
        EigMethod::MonteCarlo { trials, seed } => {
            if trials == 0 {
                return Err(Error::invalid("monte_carlo needs trials >= 1"));
            }
            let mut rng = seed.rng();
            for _ in 0..trials {
                let mut s = index::sample(&mut rng, p, k).into_vec();
                s.sort_unstable();
                let (a, b) = submatrix_eigen_range(second_moment, &s);
                lo = lo.min(a);
                hi = hi.max(b);
            }
            Ok(SparseEigBounds {
                min: lo,
                max: hi,
                subsets_examined: trials as u64,
                exact: false,
            })
        }
    }
}

/// Empirical `(1/n) sum_i |x_{iS}^T u|^3` for `u` supported on `support`.
pub fn abs_third_moment(samples: &SampleMatrix, support: &[usize], u: &[f64]) -> f64 {
    let total: f64 = samples
        .rows()
        .map(|row| {
            let t: f64 = support.iter().zip(u).map(|(&j, &c)| f64::from(row[j]) * c).sum();
            t.abs().powi(3)
        })
        .sum();
    total / samples.n() as f64
}

/// Lower estimate of `sup { mean |X^T u|^3 : ||u||_2 = 1, |supp u| <= q }`.
///
/// Each trial draws a random `q`-subset and a random sign start and runs
/// [`THIRD_MOMENT_ASCENT_STEPS`] steps of projected gradient ascent on the
/// unit sphere. The objective is convex, so moving to the normalized
/// gradient never decreases it; that full step is used.
pub fn third_moment_bound(samples: &SampleMatrix, q: usize, trials: usize, seed: RngSeed) -> Result<f64> {
    let p = samples.p();
    if trials == 0 {
        return Err(Error::invalid("third_moment_bound needs trials >= 1"));
    }
    if q == 0 || q > p {
        return Err(Error::invalid(format!(
            "sparsity q must satisfy 1 <= q <= p = {p}, got {q}"
        )));
    }
    if samples.n() == 0 {
        return Err(Error::EmptyData("no samples".into()));
    }
    let mut rng = seed.rng();
    let mut best: f64 = 0.0;
    let n = samples.n() as f64;
    for trial in 0..trials {
        let mut support = index::sample(&mut rng, p, q).into_vec();
        support.sort_unstable();
        let scale = 1.0 / (q as f64).sqrt();
        let mut u: Vec<f64> = (0..q)
            .map(|_| {
                if trial == 0 || rng.random_bool(0.5) {
                    scale
                } else {
                    -scale
                }
            })
            .collect();
        best = best.max(abs_third_moment(samples, &support, &u));
        for _ in 0..THIRD_MOMENT_ASCENT_STEPS {
            let mut grad = vec![0.0; q];
            for row in samples.rows() {
                let t: f64 = support.iter().zip(&u).map(|(&j, &c)| f64::from(row[j]) * c).sum();
                let w = 3.0 * t.abs() * t / n;
                for (g, &j) in grad.iter_mut().zip(&support) {
                    *g += w * f64::from(row[j]);
                }
            }
            let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            u = grad.iter().map(|g| g / norm).collect();
            best = best.max(abs_third_moment(samples, &support, &u));
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub q: usize,
    pub min_sparse_eig: f64,
    pub max_sparse_eig: f64,
    pub max_third_moment: f64,
    pub max_abs_entry: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neighborhood_norm_max: Option<f64>,
    pub method: EigMethod,
    pub eig_exact: bool,
    pub third_moment_trials: usize,
}

/// Sample-based report for the sparse-eigenvalue, third-moment and
/// boundedness conditions; `params`, when given, adds the largest
/// neighborhood norm.
pub fn assumption_report(
    samples: &SampleMatrix,
    params: Option<&IsingParams>,
    q: usize,
    method: EigMethod,
    third_moment_trials: usize,
    seed: RngSeed,
) -> Result<AssumptionReport> {
    let p = samples.p();
    if let Some(m) = params {
        if m.p() != p {
            return Err(Error::invalid(format!(
                "model has p = {} but samples have p = {p}",
                m.p()
            )));
        }
    }
    let moment = DMatrix::from_row_slice(p, p, &samples.second_moment());
    let eig = sparse_eig_bounds(&moment, q, method)?;
    let third = third_moment_bound(samples, q, third_moment_trials, seed.substream(1))?;
    let max_abs_entry = samples.values().iter().map(|&x| f64::from(x).abs()).fold(0.0, f64::max);
    Ok(AssumptionReport {
        q,
        min_sparse_eig: eig.min,
        max_sparse_eig: eig.max,
        max_third_moment: third,
        max_abs_entry,
        neighborhood_norm_max: params.map(IsingParams::max_neighborhood_norm),
        method,
        eig_exact: eig.exact,
        third_moment_trials,
    })
}

/// `(4/q) e^{2 b0 sqrt q} / (1 + e^{2 b0 sqrt q})^2`, the lower bound on
/// `E[(Z^T u)^2]` over `q`-sparse unit `u` for an Ising model with degree at
/// most `q` and neighborhood norms at most `b0`.
pub fn lemma4_bound(b0: f64, q: usize) -> f64 {
    let qf = q as f64;
    4.0 / qf * cumulant_d2(2.0 * b0 * qf.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma4Check {
    pub q: usize,
    pub b0: f64,
    pub bound: f64,
    pub min_sparse_eig: f64,
    pub passed: bool,
}

/// Compares the exact `q`-sparse minimum eigenvalue of `E[Z Z^T]` with
/// [`lemma4_bound`].
pub fn lemma4_check(params: &IsingParams, q: usize) -> Result<Lemma4Check> {
    let degree = params.max_degree();
    if degree > q {
        return Err(Error::invalid(format!("maximum degree {degree} exceeds q = {q}")));
    }
    let p = params.p();
    let dist = exact_distribution(params)?;
    let moment = DMatrix::from_row_slice(p, p, &dist.second_moment());
    let eig = sparse_eig_bounds(&moment, q.min(p), EigMethod::Exhaustive)?;
    let b0 = params.max_neighborhood_norm();
    let bound = lemma4_bound(b0, q);
    Ok(Lemma4Check {
        q,
        b0,
        bound,
        min_sparse_eig: eig.min,
        passed: eig.min >= bound,
    })
}

/// Population second moment `(1/q) 1 1^T + (1 - 1/q) I` of the mixture
/// used by [`counterexample_run`].
pub fn counterexample_second_moment(q: usize) -> DMatrix<f64> {
    let qf = q as f64;
    DMatrix::from_fn(q, q, |a, b| if a == b { 1.0 } else { 1.0 / qf })
}

/// Draws one vector from the mixture: `+1_q` and `-1_q` with probability
/// `1/(2q)` each, otherwise uniform signs.
pub fn counterexample_draw<R: Rng>(q: usize, rng: &mut R) -> Vec<f64> {
    let u: f64 = rng.random();
    let qf = q as f64;
    if u < 0.5 / qf {
        vec![1.0; q]
    } else if u < 1.0 / qf {
        vec![-1.0; q]
    } else {
        (0..q).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect()
    }
}

/// `T = u^T (H(0) - H(beta)) u` with `u = 1/sqrt(q)` and `beta = 1/q`, once
/// by the direct sum `sum_i (x_i^T u)^2 (b''(0) - b''(x_i^T beta))` and
/// once through the Hessian of the logistic log-likelihood.
pub fn counterexample_statistic(rows: &[Vec<f64>]) -> (f64, f64) {
    let q = rows.first().map_or(0, Vec::len);
    let qf = q as f64;
    let direct: f64 = rows
        .iter()
        .map(|x| {
            let s: f64 = x.iter().sum();
            let xu = s / qf.sqrt();
            xu * xu * (cumulant_d2(0.0) - cumulant_d2(s / qf))
        })
        .sum();
    let n = rows.len();
    let x = DMatrix::from_fn(n, q, |i, j| rows[i][j]);
    let data = RegressionData::new(x, vec![0.0; n]).expect("finite design");
    let support: Vec<usize> = (0..q).collect();
    let (_, _, h0) = loglik_score_hessian(&data, &support, &vec![0.0; q]);
    let (_, _, hb) = loglik_score_hessian(&data, &support, &vec![1.0 / qf; q]);
    let u = nalgebra::DVector::from_element(q, 1.0 / qf.sqrt());
    let via_hessian = (u.transpose() * (h0 - hb) * &u)[(0, 0)];
    (direct, via_hessian)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleTrial {
    /// `#{i : |x_i^T u| = sqrt q}`.
    pub heavy_count: usize,
    pub t: f64,
    pub t_via_hessian: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub q: usize,
    pub n: usize,
    pub trials: usize,
    /// Fraction of trials with `heavy_count >= n/q`.
    pub heavy_fraction: f64,
    /// Fraction of trials with `T > 0.05 n`.
    pub exceed_fraction: f64,
    /// Whether `T > 0.05 n` held in every trial with `heavy_count >= n/q`.
    pub exceeds_whenever_heavy: bool,
    /// `n (b''(0) - b''(1))`, the lower bound on `T` under the heavy event.
    pub heavy_lower_bound: f64,
    pub max_path_discrepancy: f64,
    pub per_trial: Vec<CounterexampleTrial>,
}

pub fn counterexample_run(q: usize, n: usize, trials: usize, seed: RngSeed) -> Result<CounterexampleReport> {
    if q < 2 {
        return Err(Error::invalid(format!("counterexample needs q >= 2, got {q}")));
    }
    if n == 0 || n % q != 0 {
        return Err(Error::invalid(format!(
            "n = {n} must be a positive multiple of q = {q}"
        )));
    }
    if trials == 0 {
        return Err(Error::invalid("counterexample needs trials >= 1"));
    }
    let qf = q as f64;
    let threshold = 0.05 * n as f64;
    let per_trial: Vec<CounterexampleTrial> = (0..trials)
        .map(|t| {
            let mut rng = seed.substream(t as u64).rng();
            let rows: Vec<Vec<f64>> = (0..n).map(|_| counterexample_draw(q, &mut rng)).collect();
            let heavy_count = rows.iter().filter(|x| x.iter().sum::<f64>().abs() == qf).count();
            let (direct, via) = counterexample_statistic(&rows);
            CounterexampleTrial {
                heavy_count,
                t: direct,
                t_via_hessian: via,
            }
        })
        .collect();
    let heavy: Vec<&CounterexampleTrial> = per_trial.iter().filter(|r| r.heavy_count >= n / q).collect();
    Ok(CounterexampleReport {
        q,
        n,
        trials,
        heavy_fraction: heavy.len() as f64 / trials as f64,
        exceed_fraction: per_trial.iter().filter(|r| r.t > threshold).count() as f64 / trials as f64,
        exceeds_whenever_heavy: heavy.iter().all(|r| r.t > threshold),
        heavy_lower_bound: n as f64 * (cumulant_d2(0.0) - cumulant_d2(1.0)),
        max_path_discrepancy: per_trial
            .iter()
            .map(|r| (r.t - r.t_via_hessian).abs())
            .fold(0.0, f64::max),
        per_trial,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LikelihoodRatioMonitor {
    pub node: usize,
    /// True neighborhood (node labels).
    pub true_support: Vec<usize>,
    pub supersets: usize,
    /// Largest `l(beta_J) - l(beta_J0)` over supersets `J` of `J0`.
    pub max_gap: f64,
    /// Smallest such gap (nonnegative up to solver tolerance).
    pub min_gap: f64,
    /// Largest `gap / ((|J \ J0| + nu) ln p)`, with `p` covariates.
    pub max_ratio: f64,
    pub epsilon: f64,
    pub nu: f64,
    /// `max_ratio > 1 + epsilon`.
    pub exceeded: bool,
}

/// Tracks the likelihood-ratio statistic over every superset of the true
/// neighborhood of `v` with at most `q` elements.
pub fn likelihood_ratio_monitor(
    samples: &SampleMatrix,
    true_params: &IsingParams,
    v: usize,
    epsilon: f64,
    nu: f64,
    q: usize,
) -> Result<LikelihoodRatioMonitor> {
    let p = samples.p();
    if p > 12 {
        return Err(Error::Capacity(format!(
            "likelihood-ratio monitor needs p <= 12, got {p}"
        )));
    }
    if true_params.p() != p {
        return Err(Error::invalid("model and samples disagree on p"));
    }
    if v >= p {
        return Err(Error::invalid(format!("node {v} out of range")));
    }
    let data = RegressionData::from_samples(samples, v)?;
    let to_cov = |w: usize| if w < v { w } else { w - 1 };
    let true_nodes: Vec<usize> = true_params.neighborhood(v).iter().map(|&(w, _)| w).collect();
    let j0: Vec<usize> = true_nodes.iter().map(|&w| to_cov(w)).collect();
    if j0.len() > q {
        return Err(Error::invalid(format!(
            "true neighborhood size {} exceeds q = {q}",
            j0.len()
        )));
    }
    let base = fit_mle(&data, &j0)?.loglik;
    let rest: Vec<usize> = (0..p - 1).filter(|j| !j0.contains(j)).collect();
    let ln_p = ((p - 1) as f64).ln();
    let (mut max_gap, mut min_gap, mut max_ratio) = (f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    let mut supersets = 0;
    for extra in 0..=(q - j0.len()).min(rest.len()) {
        let mut result = Ok(());
        for_each_subset(rest.len(), extra, |pick| {
            if result.is_err() {
                return;
            }
            let mut support = j0.clone();
            support.extend(pick.iter().map(|&i| rest[i]));
            match fit_mle(&data, &support) {
                Ok(fit) => {
                    let gap = if extra == 0 { 0.0 } else { fit.loglik - base };
                    max_gap = max_gap.max(gap);
                    min_gap = min_gap.min(gap);
                    max_ratio = max_ratio.max(gap / ((extra as f64 + nu) * ln_p));
                    supersets += 1;
                }
                Err(e) => result = Err(e),
            }
        });
        result?;
    }
    Ok(LikelihoodRatioMonitor {
        node: v,
        true_support: true_nodes,
        supersets,
        max_gap,
        min_gap,
        max_ratio,
        epsilon,
        nu,
        exceeded: max_ratio > 1.0 + epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glm::cumulant_d2;
    use crate::ising::{exact_sample, generate_lattice, Coupling, LatticeNeighbors};

    #[test]
    fn subsets_enumerated() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, |s| seen.push(s.to_vec()));
        assert_eq!(
            seen,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        let mut count = 0;
        for_each_subset(5, 0, |_| count += 1);
        assert_eq!(count, 1);
        let mut count = 0;
        for_each_subset(7, 7, |_| count += 1);
        assert_eq!(count, 1);
        assert_eq!(binomial(92, 4), 2_794_155);
    }

    #[test]
    fn identity_bounds() {
        let b = sparse_eig_bounds(&DMatrix::identity(6, 6), 3, EigMethod::Exhaustive).unwrap();
        assert!((b.min - 1.0).abs() < 1e-12 && (b.max - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_node_model_eigs() {
        let m = IsingParams::from_edges(2, [(0, 1, 0.5)]).unwrap();
        let d = exact_distribution(&m).unwrap();
        let mm = DMatrix::from_row_slice(2, 2, &d.second_moment());
        let corr = 2.0 * (d.prob(0) + d.prob(3)) - 1.0;
        assert!((corr - 0.4621).abs() < 1e-4);
        let b = sparse_eig_bounds(&mm, 2, EigMethod::Exhaustive).unwrap();
        assert!((b.min - (1.0 - corr)).abs() < 1e-12);
        assert!((b.max - (1.0 + corr)).abs() < 1e-12);
    }

    #[test]
    fn mixture_population_eigs() {
        for q in [2, 5, 16] {
            let b = sparse_eig_bounds(&counterexample_second_moment(q), q, EigMethod::Exhaustive).unwrap();
            let qf = q as f64;
            assert!((b.min - (1.0 - 1.0 / qf)).abs() < 1e-10);
            assert!((b.max - (2.0 - 1.0 / qf)).abs() < 1e-10);
        }
    }

    #[test]
    fn exhaustive_capacity_and_validation() {
        let m = DMatrix::identity(40, 40);
        assert!(matches!(
            sparse_eig_bounds(&m, 10, EigMethod::Exhaustive),
            Err(Error::Capacity(_))
        ));
        let mc = sparse_eig_bounds(
            &m,
            10,
            EigMethod::MonteCarlo {
                trials: 5,
                seed: RngSeed::from(1),
            },
        )
        .unwrap();
        assert!(!mc.exact);
        assert!(sparse_eig_bounds(&m, 41, EigMethod::Exhaustive).is_err());
        assert!(sparse_eig_bounds(&m, 0, EigMethod::Exhaustive).is_err());
    }

    #[test]
    fn third_moment_unit_entries() {
        let s = exact_sample(&IsingParams::zeros(4), 500, RngSeed::from(1)).unwrap();
        let v = third_moment_bound(&s, 1, 5, RngSeed::from(2)).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn third_moment_never_exceeds_cauchy_schwarz() {
        let m = generate_lattice(3, LatticeNeighbors::Four, Coupling::Attractive, 0.5, RngSeed::from(0)).unwrap();
        let s = exact_sample(&m, 2000, RngSeed::from(3)).unwrap();
        for q in 1..=4 {
            let v = third_moment_bound(&s, q, 10, RngSeed::from(q as u64)).unwrap();
            assert!(v <= (q as f64).sqrt().powi(3) + 1e-12);
        }
    }

    #[test]
    fn lemma4_simple_cases() {
        for b0 in [0.0, 0.3, 1.0, 2.5] {
            let v = lemma4_bound(b0, 1);
            let e = (2.0 * b0).exp();
            assert!((v - 4.0 * e / (1.0 + e).powi(2)).abs() < 1e-12);
            assert!(v <= 1.0);
        }
        assert!((lemma4_bound(0.0, 2) - 0.5).abs() < 1e-15);
        let check = lemma4_check(&IsingParams::zeros(4), 2).unwrap();
        assert!((check.min_sparse_eig - 1.0).abs() < 1e-12);
        assert!(check.passed);
    }

    #[test]
    fn lemma4_degree_violation() {
        let m = IsingParams::from_edges(4, [(0, 1, 0.2), (0, 2, 0.2), (0, 3, 0.2)]).unwrap();
        assert!(lemma4_check(&m, 2).is_err());
    }

    #[test]
    fn counterexample_hand_check() {
        // q = 2: the two heavy rows contribute q (b''(0) - b''(1)) each,
        // the mixed rows contribute nothing since x^T u = 0
        let rows = vec![vec![1.0, 1.0], vec![1.0, -1.0], vec![-1.0, -1.0], vec![-1.0, 1.0]];
        let (direct, via) = counterexample_statistic(&rows);
        let expected = 2.0 * 2.0 * (cumulant_d2(0.0) - cumulant_d2(1.0));
        assert!((direct - expected).abs() < 1e-10);
        assert!((via - expected).abs() < 1e-10);
    }

    #[test]
    fn counterexample_validation() {
        assert!(counterexample_run(1, 10, 1, RngSeed::from(0)).is_err());
        assert!(counterexample_run(4, 10, 1, RngSeed::from(0)).is_err());
        let r = counterexample_run(4, 40, 3, RngSeed::from(0)).unwrap();
        assert_eq!(r.per_trial.len(), 3);
        assert!((0.25 - cumulant_d2(1.0) - 0.0534).abs() < 1e-4);
    }

    #[test]
    fn monitor_true_support_is_zero() {
        let m = IsingParams::from_edges(5, [(0, 1, 0.5)]).unwrap();
        let s = exact_sample(&m, 500, RngSeed::from(7)).unwrap();
        let r = likelihood_ratio_monitor(&s, &m, 0, 0.5, 1.0, 1).unwrap();
        assert_eq!(r.supersets, 1);
        assert_eq!(r.max_ratio, 0.0);
        let r = likelihood_ratio_monitor(&s, &m, 0, 0.5, 1.0, 3).unwrap();
        assert!(r.min_gap >= -1e-8);
        assert_eq!(r.supersets, 1 + 3 + 3);
    }
}
