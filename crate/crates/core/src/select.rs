//! Neighborhood selection and graph assembly.
//!
//! For every node the l1 path proposes candidate neighborhoods; each is
//! refitted without penalty and scored with
//! `BIC_gamma(J) = -2 l(beta_J) + |J| (ln n + 2 gamma ln p)`. Cross
//! validation and stability selection are available as baselines. The
//! per-node choices are combined with the AND and OR rules.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glm::{
    fit_mle, lambda_grid, lambda_max, lasso_path_on_grid, loglik, LassoSolver, RegressionData, RegressionFit,
    DEFAULT_LAMBDA_MIN_RATIO, DEFAULT_N_LAMBDAS,
};
use crate::ising::{Graph, SampleMatrix};
use crate::rng::RngSeed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathConfig {
    pub n_lambdas: usize,
    pub lambda_min_ratio: f64,
}

impl Default for PathConfig {
    fn default() -> Self {
        PathConfig {
            n_lambdas: DEFAULT_N_LAMBDAS,
            lambda_min_ratio: DEFAULT_LAMBDA_MIN_RATIO,
        }
    }
}

impl PathConfig {
    fn validate(&self) -> Result<()> {
        if self.n_lambdas < 2 {
            return Err(Error::invalid("path needs n_lambdas >= 2"));
        }
        if !(self.lambda_min_ratio > 0.0 && self.lambda_min_ratio < 1.0) {
            return Err(Error::invalid("lambda_min_ratio must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BicConfig {
    pub gamma: f64,
    /// Largest candidate support; `None` means [`default_q_max`].
    pub q_max: Option<usize>,
    pub path: PathConfig,
}

impl BicConfig {
    pub fn new(gamma: f64) -> Self {
        BicConfig {
            gamma,
            q_max: None,
            path: PathConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvConfig {
    pub folds: usize,
    pub path: PathConfig,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            folds: 10,
            path: PathConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityConfig {
    pub expected_support: usize,
    pub cutoff: f64,
    pub subsamples: usize,
    pub path: PathConfig,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        StabilityConfig {
            expected_support: 10,
            cutoff: 0.75,
            subsamples: 100,
            path: PathConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    Bic,
    Cv,
    Stability,
}

/// A selection method with its settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum SelectionMethod {
    Bic(BicConfig),
    Cv(CvConfig),
    Stability { config: StabilityConfig, seed: RngSeed },
}

impl SelectionMethod {
    pub fn kind(&self) -> MethodKind {
        match self {
            SelectionMethod::Bic(_) => MethodKind::Bic,
            SelectionMethod::Cv(_) => MethodKind::Cv,
            SelectionMethod::Stability { .. } => MethodKind::Stability,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    /// Neighbor labels (nodes, not covariate positions).
    pub support: Vec<usize>,
    pub loglik: f64,
    /// `BIC_gamma` for the BIC method, `-2 loglik` otherwise.
    pub score: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSelection {
    pub node: usize,
    pub method: MethodKind,
    pub candidates: Vec<Candidate>,
    pub chosen: Vec<usize>,
    /// Mean held-out negative log-likelihood per lambda (CV only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cv_error: Option<Vec<f64>>,
    /// Selection frequency per other node, indexed by node label with the
    /// entry for `node` itself fixed at 0 (stability only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub selection_frequency: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub config: SelectionMethod,
    pub n: usize,
    pub p: usize,
    pub nodes: Vec<NodeSelection>,
    pub graph_and: Graph,
    pub graph_or: Graph,
    /// Wall-clock time; not serialized so reports stay reproducible.
    #[serde(skip)]
    pub elapsed: Duration,
}

/// `-2 loglik + |J| (ln n + 2 gamma ln p)`.
pub fn bic_gamma(loglik: f64, support_size: usize, n: usize, p_covariates: usize, gamma: f64) -> f64 {
    let per_param = (n as f64).ln() + 2.0 * gamma * (p_covariates as f64).ln();
    -2.0 * loglik + support_size as f64 * per_param
}

/// `ceil(n / ln n)` capped at `p - 1`.
pub fn default_q_max(n: usize, p: usize) -> usize {
    let bound = if n >= 2 {
        (n as f64 / (n as f64).ln()).ceil() as usize
    } else {
        1
    };
    bound.min(p.saturating_sub(1))
}

fn covariate_to_node(v: usize, j: usize) -> usize {
    if j < v {
        j
    } else {
        j + 1
    }
}

fn to_nodes(v: usize, support: &[usize]) -> Vec<usize> {
    support.iter().map(|&j| covariate_to_node(v, j)).collect()
}

fn node_data(samples: &SampleMatrix, v: usize) -> Result<RegressionData> {
    if v >= samples.p() {
        return Err(Error::invalid(format!("node {v} out of range for p = {}", samples.p())));
    }
    if samples.n() < 2 {
        return Err(Error::invalid("neighborhood selection needs n >= 2"));
    }
    RegressionData::from_samples(samples, v)
}

/// Refitted candidates of one node, reusable across `gamma` values.
#[derive(Debug, Clone)]
pub struct NodeCandidates {
    node: usize,
    n: usize,
    p: usize,
    fits: Vec<(Vec<usize>, RegressionFit)>,
}

impl NodeCandidates {
    /// Runs the path, keeps distinct supports of size `<= q_max` plus the
    /// empty one, and refits each.
    pub fn build(samples: &SampleMatrix, v: usize, path: &PathConfig, q_max: Option<usize>) -> Result<Self> {
        path.validate()?;
        let data = node_data(samples, v)?;
        let q_max = q_max.unwrap_or_else(|| default_q_max(samples.n(), samples.p()));
        let grid = lambda_grid(lambda_max(&data), path.n_lambdas, path.lambda_min_ratio);
        let lasso = lasso_path_on_grid(&data, &grid);
        let mut supports: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
        supports.insert((0, Vec::new()));
        for s in lasso.supports {
            if s.len() <= q_max {
                supports.insert((s.len(), s));
            }
        }
        let fits = supports
            .into_iter()
            .map(|(_, s)| {
                let fit = fit_mle(&data, &s)?;
                Ok((to_nodes(v, &s), fit))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NodeCandidates {
            node: v,
            n: samples.n(),
            p: samples.p(),
            fits,
        })
    }

    pub fn node(&self) -> usize {
        self.node
    }

    /// Candidate neighborhoods in (size, lexicographic) order.
    pub fn supports(&self) -> impl Iterator<Item = &[usize]> {
        self.fits.iter().map(|(s, _)| s.as_slice())
    }

    pub fn fits(&self) -> &[(Vec<usize>, RegressionFit)] {
        &self.fits
    }

    /// Scores all candidates at `gamma`; ties go to the smaller support,
    /// then to the lexicographically smaller one.
    pub fn select(&self, gamma: f64) -> NodeSelection {
        let candidates: Vec<Candidate> = self
            .fits
            .iter()
            .map(|(s, fit)| Candidate {
                support: s.clone(),
                loglik: fit.loglik,
                score: bic_gamma(fit.loglik, s.len(), self.n, self.p - 1, gamma),
                converged: fit.converged,
            })
            .collect();
        let best = candidates
            .iter()
            .min_by(|a, b| {
                a.score
                    .total_cmp(&b.score)
                    .then(a.support.len().cmp(&b.support.len()))
                    .then_with(|| a.support.cmp(&b.support))
            })
            .expect("empty support is always a candidate");
        NodeSelection {
            node: self.node,
            method: MethodKind::Bic,
            chosen: best.support.clone(),
            candidates,
            cv_error: None,
            selection_frequency: None,
        }
    }
}

pub fn neighborhood_select_bic(samples: &SampleMatrix, v: usize, cfg: &BicConfig) -> Result<NodeSelection> {
    if !(cfg.gamma >= 0.0) {
        return Err(Error::invalid(format!("gamma must be >= 0, got {}", cfg.gamma)));
    }
    Ok(NodeCandidates::build(samples, v, &cfg.path, cfg.q_max)?.select(cfg.gamma))
}

fn refit_candidate(data: &RegressionData, v: usize, support: &[usize]) -> Result<Candidate> {
    let fit = fit_mle(data, support)?;
    Ok(Candidate {
        support: to_nodes(v, &fit.support),
        loglik: fit.loglik,
        score: -2.0 * fit.loglik,
        converged: fit.converged,
    })
}

/// Cross-validated lambda on a grid fixed from the full data. Fold `k`
/// holds out rows `i` with `i % folds == k`; the error is mean held-out
/// negative log-likelihood. The earliest (largest) lambda wins ties.
pub fn neighborhood_select_cv(samples: &SampleMatrix, v: usize, cfg: &CvConfig) -> Result<NodeSelection> {
    cfg.path.validate()?;
    if cfg.folds < 2 {
        return Err(Error::invalid("cross-validation needs folds >= 2"));
    }
    if samples.n() < cfg.folds {
        return Err(Error::invalid(format!(
            "n = {} is smaller than folds = {}",
            samples.n(),
            cfg.folds
        )));
    }
    let data = node_data(samples, v)?;
    let grid = lambda_grid(lambda_max(&data), cfg.path.n_lambdas, cfg.path.lambda_min_ratio);
    let full = lasso_path_on_grid(&data, &grid);
    let all: Vec<usize> = (0..data.p()).collect();
    let mut error = vec![0.0; grid.len()];
    for k in 0..cfg.folds {
        let (test, train): (Vec<usize>, Vec<usize>) = (0..data.n()).partition(|i| i % cfg.folds == k);
        let train_data = data.select_rows(&train);
        let test_data = data.select_rows(&test);
        let path = lasso_path_on_grid(&train_data, &grid);
        for (e, beta) in error.iter_mut().zip(&path.solutions) {
            *e += -loglik(&test_data, &all, beta) / test.len() as f64;
        }
    }
    for e in &mut error {
        *e /= cfg.folds as f64;
    }
    let best = error
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .expect("grid is non-empty");
    let chosen = refit_candidate(&data, v, &full.supports[best])?;
    Ok(NodeSelection {
        node: v,
        method: MethodKind::Cv,
        chosen: chosen.support.clone(),
        candidates: vec![chosen],
        cv_error: Some(error),
        selection_frequency: None,
    })
}

/// Stability selection over `subsamples` half-samples drawn without
/// replacement. On each the path is followed until the first lambda whose
/// support reaches `expected_support` (inclusive) and the union of the
/// supports seen is recorded.
pub fn neighborhood_select_stability(
    samples: &SampleMatrix,
    v: usize,
    cfg: &StabilityConfig,
    seed: RngSeed,
) -> Result<NodeSelection> {
    cfg.path.validate()?;
    if samples.n() < 4 {
        return Err(Error::invalid("stability selection needs n >= 4"));
    }
    if cfg.subsamples == 0 {
        return Err(Error::invalid("stability selection needs at least one subsample"));
    }
    let data = node_data(samples, v)?;
    let (n, k) = (data.n(), data.p());
    let half = n / 2;
    let mut counts = vec![0usize; k];
    for b in 0..cfg.subsamples {
        let mut rng = seed.substream(b as u64).rng();
        let mut rows = index::sample(&mut rng, n, half).into_vec();
        rows.sort_unstable();
        let sub = data.select_rows(&rows);
        let grid = lambda_grid(lambda_max(&sub), cfg.path.n_lambdas, cfg.path.lambda_min_ratio);
        let mut solver = LassoSolver::new(&sub);
        let mut seen = vec![false; k];
        for &lambda in &grid {
            solver.solve(lambda);
            let support = solver.support();
            for &j in &support {
                seen[j] = true;
            }
            if support.len() >= cfg.expected_support {
                break;
            }
        }
        for (c, s) in counts.iter_mut().zip(seen) {
            *c += usize::from(s);
        }
    }
    let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / cfg.subsamples as f64).collect();
    let picked: Vec<usize> = (0..k).filter(|&j| freq[j] >= cfg.cutoff).collect();
    let chosen = refit_candidate(&data, v, &picked)?;
    let mut by_node = vec![0.0; k + 1];
    for (j, f) in freq.iter().enumerate() {
        by_node[covariate_to_node(v, j)] = *f;
    }
    Ok(NodeSelection {
        node: v,
        method: MethodKind::Stability,
        chosen: chosen.support.clone(),
        candidates: vec![chosen],
        cv_error: None,
        selection_frequency: Some(by_node),
    })
}

/// AND and OR graphs from per-node neighborhoods.
pub fn symmetrize(p: usize, chosen: &[Vec<usize>]) -> Result<(Graph, Graph)> {
    let mut and = Graph::empty(p);
    let mut or = Graph::empty(p);
    for (v, nbrs) in chosen.iter().enumerate() {
        for &w in nbrs {
            or.insert(v, w)?;
            if chosen[w].contains(&v) {
                and.insert(v, w)?;
            }
        }
    }
    Ok((and, or))
}

fn assemble(
    config: SelectionMethod,
    samples: &SampleMatrix,
    nodes: Vec<NodeSelection>,
    start: Instant,
) -> Result<SelectionReport> {
    let chosen: Vec<Vec<usize>> = nodes.iter().map(|s| s.chosen.clone()).collect();
    let (graph_and, graph_or) = symmetrize(samples.p(), &chosen)?;
    Ok(SelectionReport {
        config,
        n: samples.n(),
        p: samples.p(),
        nodes,
        graph_and,
        graph_or,
        elapsed: start.elapsed(),
    })
}

fn per_node<T, F>(p: usize, parallel: bool, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    if parallel {
        (0..p).into_par_iter().map(f).collect()
    } else {
        (0..p).map(f).collect()
    }
}

/// Per-node selection for every node, then AND/OR assembly. Stability
/// selection uses `seed.substream(v)` for node `v`, so results do not
/// depend on `parallel`.
pub fn select_graph(samples: &SampleMatrix, method: &SelectionMethod, parallel: bool) -> Result<SelectionReport> {
    let start = Instant::now();
    let p = samples.p();
    let nodes = match method {
        SelectionMethod::Bic(cfg) => per_node(p, parallel, |v| neighborhood_select_bic(samples, v, cfg))?,
        SelectionMethod::Cv(cfg) => per_node(p, parallel, |v| neighborhood_select_cv(samples, v, cfg))?,
        SelectionMethod::Stability { config, seed } => per_node(p, parallel, |v| {
            neighborhood_select_stability(samples, v, config, seed.substream(v as u64))
        })?,
    };
    assemble(*method, samples, nodes, start)
}

/// BIC selection for several `gamma` values sharing one path and one set
/// of refits per node. `cfg.gamma` is ignored.
pub fn select_graphs_bic(
    samples: &SampleMatrix,
    gammas: &[f64],
    cfg: &BicConfig,
    parallel: bool,
) -> Result<Vec<SelectionReport>> {
    if let Some(g) = gammas.iter().find(|g| !(**g >= 0.0)) {
        return Err(Error::invalid(format!("gamma must be >= 0, got {g}")));
    }
    let start = Instant::now();
    let p = samples.p();
    let candidates = per_node(p, parallel, |v| NodeCandidates::build(samples, v, &cfg.path, cfg.q_max))?;
    gammas
        .iter()
        .map(|&gamma| {
            let nodes = candidates.iter().map(|c| c.select(gamma)).collect();
            assemble(SelectionMethod::Bic(BicConfig { gamma, ..*cfg }), samples, nodes, start)
        })
        .collect()
}
