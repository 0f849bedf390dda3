//! Simulation studies: generate a benchmark model, sample, select, score.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{psr_fdr, GraphMetrics};
use crate::ising::{
    exact_sample, generate_lattice, generate_star, gibbs_sample, Coupling, Graph, IsingParams, LatticeNeighbors,
    SampleMatrix, StarSparsity, DEFAULT_BURN_IN, DEFAULT_THIN, MAX_EXACT_NODES,
};
use crate::rng::RngSeed;
use crate::select::{
    select_graph, select_graphs_bic, BicConfig, CvConfig, MethodKind, PathConfig, SelectionMethod, SelectionReport,
    StabilityConfig,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Lattice4,
    Lattice8,
    StarLog,
    StarLinear,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    And,
    Or,
    Both,
}

impl Rule {
    pub fn includes_and(self) -> bool {
        matches!(self, Rule::And | Rule::Both)
    }

    pub fn includes_or(self) -> bool {
        matches!(self, Rule::Or | Rule::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetrizationRule {
    And,
    Or,
}

impl Scenario {
    /// Coupling magnitude used for the scenario's benchmark.
    pub fn default_magnitude(self) -> f64 {
        match self {
            Scenario::Lattice4 => 0.5,
            Scenario::Lattice8 | Scenario::StarLog | Scenario::StarLinear => 0.25,
            Scenario::Custom => f64::NAN,
        }
    }
}

/// `ceil(c d ln p)` with `(c, d)` = (15, 4), (25, 8) and (10, q) for the
/// 4-neighbor lattice, 8-neighbor lattice and star with `q` spokes.
pub fn scenario_sample_size(scenario: Scenario, p: usize) -> Result<usize> {
    let ln_p = (p as f64).ln();
    let (c, d) = match scenario {
        Scenario::Lattice4 => (15.0, 4.0),
        Scenario::Lattice8 => (25.0, 8.0),
        Scenario::StarLog => (10.0, StarSparsity::Logarithmic.spokes(p) as f64),
        Scenario::StarLinear => (10.0, StarSparsity::Linear.spokes(p) as f64),
        Scenario::Custom => {
            return Err(Error::invalid("custom scenarios need an explicit sample size (--n)"));
        }
    };
    Ok((c * d * ln_p).ceil() as usize)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub p: usize,
    pub coupling: Coupling,
    /// Overrides the scenario's coupling magnitude.
    pub magnitude: Option<f64>,
    pub gammas: Vec<f64>,
    pub replicates: usize,
    pub seed: u64,
    pub rule: Rule,
    pub methods: Vec<MethodKind>,
    /// Overrides the scenario's sample-size formula.
    pub n: Option<usize>,
    pub q_max: Option<usize>,
    pub path: PathConfig,
    pub cv: CvConfig,
    pub stability: StabilityConfig,
    pub gibbs_burn_in: usize,
    pub gibbs_thin: usize,
    /// Model for the custom scenario.
    #[serde(skip)]
    pub custom_model: Option<IsingParams>,
    #[serde(skip)]
    pub parallel: bool,
}

pub const DEFAULT_GAMMAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

impl ExperimentConfig {
    pub fn new(scenario: Scenario, p: usize) -> Self {
        ExperimentConfig {
            scenario,
            p,
            coupling: Coupling::Attractive,
            magnitude: None,
            gammas: DEFAULT_GAMMAS.to_vec(),
            replicates: 100,
            seed: 1,
            rule: Rule::Both,
            methods: vec![MethodKind::Bic],
            n: None,
            q_max: None,
            path: PathConfig::default(),
            cv: CvConfig::default(),
            stability: StabilityConfig::default(),
            gibbs_burn_in: DEFAULT_BURN_IN,
            gibbs_thin: DEFAULT_THIN,
            custom_model: None,
            parallel: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::invalid("replicates must be >= 1"));
        }
        if let Some(g) = self.gammas.iter().find(|g| !(**g >= 0.0)) {
            return Err(Error::invalid(format!("gamma must be >= 0, got {g}")));
        }
        if self.methods.is_empty() {
            return Err(Error::invalid("at least one method is required"));
        }
        if self.methods.contains(&MethodKind::Bic) && self.gammas.is_empty() {
            return Err(Error::invalid("BIC needs at least one gamma"));
        }
        match self.scenario {
            Scenario::Lattice4 | Scenario::Lattice8 => {
                let side = lattice_side(self.p)?;
                if side < 2 {
                    return Err(Error::invalid("lattice needs p >= 4"));
                }
            }
            Scenario::StarLog | Scenario::StarLinear => {
                if self.p < 2 {
                    return Err(Error::invalid("star needs p >= 2"));
                }
            }
            Scenario::Custom => {
                let model = self
                    .custom_model
                    .as_ref()
                    .ok_or_else(|| Error::invalid("custom scenario needs a model file"))?;
                if model.p() != self.p {
                    return Err(Error::invalid(format!(
                        "model has p = {} but --p is {}",
                        model.p(),
                        self.p
                    )));
                }
                if self.n.is_none() {
                    return Err(Error::invalid("custom scenarios need an explicit sample size (--n)"));
                }
            }
        }
        if self.n == Some(0) || self.n == Some(1) {
            return Err(Error::invalid("sample size must be >= 2"));
        }
        if self.gibbs_thin == 0 {
            return Err(Error::invalid("gibbs thin must be >= 1"));
        }
        Ok(())
    }

    pub fn sample_size(&self) -> Result<usize> {
        match self.n {
            Some(n) => Ok(n),
            None => scenario_sample_size(self.scenario, self.p),
        }
    }

    /// Model for replicate `seed` (random couplings are redrawn per
    /// replicate).
    pub fn model(&self, seed: RngSeed) -> Result<IsingParams> {
        let magnitude = self.magnitude.unwrap_or(self.scenario.default_magnitude());
        match self.scenario {
            Scenario::Lattice4 => generate_lattice(
                lattice_side(self.p)?,
                LatticeNeighbors::Four,
                self.coupling,
                magnitude,
                seed,
            ),
            Scenario::Lattice8 => generate_lattice(
                lattice_side(self.p)?,
                LatticeNeighbors::Eight,
                self.coupling,
                magnitude,
                seed,
            ),
            Scenario::StarLog => generate_star(self.p, StarSparsity::Logarithmic, magnitude),
            Scenario::StarLinear => generate_star(self.p, StarSparsity::Linear, magnitude),
            Scenario::Custom => self
                .custom_model
                .clone()
                .ok_or_else(|| Error::invalid("custom scenario needs a model file")),
        }
    }
}

fn lattice_side(p: usize) -> Result<usize> {
    let side = (p as f64).sqrt().round() as usize;
    if side * side != p {
        return Err(Error::invalid(format!("lattice scenarios need a square p, got {p}")));
    }
    Ok(side)
}

/// Exact sampling up to [`MAX_EXACT_NODES`], Gibbs beyond.
pub fn draw_samples(
    params: &IsingParams,
    n: usize,
    burn_in: usize,
    thin: usize,
    seed: RngSeed,
) -> Result<SampleMatrix> {
    if params.p() <= MAX_EXACT_NODES {
        exact_sample(params, n, seed)
    } else {
        gibbs_sample(params, n, burn_in, thin, seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub method: MethodKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub graph_and: Graph,
    pub graph_or: Graph,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics_and: Option<GraphMetrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics_or: Option<GraphMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateResult {
    pub replicate: usize,
    pub truth: Graph,
    pub runs: Vec<RunResult>,
    /// Full per-node reports, in the order of `runs`.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub reports: Vec<SelectionReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub method: MethodKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub rule: SymmetrizationRule,
    pub mean_psr: f64,
    pub mean_fdr: f64,
    pub sd_psr: f64,
    pub sd_fdr: f64,
    /// Fraction of replicates whose estimate equals the true graph.
    pub exact_recovery: f64,
    pub replicates: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationReport {
    pub config: ExperimentConfig,
    pub n: usize,
    pub sampler: String,
    pub summary: Vec<SummaryRow>,
    pub replicates: Vec<ReplicateResult>,
}

fn method_runs(
    cfg: &ExperimentConfig,
    samples: &SampleMatrix,
    stability_seed: RngSeed,
) -> Result<Vec<(Option<f64>, SelectionReport)>> {
    let mut out = Vec::new();
    for &method in &cfg.methods {
        match method {
            MethodKind::Bic => {
                let bic = BicConfig {
                    gamma: 0.0,
                    q_max: cfg.q_max,
                    path: cfg.path,
                };
                let reports = select_graphs_bic(samples, &cfg.gammas, &bic, cfg.parallel)?;
                out.extend(cfg.gammas.iter().copied().map(Some).zip(reports));
            }
            MethodKind::Cv => {
                let m = SelectionMethod::Cv(CvConfig {
                    path: cfg.path,
                    ..cfg.cv
                });
                out.push((None, select_graph(samples, &m, cfg.parallel)?));
            }
            MethodKind::Stability => {
                let m = SelectionMethod::Stability {
                    config: StabilityConfig {
                        path: cfg.path,
                        ..cfg.stability
                    },
                    seed: stability_seed,
                };
                out.push((None, select_graph(samples, &m, cfg.parallel)?));
            }
        }
    }
    Ok(out)
}

fn run_replicate(cfg: &ExperimentConfig, n: usize, r: usize, keep_reports: bool) -> Result<ReplicateResult> {
    let rep = RngSeed::new(cfg.seed, r as u64);
    let params = cfg.model(rep.substream(0))?;
    let samples = draw_samples(&params, n, cfg.gibbs_burn_in, cfg.gibbs_thin, rep.substream(1))?;
    let truth = params.graph();
    let mut runs = Vec::new();
    let mut reports = Vec::new();
    for (gamma, report) in method_runs(cfg, &samples, rep.substream(2))? {
        runs.push(RunResult {
            method: report.config.kind(),
            gamma,
            metrics_and: if cfg.rule.includes_and() {
                Some(psr_fdr(&report.graph_and, &truth)?)
            } else {
                None
            },
            metrics_or: if cfg.rule.includes_or() {
                Some(psr_fdr(&report.graph_or, &truth)?)
            } else {
                None
            },
            graph_and: report.graph_and.clone(),
            graph_or: report.graph_or.clone(),
        });
        if keep_reports {
            reports.push(report);
        }
    }
    Ok(ReplicateResult {
        replicate: r,
        truth,
        runs,
        reports,
    })
}

fn mean_sd(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

fn rule_outcome(run: &RunResult, rule: SymmetrizationRule) -> Option<(GraphMetrics, &Graph)> {
    match rule {
        SymmetrizationRule::And => run.metrics_and.map(|m| (m, &run.graph_and)),
        SymmetrizationRule::Or => run.metrics_or.map(|m| (m, &run.graph_or)),
    }
}

/// Mean PSR/FDR per (method, gamma, rule) over replicates.
pub fn summarize(replicates: &[ReplicateResult]) -> Vec<SummaryRow> {
    let Some(first) = replicates.first() else {
        return Vec::new();
    };
    let mut rows = Vec::new();
    for (k, run) in first.runs.iter().enumerate() {
        for rule in [SymmetrizationRule::And, SymmetrizationRule::Or] {
            let pick = |r: &ReplicateResult| rule_outcome(&r.runs[k], rule).map(|(m, g)| (m, g == &r.truth));
            if pick(first).is_none() {
                continue;
            }
            let mut psr = Vec::new();
            let mut fdr = Vec::new();
            let mut exact = 0usize;
            for r in replicates {
                let (m, hit) = pick(r).expect("rule present in every replicate");
                psr.push(m.psr);
                fdr.push(m.fdr);
                exact += usize::from(hit);
            }
            let (mean_psr, sd_psr) = mean_sd(&psr);
            let (mean_fdr, sd_fdr) = mean_sd(&fdr);
            rows.push(SummaryRow {
                method: run.method,
                gamma: run.gamma,
                rule,
                mean_psr,
                mean_fdr,
                sd_psr,
                sd_fdr,
                exact_recovery: exact as f64 / replicates.len() as f64,
                replicates: replicates.len(),
            });
        }
    }
    rows
}

/// Runs every replicate and aggregates PSR/FDR. Replicate `r` draws all its
/// randomness from stream `r` of `cfg.seed`.
pub fn cmd_simulate(cfg: &ExperimentConfig, keep_reports: bool) -> Result<SimulationReport> {
    cfg.validate()?;
    let n = cfg.sample_size()?;
    let reps: Vec<ReplicateResult> = if cfg.parallel {
        (0..cfg.replicates)
            .into_par_iter()
            .map(|r| run_replicate(cfg, n, r, keep_reports))
            .collect::<Result<_>>()?
    } else {
        (0..cfg.replicates)
            .map(|r| run_replicate(cfg, n, r, keep_reports))
            .collect::<Result<_>>()?
    };
    let sampler = if cfg.p <= MAX_EXACT_NODES {
        "exact".to_string()
    } else {
        format!("gibbs(burn_in={}, thin={})", cfg.gibbs_burn_in, cfg.gibbs_thin)
    };
    Ok(SimulationReport {
        config: cfg.clone(),
        n,
        sampler,
        summary: summarize(&reps),
        replicates: reps,
    })
}

pub fn write_summary_csv<W: std::io::Write>(rows: &[SummaryRow], mut out: W) -> Result<()> {
    writeln!(
        out,
        "method,gamma,rule,mean_psr,mean_fdr,sd_psr,sd_fdr,exact_recovery,replicates"
    )?;
    for r in rows {
        let method = serde_json::to_value(r.method)?;
        let rule = serde_json::to_value(r.rule)?;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            method.as_str().unwrap_or_default(),
            r.gamma.map(|g| g.to_string()).unwrap_or_default(),
            rule.as_str().unwrap_or_default(),
            r.mean_psr,
            r.mean_fdr,
            r.sd_psr,
            r.sd_fdr,
            r.exact_recovery,
            r.replicates
        )?;
    }
    Ok(())
}
