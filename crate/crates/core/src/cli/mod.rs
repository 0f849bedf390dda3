//! Command-line front end. The subcommands are thin wrappers over library
//! functions that can be called directly.

pub mod simulate;
pub mod weather;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::diag::{assumption_report, counterexample_run, lemma4_check, likelihood_ratio_monitor, EigMethod};
use crate::error::{Error, Result};
use crate::ising::io::{read_graph, read_model, read_samples_csv, write_model, write_samples_csv};
use crate::ising::{Coupling, IsingParams, SampleMatrix};
use crate::rng::RngSeed;
use crate::select::{
    select_graph, BicConfig, CvConfig, MethodKind, PathConfig, SelectionMethod, SelectionReport, StabilityConfig,
};

pub use simulate::{
    cmd_simulate, draw_samples, scenario_sample_size, summarize, write_summary_csv, ExperimentConfig, ReplicateResult,
    Rule, RunResult, Scenario, SimulationReport, SummaryRow, SymmetrizationRule, DEFAULT_GAMMAS,
};
pub use weather::{
    cmd_weather, method_label, prepare_weather, read_layout_csv, read_weather_csv, write_curves_csv, write_table_csv,
    EdgeCurve, Precipitation, TableRow, WeatherConfig, WeatherDataset, WeatherRecord, WeatherReport,
};

#[derive(Debug, Parser)]
#[command(
    name = "ising-ebic",
    version,
    about = "Ising graph recovery with extended-BIC neighborhood selection"
)]
pub struct Cli {
    /// Run nodes and replicates sequentially.
    #[arg(long, global = true)]
    pub serial: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulation study on a benchmark graph family.
    Simulate(SimulateArgs),
    /// Draw samples from a model.
    Sample(SampleArgs),
    /// Estimate a graph from a sample CSV.
    Select(SelectArgs),
    /// Precipitation network analysis.
    Weather(WeatherArgs),
    /// Assumption and counterexample diagnostics.
    Diagnose {
        #[command(subcommand)]
        what: DiagnoseCommand,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CouplingArg {
    Attractive,
    Random,
}

impl From<CouplingArg> for Coupling {
    fn from(c: CouplingArg) -> Self {
        match c {
            CouplingArg::Attractive => Coupling::Attractive,
            CouplingArg::Random => Coupling::Random,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Bic,
    Cv,
    Stability,
}

impl From<MethodArg> for MethodKind {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Bic => MethodKind::Bic,
            MethodArg::Cv => MethodKind::Cv,
            MethodArg::Stability => MethodKind::Stability,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EigMethodArg {
    Exhaustive,
    MonteCarlo,
}

#[derive(Debug, Clone, Args)]
pub struct PathArgs {
    /// Number of lambda values on the path.
    #[arg(long, default_value_t = 100)]
    pub n_lambdas: usize,
    /// lambda_min / lambda_max.
    #[arg(long, default_value_t = 0.01)]
    pub lambda_min_ratio: f64,
    /// Largest candidate support for BIC (default ceil(n / ln n)).
    #[arg(long)]
    pub q_max: Option<usize>,
    /// Cross-validation folds.
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// Stability selection: expected number of selected neighbors.
    #[arg(long, default_value_t = 10)]
    pub expected_support: usize,
    /// Stability selection: frequency cutoff.
    #[arg(long, default_value_t = 0.75)]
    pub cutoff: f64,
    /// Stability selection: number of half-samples.
    #[arg(long, default_value_t = 100)]
    pub subsamples: usize,
}

impl PathArgs {
    fn path(&self) -> PathConfig {
        PathConfig {
            n_lambdas: self.n_lambdas,
            lambda_min_ratio: self.lambda_min_ratio,
        }
    }

    fn cv(&self) -> CvConfig {
        CvConfig {
            folds: self.folds,
            path: self.path(),
        }
    }

    fn stability(&self) -> StabilityConfig {
        StabilityConfig {
            expected_support: self.expected_support,
            cutoff: self.cutoff,
            subsamples: self.subsamples,
            path: self.path(),
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = Scenario::Lattice4)]
    pub scenario: Scenario,
    /// Number of nodes (a perfect square for lattices).
    #[arg(long)]
    pub p: usize,
    #[arg(long, value_enum, default_value_t = CouplingArg::Attractive)]
    pub coupling: CouplingArg,
    /// Coupling magnitude (default depends on the scenario).
    #[arg(long)]
    pub magnitude: Option<f64>,
    /// Comma-separated gamma values for BIC.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_GAMMAS.to_vec())]
    pub gamma: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    pub replicates: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Rule::Both)]
    pub rule: Rule,
    /// Comma-separated selection methods.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = vec![MethodArg::Bic])]
    pub method: Vec<MethodArg>,
    /// Sample size (default from the scenario's formula).
    #[arg(long)]
    pub n: Option<usize>,
    /// Model edge list for the custom scenario.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Keep every per-node report in the JSON output.
    #[arg(long)]
    pub full_reports: bool,
    #[command(flatten)]
    pub tuning: PathArgs,
    /// Output directory (report.json, summary.csv); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Model edge list `v w theta`.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// Sample CSV with header z0,z1,... and entries +1/-1.
    #[arg(long)]
    pub samples: PathBuf,
    #[arg(long, value_enum, default_value_t = MethodArg::Bic)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 0.5)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub tuning: PathArgs,
    /// Report JSON path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WeatherArgs {
    /// Daily records: station,lat,lon,date,prcp.
    #[arg(long)]
    pub data: PathBuf,
    /// Station coordinates: station,lat,lon (fixes node order).
    #[arg(long)]
    pub layout: PathBuf,
    /// Reference graph edge list over layout indices.
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 0.25, 0.5])]
    pub gamma: Vec<f64>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = vec![MethodArg::Bic, MethodArg::Cv, MethodArg::Stability])]
    pub method: Vec<MethodArg>,
    /// Minimum fraction of observed days per station.
    #[arg(long, default_value_t = 0.9)]
    pub completeness: f64,
    /// Code trace reports as dry instead of wet.
    #[arg(long)]
    pub trace_as_dry: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Kernel bandwidth in miles.
    #[arg(long, default_value_t = 10.0)]
    pub bandwidth: f64,
    #[command(flatten)]
    pub tuning: PathArgs,
    /// Output directory (report.json, table.csv, curves.csv); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum DiagnoseCommand {
    /// Sparse eigenvalue, third-moment and boundedness checks on samples.
    Assumptions {
        #[arg(long)]
        samples: PathBuf,
        /// Optional model, to report the largest neighborhood norm.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        q: usize,
        /// Sparse-eigenvalue search over subsets.
        #[arg(long, value_enum, default_value_t = EigMethodArg::Exhaustive)]
        method: EigMethodArg,
        /// Random subsets drawn by the Monte Carlo search.
        #[arg(long, default_value_t = 10_000)]
        subsets: usize,
        /// Random restarts for the third-moment search.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mixture design where the Hessian lower bound fails.
    Counterexample {
        #[arg(long, default_value_t = 16)]
        q: usize,
        #[arg(long, default_value_t = 1600)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact sparse minimum eigenvalue versus the degree/norm lower bound.
    Lemma4 {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        q: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Likelihood-ratio statistics over supersets of a true neighborhood.
    LrMonitor {
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        node: usize,
        #[arg(long)]
        q: usize,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        nu: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Exit status for an error: 2 for invalid input, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_) | Error::Parse { .. } => 2,
        _ => 1,
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn open(path: &Path) -> Result<fs::File> {
    fs::File::open(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_samples(path: &Path) -> Result<SampleMatrix> {
    read_samples_csv(open(path)?)
}

fn load_model(path: &Path, p: Option<usize>) -> Result<IsingParams> {
    read_model(&read_text(path)?, p)
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

/// Single-method graph estimate from samples.
pub fn cmd_select(samples: &SampleMatrix, method: &SelectionMethod, parallel: bool) -> Result<SelectionReport> {
    select_graph(samples, method, parallel)
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    let parallel = !cli.serial;
    let start = Instant::now();
    match cli.command {
        Command::Simulate(a) => {
            let mut cfg = ExperimentConfig::new(a.scenario, a.p);
            cfg.coupling = a.coupling.into();
            cfg.magnitude = a.magnitude;
            cfg.gammas = a.gamma;
            cfg.replicates = a.replicates;
            cfg.seed = a.seed;
            cfg.rule = a.rule;
            cfg.methods = a.method.into_iter().map(Into::into).collect();
            cfg.n = a.n;
            cfg.q_max = a.tuning.q_max;
            cfg.path = a.tuning.path();
            cfg.cv = a.tuning.cv();
            cfg.stability = a.tuning.stability();
            cfg.parallel = parallel;
            if let Some(m) = &a.model {
                cfg.custom_model = Some(load_model(m, Some(a.p))?);
            }
            let report = cmd_simulate(&cfg, a.full_reports)?;
            match &a.out {
                Some(dir) => {
                    out_dir(dir)?;
                    emit_json(&report, Some(&dir.join("report.json")))?;
                    write_summary_csv(&report.summary, fs::File::create(dir.join("summary.csv"))?)?;
                }
                None => emit_json(&report, None)?,
            }
        }
        Command::Sample(a) => {
            let params = load_model(&a.model, None)?;
            if a.n == 0 {
                return Err(Error::invalid("n must be >= 1"));
            }
            let samples = draw_samples(
                &params,
                a.n,
                crate::ising::DEFAULT_BURN_IN,
                crate::ising::DEFAULT_THIN,
                RngSeed::new(a.seed, 0),
            )?;
            match &a.out {
                Some(path) => write_samples_csv(&samples, fs::File::create(path)?)?,
                None => write_samples_csv(&samples, std::io::stdout().lock())?,
            }
        }
        Command::Select(a) => {
            let samples = load_samples(&a.samples)?;
            let method = match a.method {
                MethodArg::Bic => SelectionMethod::Bic(BicConfig {
                    gamma: a.gamma,
                    q_max: a.tuning.q_max,
                    path: a.tuning.path(),
                }),
                MethodArg::Cv => SelectionMethod::Cv(a.tuning.cv()),
                MethodArg::Stability => SelectionMethod::Stability {
                    config: a.tuning.stability(),
                    seed: RngSeed::new(a.seed, 0),
                },
            };
            let report = cmd_select(&samples, &method, parallel)?;
            emit_json(&report, a.out.as_deref())?;
        }
        Command::Weather(a) => {
            let (ids, layout) = read_layout_csv(open(&a.layout)?)?;
            let records = read_weather_csv(open(&a.data)?)?;
            let truth = read_graph(&read_text(&a.truth)?, Some(ids.len()))?;
            let cfg = WeatherConfig {
                gammas: a.gamma,
                methods: a.method.into_iter().map(Into::into).collect(),
                completeness: a.completeness,
                trace_is_rain: !a.trace_as_dry,
                q_max: a.tuning.q_max,
                path: a.tuning.path(),
                cv: a.tuning.cv(),
                stability: a.tuning.stability(),
                seed: a.seed,
                bandwidth: a.bandwidth,
                parallel,
                ..WeatherConfig::default()
            };
            let data = prepare_weather(&records, &ids, &layout, &cfg)?;
            let report = cmd_weather(&data, &truth, &cfg)?;
            match &a.out {
                Some(dir) => {
                    out_dir(dir)?;
                    emit_json(&report, Some(&dir.join("report.json")))?;
                    write_table_csv(&report.table, fs::File::create(dir.join("table.csv"))?)?;
                    write_curves_csv(&report.curves, fs::File::create(dir.join("curves.csv"))?)?;
                }
                None => {
                    let mut stdout = std::io::stdout().lock();
                    write_table_csv(&report.table, &mut stdout)?;
                    stdout.flush()?;
                }
            }
        }
        Command::Diagnose { what } => cmd_diagnose(what)?,
    }
    eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
    Ok(())
}

pub fn cmd_diagnose(cmd: DiagnoseCommand) -> Result<()> {
    match cmd {
        DiagnoseCommand::Assumptions {
            samples,
            model,
            q,
            method,
            subsets,
            trials,
            seed,
            out,
        } => {
            let samples = load_samples(&samples)?;
            let params = model.map(|m| load_model(&m, Some(samples.p()))).transpose()?;
            let seed = RngSeed::new(seed, 0);
            let method = match method {
                EigMethodArg::MonteCarlo => EigMethod::MonteCarlo {
                    trials: subsets,
                    seed: seed.substream(0),
                },
                EigMethodArg::Exhaustive => EigMethod::Exhaustive,
            };
            let report = assumption_report(&samples, params.as_ref(), q, method, trials, seed)?;
            emit_json(&report, out.as_deref())
        }
        DiagnoseCommand::Counterexample {
            q,
            n,
            trials,
            seed,
            out,
        } => emit_json(
            &counterexample_run(q, n, trials, RngSeed::new(seed, 0))?,
            out.as_deref(),
        ),
        DiagnoseCommand::Lemma4 { model, q, out } => {
            emit_json(&lemma4_check(&load_model(&model, None)?, q)?, out.as_deref())
        }
        DiagnoseCommand::LrMonitor {
            samples,
            model,
            node,
            q,
            epsilon,
            nu,
            out,
        } => {
            let samples = load_samples(&samples)?;
            let params = load_model(&model, Some(samples.p()))?;
            emit_json(
                &likelihood_ratio_monitor(&samples, &params, node, epsilon, nu, q)?,
                out.as_deref(),
            )
        }
    }
}

/// Writes a model file; handy for feeding `sample` and `diagnose`.
pub fn save_model(params: &IsingParams, path: &Path) -> Result<()> {
    write_model(params, fs::File::create(path)?)
}
