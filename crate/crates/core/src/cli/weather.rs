//! Precipitation network analysis: ingest daily station records, binarize
//! into rain / no-rain, fit the network and compare with a reference graph.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Read;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{
    default_distance_grid, psr_fdr, smoothed_edge_probability, CurvePoint, GraphMetrics, StationLayout,
    DEFAULT_BANDWIDTH_MILES,
};
use crate::ising::{Graph, SampleMatrix};
use crate::rng::RngSeed;
use crate::select::{
    select_graph, select_graphs_bic, BicConfig, CvConfig, MethodKind, PathConfig, SelectionMethod, SelectionReport,
    StabilityConfig,
};

use super::simulate::SymmetrizationRule;

/// One station-day. `prcp` is `None` when missing.
#[derive(Debug, Clone, PartialEq)]
pub struct WeatherRecord {
    pub station: String,
    pub date: NaiveDate,
    pub prcp: Option<Precipitation>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Precipitation {
    Amount(f64),
    /// Reported as "T": measurable but below the recording threshold.
    Trace,
}

fn is_missing(s: &str) -> bool {
    matches!(s, "" | "NA" | "M" | "-9999" | "-9999.0")
}

fn parse_date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .or_else(|_| NaiveDate::parse_from_str(s, "%Y%m%d"))
        .ok()
}

/// Reads `station,lat,lon,date,prcp` rows. Dates are `YYYY-MM-DD` or
/// `YYYYMMDD`; the missing markers are empty, `NA`, `M` and `-9999`.
pub fn read_weather_csv<R: Read>(reader: R) -> Result<Vec<WeatherRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::parse(1, format!("missing column '{name}'")))
    };
    let (c_station, c_date, c_prcp) = (col("station")?, col("date")?, col("prcp")?);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec?;
        let field = |c: usize| {
            rec.get(c)
                .ok_or_else(|| Error::parse(line, format!("expected at least {} fields", c + 1)))
        };
        let station = field(c_station)?.to_string();
        if station.is_empty() {
            return Err(Error::parse(line, "empty station id"));
        }
        let raw_date = field(c_date)?;
        let date = parse_date(raw_date).ok_or_else(|| Error::parse(line, format!("unparseable date '{raw_date}'")))?;
        let raw = field(c_prcp)?;
        let prcp = if is_missing(raw) {
            None
        } else if raw.eq_ignore_ascii_case("T") {
            Some(Precipitation::Trace)
        } else {
            let v: f64 = raw
                .parse()
                .map_err(|_| Error::parse(line, format!("unparseable precipitation '{raw}'")))?;
            if !(v >= 0.0) {
                return Err(Error::parse(line, format!("negative precipitation {v}")));
            }
            Some(Precipitation::Amount(v))
        };
        out.push(WeatherRecord { station, date, prcp });
    }
    Ok(out)
}

/// Reads `station,lat,lon` rows; the file order fixes the node numbering.
pub fn read_layout_csv<R: Read>(reader: R) -> Result<(Vec<String>, StationLayout)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut ids = Vec::new();
    let mut coords = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec?;
        if rec.len() < 3 {
            return Err(Error::parse(line, "expected station,lat,lon"));
        }
        let id = rec[0].to_string();
        if !seen.insert(id.clone()) {
            return Err(Error::parse(line, format!("duplicate station '{id}'")));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::parse(line, format!("unparseable coordinate '{s}'")))
        };
        coords.push((num(&rec[1])?, num(&rec[2])?));
        ids.push(id);
    }
    if ids.is_empty() {
        return Err(Error::EmptyData("station layout has no rows".into()));
    }
    Ok((ids, StationLayout::new(coords)?))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeatherConfig {
    pub gammas: Vec<f64>,
    pub methods: Vec<MethodKind>,
    /// Stations observed on fewer than this fraction of days are dropped.
    pub completeness: f64,
    /// Days of the month kept, to thin out serial dependence.
    pub days_of_month: Vec<u32>,
    /// Whether a trace report counts as rain.
    pub trace_is_rain: bool,
    pub q_max: Option<usize>,
    pub path: PathConfig,
    pub cv: CvConfig,
    pub stability: StabilityConfig,
    pub seed: u64,
    pub bandwidth: f64,
    pub grid: Vec<f64>,
    #[serde(skip)]
    pub parallel: bool,
}

impl Default for WeatherConfig {
    fn default() -> Self {
        WeatherConfig {
            gammas: vec![0.0, 0.25, 0.5],
            methods: vec![MethodKind::Bic, MethodKind::Cv, MethodKind::Stability],
            completeness: 0.9,
            days_of_month: vec![1, 16],
            trace_is_rain: true,
            q_max: None,
            path: PathConfig::default(),
            cv: CvConfig::default(),
            stability: StabilityConfig::default(),
            seed: 1,
            bandwidth: DEFAULT_BANDWIDTH_MILES,
            grid: default_distance_grid(),
            parallel: true,
        }
    }
}

/// Binary station-by-day data ready for selection.
#[derive(Debug, Clone)]
pub struct WeatherDataset {
    pub samples: SampleMatrix,
    /// Indices into the original layout, in node order.
    pub kept: Vec<usize>,
    pub stations: Vec<String>,
    pub dates: Vec<NaiveDate>,
    pub layout: StationLayout,
    pub dropped_stations: Vec<String>,
    pub dropped_days: usize,
}

/// Filters to the configured days, drops incomplete stations, then drops
/// days with any remaining gap. Rain is coded `+1`, dry `-1`.
pub fn prepare_weather(
    records: &[WeatherRecord],
    station_ids: &[String],
    layout: &StationLayout,
    cfg: &WeatherConfig,
) -> Result<WeatherDataset> {
    if station_ids.len() != layout.p() {
        return Err(Error::invalid(format!(
            "{} station ids for {} layout rows",
            station_ids.len(),
            layout.p()
        )));
    }
    if !(cfg.completeness >= 0.0 && cfg.completeness <= 1.0) {
        return Err(Error::invalid("completeness must lie in [0, 1]"));
    }
    let index: HashMap<&str, usize> = station_ids.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut table: BTreeMap<NaiveDate, Vec<Option<bool>>> = BTreeMap::new();
    for (k, r) in records.iter().enumerate() {
        let &s = index
            .get(r.station.as_str())
            .ok_or_else(|| Error::parse(k + 2, format!("station '{}' is not in the layout", r.station)))?;
        if !cfg.days_of_month.contains(&r.date.day()) {
            continue;
        }
        let row = table.entry(r.date).or_insert_with(|| vec![None; station_ids.len()]);
        if row[s].is_some() {
            return Err(Error::parse(
                k + 2,
                format!("duplicate record for {} on {}", r.station, r.date),
            ));
        }
        row[s] = r.prcp.map(|p| match p {
            Precipitation::Amount(v) => v > 0.0,
            Precipitation::Trace => cfg.trace_is_rain,
        });
    }
    if table.is_empty() {
        return Err(Error::EmptyData("no records on the selected days of the month".into()));
    }
    let days = table.len() as f64;
    let mut kept = Vec::new();
    let mut dropped_stations = Vec::new();
    for s in 0..station_ids.len() {
        let observed = table.values().filter(|row| row[s].is_some()).count() as f64;
        if observed / days >= cfg.completeness && observed > 0.0 {
            kept.push(s);
        } else {
            dropped_stations.push(station_ids[s].clone());
        }
    }
    if kept.len() < 2 {
        return Err(Error::EmptyData(format!(
            "{} station(s) meet the {:.0}% completeness threshold; need at least 2",
            kept.len(),
            cfg.completeness * 100.0
        )));
    }
    let mut dates = Vec::new();
    let mut values = Vec::new();
    for (date, row) in &table {
        let obs: Option<Vec<bool>> = kept.iter().map(|&s| row[s]).collect();
        if let Some(obs) = obs {
            dates.push(*date);
            values.extend(obs.into_iter().map(|rain| if rain { 1i8 } else { -1 }));
        }
    }
    if dates.is_empty() {
        return Err(Error::EmptyData("every day has at least one missing station".into()));
    }
    let dropped_days = table.len() - dates.len();
    Ok(WeatherDataset {
        samples: SampleMatrix::new(dates.len(), kept.len(), values)?,
        stations: kept.iter().map(|&s| station_ids[s].clone()).collect(),
        layout: layout.subset(&kept),
        kept,
        dates,
        dropped_stations,
        dropped_days,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub method: String,
    pub rule: SymmetrizationRule,
    pub psr_pct: f64,
    pub fdr_pct: f64,
    pub edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeCurve {
    pub method: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rule: Option<SymmetrizationRule>,
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeatherReport {
    pub config: WeatherConfig,
    pub n: usize,
    pub stations: Vec<String>,
    pub dropped_stations: Vec<String>,
    pub dropped_days: usize,
    pub truth_edges: usize,
    pub table: Vec<TableRow>,
    /// One curve per method and rule, followed by the reference graph's.
    pub curves: Vec<EdgeCurve>,
    pub reports: Vec<SelectionReport>,
}

pub fn method_label(kind: MethodKind, gamma: Option<f64>) -> String {
    match (kind, gamma) {
        (MethodKind::Bic, Some(g)) => format!("BIC_{g}"),
        (MethodKind::Bic, None) => "BIC".into(),
        (MethodKind::Cv, _) => "CV".into(),
        (MethodKind::Stability, _) => "Stability".into(),
    }
}

/// Fits every configured method, then scores it against `truth` (indexed by
/// the original layout order) under both symmetrization rules.
pub fn cmd_weather(data: &WeatherDataset, truth: &Graph, cfg: &WeatherConfig) -> Result<WeatherReport> {
    if truth.p() != data.kept.len() + data.dropped_stations.len() {
        return Err(Error::invalid(format!(
            "reference graph has p = {} but the layout has {} stations",
            truth.p(),
            data.kept.len() + data.dropped_stations.len()
        )));
    }
    if cfg.methods.is_empty() {
        return Err(Error::invalid("at least one method is required"));
    }
    let truth = truth.induced(&data.kept);
    let mut fitted: Vec<(String, SelectionReport)> = Vec::new();
    for &kind in &cfg.methods {
        match kind {
            MethodKind::Bic => {
                if cfg.gammas.is_empty() {
                    return Err(Error::invalid("BIC needs at least one gamma"));
                }
                let bic = BicConfig {
                    gamma: 0.0,
                    q_max: cfg.q_max,
                    path: cfg.path,
                };
                let reports = select_graphs_bic(&data.samples, &cfg.gammas, &bic, cfg.parallel)?;
                for (g, r) in cfg.gammas.iter().zip(reports) {
                    fitted.push((method_label(kind, Some(*g)), r));
                }
            }
            MethodKind::Cv => {
                let m = SelectionMethod::Cv(CvConfig {
                    path: cfg.path,
                    ..cfg.cv
                });
                fitted.push((method_label(kind, None), select_graph(&data.samples, &m, cfg.parallel)?));
            }
            MethodKind::Stability => {
                let m = SelectionMethod::Stability {
                    config: StabilityConfig {
                        path: cfg.path,
                        ..cfg.stability
                    },
                    seed: RngSeed::new(cfg.seed, 0),
                };
                fitted.push((method_label(kind, None), select_graph(&data.samples, &m, cfg.parallel)?));
            }
        }
    }
    let mut table = Vec::new();
    let mut curves = Vec::new();
    for (label, report) in &fitted {
        for (rule, graph) in [
            (SymmetrizationRule::And, &report.graph_and),
            (SymmetrizationRule::Or, &report.graph_or),
        ] {
            let m: GraphMetrics = psr_fdr(graph, &truth)?;
            table.push(TableRow {
                method: label.clone(),
                rule,
                psr_pct: 100.0 * m.psr,
                fdr_pct: 100.0 * m.fdr,
                edges: m.est_edge_count,
            });
            curves.push(EdgeCurve {
                method: label.clone(),
                rule: Some(rule),
                points: smoothed_edge_probability(std::slice::from_ref(graph), &data.layout, cfg.bandwidth, &cfg.grid)?,
            });
        }
    }
    curves.push(EdgeCurve {
        method: "truth".into(),
        rule: None,
        points: smoothed_edge_probability(std::slice::from_ref(&truth), &data.layout, cfg.bandwidth, &cfg.grid)?,
    });
    Ok(WeatherReport {
        config: cfg.clone(),
        n: data.samples.n(),
        stations: data.stations.clone(),
        dropped_stations: data.dropped_stations.clone(),
        dropped_days: data.dropped_days,
        truth_edges: truth.edge_count(),
        table,
        curves,
        reports: fitted.into_iter().map(|(_, r)| r).collect(),
    })
}

pub fn write_table_csv<W: std::io::Write>(rows: &[TableRow], mut out: W) -> Result<()> {
    writeln!(out, "method,rule,PSR%,FDR%,edges")?;
    for r in rows {
        let rule = match r.rule {
            SymmetrizationRule::And => "AND",
            SymmetrizationRule::Or => "OR",
        };
        writeln!(
            out,
            "{},{},{:.1},{:.1},{}",
            r.method, rule, r.psr_pct, r.fdr_pct, r.edges
        )?;
    }
    Ok(())
}

/// Wide format: one distance column, then one column per curve.
pub fn write_curves_csv<W: std::io::Write>(curves: &[EdgeCurve], mut out: W) -> Result<()> {
    let Some(first) = curves.first() else {
        return Ok(());
    };
    let mut header = vec!["d".to_string()];
    for c in curves {
        header.push(match c.rule {
            Some(SymmetrizationRule::And) => format!("{}_AND", c.method),
            Some(SymmetrizationRule::Or) => format!("{}_OR", c.method),
            None => c.method.clone(),
        });
    }
    writeln!(out, "{}", header.join(","))?;
    for (k, pt) in first.points.iter().enumerate() {
        let mut row = vec![pt.distance.to_string()];
        for c in curves {
            row.push(c.points[k].probability.map(|v| v.to_string()).unwrap_or_default());
        }
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
