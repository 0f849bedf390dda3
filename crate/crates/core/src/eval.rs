//! Comparing estimated graphs with a reference graph.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ising::Graph;

/// Mean Earth radius in miles.
pub const EARTH_RADIUS_MILES: f64 = 3958.8;
pub const DEFAULT_BANDWIDTH_MILES: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphMetrics {
    /// True positives over true edges (0 when there are none).
    pub psr: f64,
    /// False positives over estimated edges (0 when there are none).
    pub fdr: f64,
    pub true_edge_count: usize,
    pub est_edge_count: usize,
    pub true_positive_count: usize,
}

pub fn psr_fdr(est: &Graph, truth: &Graph) -> Result<GraphMetrics> {
    if est.p() != truth.p() {
        return Err(Error::invalid(format!(
            "estimate has p = {} but truth has p = {}",
            est.p(),
            truth.p()
        )));
    }
    let tp = est.edges().filter(|&(v, w)| truth.contains(v, w)).count();
    let (t, e) = (truth.edge_count(), est.edge_count());
    Ok(GraphMetrics {
        psr: if t == 0 { 0.0 } else { tp as f64 / t as f64 },
        fdr: if e == 0 { 0.0 } else { (e - tp) as f64 / e as f64 },
        true_edge_count: t,
        est_edge_count: e,
        true_positive_count: tp,
    })
}

impl GraphMetrics {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "metric,value")?;
        writeln!(out, "psr,{}", self.psr)?;
        writeln!(out, "fdr,{}", self.fdr)?;
        writeln!(out, "true_edge_count,{}", self.true_edge_count)?;
        writeln!(out, "est_edge_count,{}", self.est_edge_count)?;
        writeln!(out, "true_positive_count,{}", self.true_positive_count)?;
        Ok(())
    }
}

/// Station positions as (latitude, longitude) in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationLayout {
    coordinates: Vec<(f64, f64)>,
}

impl StationLayout {
    pub fn new(coordinates: Vec<(f64, f64)>) -> Result<Self> {
        for (i, &(lat, lon)) in coordinates.iter().enumerate() {
            if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
                return Err(Error::invalid(format!(
                    "station {i} has invalid coordinates ({lat}, {lon})"
                )));
            }
        }
        Ok(StationLayout { coordinates })
    }

    pub fn p(&self) -> usize {
        self.coordinates.len()
    }

    pub fn coordinates(&self) -> &[(f64, f64)] {
        &self.coordinates
    }

    pub fn subset(&self, keep: &[usize]) -> StationLayout {
        StationLayout {
            coordinates: keep.iter().map(|&i| self.coordinates[i]).collect(),
        }
    }
}

/// Haversine great-circle distance in miles.
pub fn pairwise_distance(layout: &StationLayout, v: usize, w: usize) -> f64 {
    let (a, b) = (layout.coordinates[v], layout.coordinates[w]);
    // order the endpoints so that d(v, w) and d(w, v) are bit-identical
    let ((lat1, lon1), (lat2, lon2)) = if a <= b { (a, b) } else { (b, a) };
    let (phi1, phi2) = (lat1.to_radians(), lat2.to_radians());
    let dphi = phi2 - phi1;
    let dlambda = (lon2 - lon1).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_MILES * h.sqrt().min(1.0).asin()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub distance: f64,
    /// `None` where the kernel weights vanish numerically.
    pub probability: Option<f64>,
}

/// `0, step, 2 step, ..., max` (inclusive when `max` is a multiple).
pub fn distance_grid(max: f64, step: f64) -> Vec<f64> {
    let count = (max / step + 1e-9).floor() as usize;
    (0..=count).map(|k| k as f64 * step).collect()
}

/// Default grid: 0 to 500 miles by 2.
pub fn default_distance_grid() -> Vec<f64> {
    distance_grid(500.0, 2.0)
}

/// Nadaraya-Watson estimate of `P(edge | distance)` with a Gaussian kernel
/// of standard deviation `bandwidth`, pooled over all node pairs of all
/// supplied graphs.
pub fn smoothed_edge_probability(
    graphs: &[Graph],
    layout: &StationLayout,
    bandwidth: f64,
    grid: &[f64],
) -> Result<Vec<CurvePoint>> {
    if !(bandwidth > 0.0) {
        return Err(Error::invalid(format!("bandwidth must be positive, got {bandwidth}")));
    }
    let p = layout.p();
    if let Some(g) = graphs.iter().find(|g| g.p() != p) {
        return Err(Error::invalid(format!(
            "graph has p = {} but layout has {p} stations",
            g.p()
        )));
    }
    // each pair: (distance, number of graphs containing it)
    let mut pairs = Vec::with_capacity(p * p.saturating_sub(1) / 2);
    for v in 0..p {
        for w in v + 1..p {
            let hits = graphs.iter().filter(|g| g.contains(v, w)).count();
            pairs.push((pairwise_distance(layout, v, w), hits as f64));
        }
    }
    let copies = graphs.len() as f64;
    Ok(grid
        .iter()
        .map(|&d| {
            let (mut num, mut den) = (0.0, 0.0);
            for &(dist, hits) in &pairs {
                let z = (d - dist) / bandwidth;
                let k = (-0.5 * z * z).exp();
                num += k * hits;
                den += k * copies;
            }
            CurvePoint {
                distance: d,
                probability: (den > 0.0).then(|| (num / den).clamp(0.0, 1.0)),
            }
        })
        .collect())
}

pub fn write_curve_csv<W: Write>(curve: &[CurvePoint], mut out: W) -> Result<()> {
    writeln!(out, "d,probability")?;
    for pt in curve {
        match pt.probability {
            Some(pr) => writeln!(out, "{},{}", pt.distance, pr)?,
            None => writeln!(out, "{},", pt.distance)?,
        }
    }
    Ok(())
}
