//! Benchmark graph families: square lattices and stars.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngSeed;

use super::IsingParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeNeighbors {
    /// Up, down, left, right.
    Four,
    /// Four plus the diagonals.
    Eight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    /// `theta = +magnitude` on every edge.
    Attractive,
    /// Independent fair signs times `magnitude`.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StarSparsity {
    /// `q = ceil(ln p)` spokes.
    Logarithmic,
    /// `q = ceil(0.1 p)` spokes.
    Linear,
}

impl StarSparsity {
    pub fn spokes(self, p: usize) -> usize {
        match self {
            StarSparsity::Logarithmic => (p as f64).ln().ceil() as usize,
            StarSparsity::Linear => (0.1 * p as f64).ceil() as usize,
        }
    }
}

/// `side x side` lattice with row-major node numbering.
pub fn generate_lattice(
    side: usize,
    neighbors: LatticeNeighbors,
    coupling: Coupling,
    magnitude: f64,
    seed: RngSeed,
) -> Result<IsingParams> {
    if side < 2 {
        return Err(Error::invalid(format!("lattice side must be >= 2, got {side}")));
    }
    check_magnitude(magnitude)?;
    let node = |r: usize, c: usize| r * side + c;
    let mut pairs = Vec::new();
    for r in 0..side {
        for c in 0..side {
            if c + 1 < side {
                pairs.push((node(r, c), node(r, c + 1)));
            }
            if r + 1 < side {
                pairs.push((node(r, c), node(r + 1, c)));
            }
            if neighbors == LatticeNeighbors::Eight && r + 1 < side {
                if c + 1 < side {
                    pairs.push((node(r, c), node(r + 1, c + 1)));
                }
                if c > 0 {
                    pairs.push((node(r, c), node(r + 1, c - 1)));
                }
            }
        }
    }
    pairs.sort_unstable();
    let mut rng = seed.rng();
    let weighted = pairs.into_iter().map(|(v, w)| {
        let t = match coupling {
            Coupling::Attractive => magnitude,
            Coupling::Random => {
                if rng.random_bool(0.5) {
                    magnitude
                } else {
                    -magnitude
                }
            }
        };
        (v, w, t)
    });
    let weighted: Vec<_> = weighted.collect();
    IsingParams::from_edges(side * side, weighted)
}

/// Star with hub 0 and spokes to nodes `1..=q`.
pub fn generate_star(p: usize, sparsity: StarSparsity, magnitude: f64) -> Result<IsingParams> {
    if p < 2 {
        return Err(Error::invalid(format!("star needs p >= 2, got {p}")));
    }
    check_magnitude(magnitude)?;
    let q = sparsity.spokes(p);
    if q >= p {
        return Err(Error::invalid(format!("star with p = {p} would need {q} spokes")));
    }
    IsingParams::from_edges(p, (1..=q).map(|w| (0, w, magnitude)))
}

fn check_magnitude(magnitude: f64) -> Result<()> {
    if magnitude > 0.0 && magnitude.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "coupling magnitude must be positive, got {magnitude}"
        )))
    }
}
