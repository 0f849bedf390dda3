//! Ising models on `{-1,+1}^p` without external field.
//!
//! The joint law is proportional to `exp(sum_{v<w} theta_vw z_v z_w)`, so
//! node `v` given the rest is a logistic regression with log-odds
//! `sum_w 2 theta_vw z_w` (see [`conditional_logit`]).

mod exact;
mod generate;
mod gibbs;
mod graph;
pub mod io;
mod params;
mod sample;

pub use exact::{exact_distribution, exact_sample, ExactDistribution, MAX_EXACT_NODES};
pub use generate::{generate_lattice, generate_star, Coupling, LatticeNeighbors, StarSparsity};
pub use gibbs::{gibbs_sample, DEFAULT_BURN_IN, DEFAULT_THIN};
pub use graph::Graph;
pub use params::{conditional_logit, IsingParams};
pub use sample::SampleMatrix;
