use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::likelihood::{hessian_at, linear_predictor, loglik_at, score_at};
use super::RegressionData;

/// Newton iterations stop and report non-convergence once `||beta||_2`
/// exceeds this (quasi-separated data).
pub const SEPARATION_CAP: f64 = 30.0;

const MAX_NEWTON_ITERS: usize = 200;
const MAX_HALVINGS: usize = 60;
const SCORE_TOL_PER_OBS: f64 = 1e-8;
const STEP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub support: Vec<usize>,
    pub beta: Vec<f64>,
    pub loglik: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Sup-norm of the score at `beta`.
    pub grad_norm: f64,
}

impl RegressionFit {
    /// Coefficients expanded to length `p`.
    pub fn dense_beta(&self, p: usize) -> Vec<f64> {
        let mut out = vec![0.0; p];
        for (&j, &b) in self.support.iter().zip(&self.beta) {
            out[j] = b;
        }
        out
    }
}

/// Unpenalized maximum-likelihood fit of the submodel on `support`
/// (sorted and deduplicated first), by Newton's method with step halving.
///
/// Converged means `||score||_inf <= 1e-8 n`. The loop also stops when the
/// Newton step falls below `1e-10` in norm, or when `||beta||_2` passes
/// [`SEPARATION_CAP`]; in the latter case the coefficients are scaled back
/// onto the cap and `converged` is false.
pub fn fit_mle(data: &RegressionData, support: &[usize]) -> Result<RegressionFit> {
    let mut support = support.to_vec();
    support.sort_unstable();
    support.dedup();
    if let Some(&j) = support.iter().find(|&&j| j >= data.p()) {
        return Err(Error::invalid(format!(
            "support index {j} out of range for p = {}",
            data.p()
        )));
    }
    let n = data.n();
    let k = support.len();
    let tol = SCORE_TOL_PER_OBS * n as f64;

    let mut beta = DVector::zeros(k);
    let mut eta = vec![0.0; n];
    let mut ll = loglik_at(data, &eta);
    if k == 0 {
        return Ok(RegressionFit {
            support,
            beta: Vec::new(),
            loglik: ll,
            converged: true,
            iterations: 0,
            grad_norm: 0.0,
        });
    }

    let mut iterations = 0;
    let mut capped = false;
    let mut s = score_at(data, &support, &eta);
    while iterations < MAX_NEWTON_ITERS {
        if s.amax() <= tol {
            break;
        }
        iterations += 1;
        let h = hessian_at(data, &support, &eta);
        let step = newton_direction(h, &s);

        // slack for rounding in the n-term sum near the optimum
        let slack = 1e-12 * (1.0 + ll.abs());
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let trial = &beta + &step * t;
            let trial_eta = linear_predictor(data, &support, trial.as_slice());
            let trial_ll = loglik_at(data, &trial_eta);
            if trial_ll >= ll - slack {
                accepted = Some((trial, trial_eta, trial_ll));
                break;
            }
            t *= 0.5;
        }
        let Some((new_beta, new_eta, new_ll)) = accepted else {
            break;
        };
        let moved = (&new_beta - &beta).norm();
        beta = new_beta;
        eta = new_eta;
        ll = new_ll;

        let norm = beta.norm();
        if norm > SEPARATION_CAP {
            beta *= SEPARATION_CAP / norm;
            eta = linear_predictor(data, &support, beta.as_slice());
            ll = loglik_at(data, &eta);
            capped = true;
            s = score_at(data, &support, &eta);
            break;
        }
        s = score_at(data, &support, &eta);
        if moved <= STEP_TOL {
            break;
        }
    }

    let grad_norm = s.amax();
    Ok(RegressionFit {
        support,
        beta: beta.as_slice().to_vec(),
        loglik: ll,
        converged: !capped && grad_norm <= tol,
        iterations,
        grad_norm,
    })
}

fn newton_direction(h: DMatrix<f64>, s: &DVector<f64>) -> DVector<f64> {
    if let Some(chol) = h.clone().cholesky() {
        return chol.solve(s);
    }
    // singular information: ridge scaled to the diagonal
    let scale = h.diagonal().amax().max(1e-12);
    let k = h.nrows();
    for ridge in [1e-10, 1e-8, 1e-6, 1e-4] {
        let reg = &h + DMatrix::identity(k, k) * (ridge * scale);
        if let Some(chol) = reg.cholesky() {
            return chol.solve(s);
        }
    }
    s / scale
}
