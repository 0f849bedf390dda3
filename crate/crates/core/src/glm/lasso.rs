//! l1-penalized logistic regression, `min -l(beta) + lambda ||beta||_1`
//! (sum form, no intercept unless the data carries one).
//!
//! Each lambda is solved by proximal Newton: the log-likelihood is replaced
//! by its quadratic expansion with exact `b''` weights, the penalized
//! quadratic is minimized by cyclic coordinate descent over an active set
//! (with full sweeps to admit new coordinates), and the resulting direction
//! is accepted with a backtracking line search on the true objective.

use serde::{Deserialize, Serialize};

use super::likelihood::loglik_at;
use super::{cumulant_d1, cumulant_d2, RegressionData};

pub const DEFAULT_N_LAMBDAS: usize = 100;
pub const DEFAULT_LAMBDA_MIN_RATIO: f64 = 0.01;

const COORD_TOL: f64 = 1e-9;
const INNER_REL_TOL: f64 = 1e-3;
const MAX_PASSES: usize = 10_000;
const MAX_OUTER: usize = 200;
const CURVATURE_FLOOR: f64 = 1e-12;
const KKT_TOL_PER_OBS: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LassoPath {
    pub lambdas: Vec<f64>,
    /// Dense coefficient vectors, one per lambda.
    pub solutions: Vec<Vec<f64>>,
    /// Nonzero indices of each solution (sorted).
    pub supports: Vec<Vec<usize>>,
}

impl LassoPath {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }
}

/// Smallest penalty whose solution is all-zero (on the penalized
/// coordinates): `max_j |sum_i x_ij (y_i - b'(eta0_i))|`, where `eta0` is
/// zero or, with an intercept, the intercept-only fit.
pub fn lambda_max(data: &RegressionData) -> f64 {
    let mut solver = LassoSolver::new(data);
    solver.fit_unpenalized_only();
    solver.max_penalized_score()
}

/// `n` log-spaced penalties from `lambda_max` down to `lambda_max * ratio`.
pub fn lambda_grid(lambda_max: f64, n: usize, min_ratio: f64) -> Vec<f64> {
    assert!(n >= 2, "lambda grid needs at least two points");
    assert!(
        min_ratio > 0.0 && min_ratio < 1.0,
        "lambda_min_ratio must lie in (0, 1)"
    );
    let top = lambda_max.max(f64::MIN_POSITIVE * 1e10);
    let step = min_ratio.ln() / (n - 1) as f64;
    (0..n).map(|k| top * (step * k as f64).exp()).collect()
}

/// Regularization path on the default log grid from [`lambda_max`].
pub fn lasso_path(data: &RegressionData, n_lambdas: usize, lambda_min_ratio: f64) -> LassoPath {
    let grid = lambda_grid(lambda_max(data), n_lambdas, lambda_min_ratio);
    lasso_path_on_grid(data, &grid)
}

/// Regularization path on a caller-supplied decreasing grid, warm-started
/// from one penalty to the next.
pub fn lasso_path_on_grid(data: &RegressionData, lambdas: &[f64]) -> LassoPath {
    let mut solver = LassoSolver::new(data);
    solver.fit_unpenalized_only();
    let mut solutions = Vec::with_capacity(lambdas.len());
    let mut supports = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        solver.solve(lambda);
        supports.push(solver.support());
        solutions.push(solver.beta().to_vec());
    }
    LassoPath {
        lambdas: lambdas.to_vec(),
        solutions,
        supports,
    }
}

/// Warm-startable solver for a single dataset. Successive calls to
/// [`LassoSolver::solve`] start from the previous solution.
#[derive(Debug, Clone)]
pub struct LassoSolver<'a> {
    data: &'a RegressionData,
    penalty: Vec<f64>,
    beta: Vec<f64>,
    eta: Vec<f64>,
    // scratch
    weights: Vec<f64>,
    work: Vec<f64>,
    curvature: Vec<f64>,
}

impl<'a> LassoSolver<'a> {
    pub fn new(data: &'a RegressionData) -> Self {
        let mut penalty = vec![1.0; data.p()];
        if let Some(j) = data.intercept() {
            penalty[j] = 0.0;
        }
        LassoSolver {
            data,
            penalty,
            beta: vec![0.0; data.p()],
            eta: vec![0.0; data.n()],
            weights: vec![0.0; data.n()],
            work: vec![0.0; data.n()],
            curvature: vec![0.0; data.p()],
        }
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.beta.len()).filter(|&j| self.beta[j] != 0.0).collect()
    }

    pub fn objective(&self, lambda: f64) -> f64 {
        self.objective_at(&self.beta, &self.eta, lambda)
    }

    fn objective_at(&self, beta: &[f64], eta: &[f64], lambda: f64) -> f64 {
        let l1: f64 = beta.iter().zip(&self.penalty).map(|(b, w)| b.abs() * w).sum();
        -loglik_at(self.data, eta) + lambda * l1
    }

    /// Largest KKT violation at the current point, in score units.
    pub fn kkt_violation(&self, lambda: f64) -> f64 {
        let resid: Vec<f64> = self
            .eta
            .iter()
            .zip(self.data.y())
            .map(|(&e, &y)| y - cumulant_d1(e))
            .collect();
        let mut worst: f64 = 0.0;
        for j in 0..self.beta.len() {
            let s = dot(self.data.x().column(j).as_slice(), &resid);
            let bound = lambda * self.penalty[j];
            let v = if self.beta[j] != 0.0 {
                (s - bound * self.beta[j].signum()).abs()
            } else {
                (s.abs() - bound).max(0.0)
            };
            worst = worst.max(v);
        }
        worst
    }

    fn max_penalized_score(&self) -> f64 {
        let resid: Vec<f64> = self
            .eta
            .iter()
            .zip(self.data.y())
            .map(|(&e, &y)| y - cumulant_d1(e))
            .collect();
        (0..self.beta.len())
            .filter(|&j| self.penalty[j] > 0.0)
            .map(|j| dot(self.data.x().column(j).as_slice(), &resid).abs())
            .fold(0.0, f64::max)
    }

    /// Fits the unpenalized coordinates with all penalized ones at zero.
    fn fit_unpenalized_only(&mut self) {
        if self.penalty.iter().all(|&w| w > 0.0) {
            return;
        }
        // an infinite penalty on everything else is the same as lambda huge
        let saved = self.penalty.clone();
        for w in &mut self.penalty {
            if *w > 0.0 {
                *w = 1.0;
            }
        }
        self.solve(f64::MAX / 1e10);
        self.penalty = saved;
    }

    /// Minimizes `-l(beta) + lambda sum_j w_j |beta_j|` from the current
    /// point. Returns the number of coordinate-descent passes used.
    pub fn solve(&mut self, lambda: f64) -> usize {
        let n = self.data.n() as f64;
        let mut passes = 0;
        let tol = KKT_TOL_PER_OBS * n;
        for _ in 0..MAX_OUTER {
            if self.kkt_violation(lambda) <= tol || passes >= MAX_PASSES {
                break;
            }
            let (_, used) = self.newton_step(lambda, MAX_PASSES.saturating_sub(passes));
            passes += used;
        }
        passes
    }

    /// One proximal Newton iteration; returns (max coefficient change,
    /// passes used).
    fn newton_step(&mut self, lambda: f64, pass_budget: usize) -> (f64, usize) {
        let x = self.data.x();
        let (n, p) = (self.data.n(), self.data.p());
        for i in 0..n {
            let e = self.eta[i];
            self.weights[i] = cumulant_d2(e);
            // working residual of the quadratic model at d = 0
            self.work[i] = self.data.y()[i] - cumulant_d1(e);
        }
        for j in 0..p {
            let col = x.column(j);
            self.curvature[j] = col.iter().zip(&self.weights).map(|(v, w)| v * v * w).sum();
        }

        let start = self.beta.clone();
        let mut beta = self.beta.clone();
        let mut active: Vec<usize> = (0..p).filter(|&j| beta[j] != 0.0 || self.penalty[j] == 0.0).collect();
        let all: Vec<usize> = (0..p).collect();
        let mut passes = 0;
        // inexact inner solve: the outer KKT test decides final accuracy
        let mut inner_tol = None;
        loop {
            // full sweep; admit coordinates that move
            let delta = self.sweep(&mut beta, &all, lambda);
            passes += 1;
            let tol = *inner_tol.get_or_insert((INNER_REL_TOL * delta).max(COORD_TOL));
            let new_active: Vec<usize> = (0..p).filter(|&j| beta[j] != 0.0 || self.penalty[j] == 0.0).collect();
            let grew = new_active.iter().any(|j| !active.contains(j));
            active = new_active;
            if (delta < tol && !grew) || passes >= pass_budget {
                break;
            }
            while passes < pass_budget {
                let d = self.sweep(&mut beta, &active, lambda);
                passes += 1;
                if d < tol {
                    break;
                }
            }
            if passes >= pass_budget {
                break;
            }
        }

        // line search along beta - start on the penalized objective
        let direction: Vec<f64> = beta.iter().zip(&start).map(|(b, s)| b - s).collect();
        let moved: Vec<usize> = (0..p).filter(|&j| direction[j] != 0.0).collect();
        if moved.is_empty() {
            return (0.0, passes);
        }
        let mut x_dir = vec![0.0; n];
        for &j in &moved {
            let dj = direction[j];
            for (xd, v) in x_dir.iter_mut().zip(x.column(j).iter()) {
                *xd += v * dj;
            }
        }
        let f0 = self.objective(lambda);
        let mut t = 1.0;
        let mut trial_beta = beta;
        let mut trial_eta: Vec<f64> = self.eta.iter().zip(&x_dir).map(|(e, d)| e + d).collect();
        for _ in 0..50 {
            let f = self.objective_at(&trial_beta, &trial_eta, lambda);
            if f <= f0 + 1e-12 * f0.abs().max(1.0) {
                break;
            }
            t *= 0.5;
            for &j in &moved {
                trial_beta[j] = start[j] + t * direction[j];
            }
            for i in 0..n {
                trial_eta[i] = self.eta[i] + t * x_dir[i];
            }
        }
        let change = moved
            .iter()
            .map(|&j| (trial_beta[j] - start[j]).abs())
            .fold(0.0, f64::max);
        self.beta = trial_beta;
        self.eta = trial_eta;
        (change, passes)
    }

    /// One cyclic pass of coordinate descent on the penalized quadratic
    /// model over `coords`. Updates `work` so that it stays equal to
    /// `y - b'(eta0) - W X (beta - beta0)`.
    fn sweep(&mut self, beta: &mut [f64], coords: &[usize], lambda: f64) -> f64 {
        let x = self.data.x();
        let mut max_delta: f64 = 0.0;
        for &j in coords {
            let h = self.curvature[j];
            if h < CURVATURE_FLOOR {
                continue;
            }
            let col = x.column(j);
            let col = col.as_slice();
            let g = dot(col, &self.work) + h * beta[j];
            let new = soft_threshold(g, lambda * self.penalty[j]) / h;
            let delta = new - beta[j];
            if delta != 0.0 {
                for ((r, &v), &w) in self.work.iter_mut().zip(col).zip(&self.weights) {
                    *r -= w * v * delta;
                }
                beta[j] = new;
                max_delta = max_delta.max(delta.abs());
            }
        }
        max_delta
    }
}

fn soft_threshold(g: f64, t: f64) -> f64 {
    if g > t {
        g - t
    } else if g < -t {
        g + t
    } else {
        0.0
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
