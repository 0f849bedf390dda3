//! Logistic regression: likelihood pieces, unpenalized Newton fits on a
//! support and the l1 regularization path.

mod cumulant;
mod data;
mod lasso;
mod likelihood;
mod mle;

pub use cumulant::{cumulant, cumulant_d1, cumulant_d2, sigmoid};
pub use data::RegressionData;
pub use lasso::{
    lambda_grid, lambda_max, lasso_path, lasso_path_on_grid, LassoPath, LassoSolver, DEFAULT_LAMBDA_MIN_RATIO,
    DEFAULT_N_LAMBDAS,
};
pub use likelihood::{linear_predictor, loglik, loglik_score_hessian, score};
pub use mle::{fit_mle, RegressionFit, SEPARATION_CAP};
