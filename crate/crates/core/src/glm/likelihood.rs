use nalgebra::{DMatrix, DVector};

use super::{cumulant, cumulant_d1, cumulant_d2, RegressionData};

/// `x_{iJ}^T beta` for every row.
pub fn linear_predictor(data: &RegressionData, support: &[usize], beta: &[f64]) -> Vec<f64> {
    assert_eq!(support.len(), beta.len(), "support and beta lengths differ");
    let mut eta = vec![0.0; data.n()];
    for (&j, &b) in support.iter().zip(beta) {
        if b == 0.0 {
            continue;
        }
        for (e, &x) in eta.iter_mut().zip(data.x().column(j).iter()) {
            *e += x * b;
        }
    }
    eta
}

/// `sum_i [y_i eta_i - b(eta_i)]`.
pub fn loglik(data: &RegressionData, support: &[usize], beta: &[f64]) -> f64 {
    loglik_at(data, &linear_predictor(data, support, beta))
}

pub(crate) fn loglik_at(data: &RegressionData, eta: &[f64]) -> f64 {
    eta.iter().zip(data.y()).map(|(&e, &y)| y * e - cumulant(e)).sum()
}

/// Score `sum_i x_{iJ} (y_i - b'(eta_i))`.
pub fn score(data: &RegressionData, support: &[usize], beta: &[f64]) -> DVector<f64> {
    let eta = linear_predictor(data, support, beta);
    score_at(data, support, &eta)
}

pub(crate) fn score_at(data: &RegressionData, support: &[usize], eta: &[f64]) -> DVector<f64> {
    let resid: Vec<f64> = eta.iter().zip(data.y()).map(|(&e, &y)| y - cumulant_d1(e)).collect();
    DVector::from_iterator(
        support.len(),
        support
            .iter()
            .map(|&j| data.x().column(j).iter().zip(&resid).map(|(x, r)| x * r).sum::<f64>()),
    )
}

pub(crate) fn hessian_at(data: &RegressionData, support: &[usize], eta: &[f64]) -> DMatrix<f64> {
    let k = support.len();
    let weights: Vec<f64> = eta.iter().map(|&e| cumulant_d2(e)).collect();
    let mut h = DMatrix::zeros(k, k);
    for a in 0..k {
        let xa = data.x().column(support[a]);
        for b in a..k {
            let xb = data.x().column(support[b]);
            let v: f64 = xa
                .iter()
                .zip(xb.iter())
                .zip(&weights)
                .map(|((p, q), w)| p * q * w)
                .sum();
            h[(a, b)] = v;
            h[(b, a)] = v;
        }
    }
    h
}

/// Log-likelihood, score and negative Hessian `sum_i x x^T b''(eta_i)` of
/// the submodel on `support` at `beta`.
pub fn loglik_score_hessian(
    data: &RegressionData,
    support: &[usize],
    beta: &[f64],
) -> (f64, DVector<f64>, DMatrix<f64>) {
    let eta = linear_predictor(data, support, beta);
    (
        loglik_at(data, &eta),
        score_at(data, support, &eta),
        hessian_at(data, support, &eta),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_values() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, -1.0, 1.0, 1.0, -1.0, 1.0]);
        let d = RegressionData::new(x, vec![1.0, 0.0, 1.0]).unwrap();
        let (l, s, h) = loglik_score_hessian(&d, &[0, 1], &[0.0, 0.0]);
        assert!((l + 3.0 * std::f64::consts::LN_2).abs() < 1e-12);
        // sum_i x_ij (y_i - 1/2)
        assert!((s[0] - (0.5 - 0.5 - 0.5)).abs() < 1e-15);
        assert!((s[1] - (-0.5 - 0.5 + 0.5)).abs() < 1e-15);
        assert!((h[(0, 0)] - 0.75).abs() < 1e-15);
        assert_eq!(h[(0, 1)], h[(1, 0)]);
    }

    #[test]
    fn empty_support_is_null_model() {
        let d = RegressionData::new(DMatrix::from_element(4, 1, 1.0), vec![1.0, 0.0, 1.0, 1.0]).unwrap();
        let (l, s, h) = loglik_score_hessian(&d, &[], &[]);
        assert!((l + 4.0 * std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(s.len(), 0);
        assert_eq!(h.nrows(), 0);
    }
}
