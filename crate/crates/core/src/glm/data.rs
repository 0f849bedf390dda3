use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::ising::SampleMatrix;

/// Design matrix with binary responses.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionData {
    x: DMatrix<f64>,
    y: Vec<f64>,
    intercept: Option<usize>,
}

impl RegressionData {
    pub fn new(x: DMatrix<f64>, y: Vec<f64>) -> Result<Self> {
        if x.nrows() == 0 || x.ncols() == 0 {
            return Err(Error::invalid("regression data needs n >= 1 and p >= 1"));
        }
        if y.len() != x.nrows() {
            return Err(Error::invalid(format!("{} responses for {} rows", y.len(), x.nrows())));
        }
        if let Some(i) = y.iter().position(|&v| v != 0.0 && v != 1.0) {
            return Err(Error::invalid(format!("response {i} is {}, expected 0 or 1", y[i])));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("design matrix has non-finite entries"));
        }
        Ok(RegressionData { x, y, intercept: None })
    }

    /// Nodewise regression of node `v`: response `(Z_v + 1) / 2`, covariates
    /// `Z_w` for `w != v` in increasing order of `w`.
    pub fn from_samples(samples: &SampleMatrix, v: usize) -> Result<Self> {
        let (n, p) = (samples.n(), samples.p());
        if v >= p {
            return Err(Error::invalid(format!("node {v} out of range for p = {p}")));
        }
        if p < 2 {
            return Err(Error::invalid("nodewise regression needs p >= 2"));
        }
        let x = DMatrix::from_fn(n, p - 1, |i, j| {
            let w = if j < v { j } else { j + 1 };
            f64::from(samples.get(i, w))
        });
        let y = (0..n).map(|i| f64::from((samples.get(i, v) + 1) / 2)).collect();
        Self::new(x, y)
    }

    /// Appends a constant column that the lasso leaves unpenalized.
    pub fn with_intercept(mut self) -> Self {
        if self.intercept.is_none() {
            let p = self.x.ncols();
            self.x = self.x.insert_column(p, 1.0);
            self.intercept = Some(p);
        }
        self
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn intercept(&self) -> Option<usize> {
        self.intercept
    }

    pub fn select_rows(&self, rows: &[usize]) -> RegressionData {
        RegressionData {
            x: self.x.select_rows(rows),
            y: rows.iter().map(|&i| self.y[i]).collect(),
            intercept: self.intercept,
        }
    }

    /// Multiplies column `j` by `c`.
    pub fn scale_column(mut self, j: usize, c: f64) -> Self {
        self.x.column_mut(j).scale_mut(c);
        self
    }
}
