use crate::error::{Error, Result};

/// `n x p` matrix of `+-1` observations, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleMatrix {
    n: usize,
    p: usize,
    values: Vec<i8>,
}

impl SampleMatrix {
    pub fn new(n: usize, p: usize, values: Vec<i8>) -> Result<Self> {
        if values.len() != n * p {
            return Err(Error::invalid(format!(
                "sample has {} entries, expected {n} x {p}",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|&x| x != 1 && x != -1) {
            return Err(Error::invalid(format!(
                "entry ({}, {}) is {}, expected -1 or +1",
                pos / p.max(1),
                pos % p.max(1),
                values[pos]
            )));
        }
        Ok(SampleMatrix { n, p, values })
    }

    pub fn from_rows(rows: &[Vec<i8>]) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != p) {
            return Err(Error::invalid("rows have unequal lengths"));
        }
        Self::new(rows.len(), p, rows.concat())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.values[i * self.p + j]
    }

    pub fn row(&self, i: usize) -> &[i8] {
        &self.values[i * self.p..(i + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i8]> {
        self.values.chunks_exact(self.p.max(1)).take(self.n)
    }

    pub fn values(&self) -> &[i8] {
        &self.values
    }

    /// Rows `rows` in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> SampleMatrix {
        let mut values = Vec::with_capacity(rows.len() * self.p);
        for &i in rows {
            values.extend_from_slice(self.row(i));
        }
        SampleMatrix {
            n: rows.len(),
            p: self.p,
            values,
        }
    }

    /// Column `j` of the input becomes column `perm[j]` of the output.
    pub fn permute_columns(&self, perm: &[usize]) -> SampleMatrix {
        assert_eq!(perm.len(), self.p);
        let mut values = vec![0i8; self.values.len()];
        for i in 0..self.n {
            for j in 0..self.p {
                values[i * self.p + perm[j]] = self.values[i * self.p + j];
            }
        }
        SampleMatrix { values, ..*self }
    }

    /// Stacks `other` below `self`.
    pub fn concat(&self, other: &SampleMatrix) -> Result<SampleMatrix> {
        if self.p != other.p {
            return Err(Error::invalid("cannot stack samples with different p"));
        }
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        Ok(SampleMatrix {
            n: self.n + other.n,
            p: self.p,
            values,
        })
    }

    /// Every entry negated.
    pub fn flipped(&self) -> SampleMatrix {
        SampleMatrix {
            values: self.values.iter().map(|&x| -x).collect(),
            ..*self
        }
    }

    /// Empirical second-moment matrix `(1/n) sum_i z_i z_i^T`, row-major.
    pub fn second_moment(&self) -> Vec<f64> {
        let p = self.p;
        let mut counts = vec![0i64; p * p];
        for row in self.rows() {
            for a in 0..p {
                let za = i64::from(row[a]);
                for b in a..p {
                    counts[a * p + b] += za * i64::from(row[b]);
                }
            }
        }
        let n = self.n.max(1) as f64;
        let mut out = vec![0.0; p * p];
        for a in 0..p {
            for b in a..p {
                let m = counts[a * p + b] as f64 / n;
                out[a * p + b] = m;
                out[b * p + a] = m;
            }
        }
        out
    }
}
