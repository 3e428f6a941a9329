//! Compressed-sparse-row complex matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub values: Vec<Complex64>,
}

impl SparseMatrix {
    /// Builds from `(row, col, value)` triplets; duplicates are summed and
    /// explicit zeros dropped.
    pub fn from_triplets(n_rows: usize, n_cols: usize, mut triplets: Vec<(usize, usize, Complex64)>) -> Self {
        triplets.sort_unstable_by_key(|t| (t.0, t.1));
        let mut indptr = vec![0; n_rows + 1];
        let mut indices = Vec::with_capacity(triplets.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            debug_assert!(r < n_rows && c < n_cols);
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..n_rows {
            indptr[r + 1] += indptr[r];
        }
        let mut m = Self {
            n_rows,
            n_cols,
            indptr,
            indices,
            values,
        };
        m.prune();
        m
    }

    fn prune(&mut self) {
        let mut indptr = vec![0; self.n_rows + 1];
        let mut indices = Vec::with_capacity(self.indices.len());
        let mut values = Vec::with_capacity(self.values.len());
        for r in 0..self.n_rows {
            for k in self.indptr[r]..self.indptr[r + 1] {
                if self.values[k] != Complex64::new(0.0, 0.0) {
                    indices.push(self.indices[k]);
                    values.push(self.values[k]);
                }
            }
            indptr[r + 1] = indices.len();
        }
        self.indptr = indptr;
        self.indices = indices;
        self.values = values;
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates over stored `(row, col, value)` entries.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.n_rows).flat_map(move |r| (self.indptr[r]..self.indptr[r + 1]).map(move |k| (r, self.indices[k], self.values[k])))
    }

    pub fn iter_row(&self, row: usize) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (self.indptr[row]..self.indptr[row + 1]).map(move |k| (row, self.indices[k], self.values[k]))
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let range = self.indptr[row]..self.indptr[row + 1];
        match self.indices[range.clone()].binary_search(&col) {
            Ok(k) => self.values[range.start + k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) -> Result<()> {
        if x.len() != self.n_cols {
            return Err(Error::DimensionMismatch {
                expected: self.n_cols,
                found: x.len(),
            });
        }
        if y.len() != self.n_rows {
            return Err(Error::DimensionMismatch {
                expected: self.n_rows,
                found: y.len(),
            });
        }
        for r in 0..self.n_rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            y[r] = acc;
        }
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        let t = self.iter().map(|(r, c, v)| (c, r, v.conj())).collect();
        Self::from_triplets(self.n_cols, self.n_rows, t)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.n_rows, self.n_cols);
        for (r, c, v) in self.iter() {
            m[(r, c)] += v;
        }
        m
    }

    /// Largest `|A - A^dag|` entry.
    pub fn hermitian_deviation(&self) -> f64 {
        self.iter()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Largest `i - j` and `j - i` over stored entries.
    pub fn bandwidths(&self) -> (usize, usize) {
        self.iter().fold((0, 0), |(kl, ku), (r, c, _)| {
            (kl.max(r.saturating_sub(c)), ku.max(c.saturating_sub(r)))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn triplets_sum_and_prune() {
        let m = SparseMatrix::from_triplets(
            2,
            3,
            vec![(1, 2, c(1.0, 0.0)), (0, 0, c(2.0, 0.0)), (1, 2, c(0.5, 1.0)), (0, 1, c(1.0, 0.0)), (0, 1, c(-1.0, 0.0))],
        );
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(1, 2), c(1.5, 1.0));
        assert_eq!(m.get(0, 1), c(0.0, 0.0));
        let mut y = vec![c(0.0, 0.0); 2];
        m.matvec(&[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 2.0)], &mut y).unwrap();
        assert_eq!(y, vec![c(2.0, 0.0), c(-2.0, 3.0)]);
        assert!(m.matvec(&[c(1.0, 0.0)], &mut y).is_err());
        assert_eq!(m.bandwidths(), (0, 1));
    }

    #[test]
    fn adjoint_and_hermiticity() {
        let m = SparseMatrix::from_triplets(2, 2, vec![(0, 1, c(1.0, 2.0)), (1, 0, c(1.0, -2.0)), (0, 0, c(3.0, 0.0))]);
        assert_eq!(m.hermitian_deviation(), 0.0);
        assert_eq!(m.adjoint(), m);
        let n = SparseMatrix::from_triplets(2, 2, vec![(0, 1, c(1.0, 0.0))]);
        assert_eq!(n.hermitian_deviation(), 1.0);
    }
}
