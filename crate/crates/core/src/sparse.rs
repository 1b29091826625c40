//! A minimal compressed-sparse-row (CSR) matrix.
//!
//! The DEC operators are all small, fixed-stencil matrices; we only need
//! construction from triplets, matrix–vector products, transposition, and
//! matrix–matrix products (the latter purely for verifying operator
//! identities such as `D2·D1 = 0`). Summation orders are fixed so results
//! are bit-for-bit deterministic.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Build from (row, col, value) triplets; duplicate entries are summed.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Self {
        let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nrows];
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet index out of bounds");
            per_row[r].push((c, v));
        }
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in &mut per_row {
            row.sort_by_key(|&(c, _)| c);
            let mut i = 0;
            while i < row.len() {
                let c = row[i].0;
                let mut v = 0.0;
                while i < row.len() && row[i].0 == c {
                    v += row[i].1;
                    i += 1;
                }
                col_idx.push(c);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Self { nrows, ncols, row_ptr, col_idx, values }
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self::from_triplets(nrows, ncols, core::iter::empty())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, 1.0)))
    }

    /// Square diagonal matrix from its diagonal entries.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self::from_triplets(diag.len(), diag.len(), diag.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Entries of row `r` as (column, value) pairs, in column order.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[range.clone()]
            .iter()
            .zip(&self.values[range])
            .map(|(&c, &v)| (c, v))
    }

    /// All entries as (row, column, value) triplets.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    /// Matrix–vector product `self · x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols, "vector length mismatch");
        let mut y = vec![0.0; self.nrows];
        for r in 0..self.nrows {
            let mut acc = 0.0;
            for (c, v) in self.row(r) {
                acc += v * x[c];
            }
            y[r] = acc;
        }
        y
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(
            self.ncols,
            self.nrows,
            self.triplets().map(|(r, c, v)| (c, r, v)),
        )
    }

    /// Matrix–matrix product `self · rhs`.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.ncols, rhs.nrows, "matmul dimension mismatch");
        let mut triplets = Vec::new();
        for r in 0..self.nrows {
            for (k, v) in self.row(r) {
                for (c, w) in rhs.row(k) {
                    triplets.push((r, c, v * w));
                }
            }
        }
        Self::from_triplets(self.nrows, rhs.ncols, triplets)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for v in &mut out.values {
            *v *= s;
        }
        out
    }

    /// `self + other` (same shape required).
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        Self::from_triplets(
            self.nrows,
            self.ncols,
            self.triplets().chain(other.triplets()),
        )
    }

    /// Largest absolute entry of `self − other`, for identity checks.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.add(&other.scaled(-1.0))
            .values
            .iter()
            .fold(0.0, |m, v| if v.abs() > m { v.abs() } else { m })
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| if v.abs() > m { v.abs() } else { m })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let m = CsrMatrix::from_triplets(2, 2, [(0, 1, 2.0), (0, 1, 3.0), (1, 0, -1.0)]);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.apply(&[1.0, 1.0]), vec![5.0, -1.0]);
    }

    #[test]
    fn transpose_roundtrip() {
        let m = CsrMatrix::from_triplets(2, 3, [(0, 2, 1.5), (1, 0, -2.0)]);
        assert_eq!(m.transpose().transpose(), m);
    }

    #[test]
    fn matmul_against_identity() {
        let m = CsrMatrix::from_triplets(3, 3, [(0, 1, 4.0), (2, 0, 1.0), (1, 1, -3.0)]);
        assert_eq!(m.matmul(&CsrMatrix::identity(3)), m);
        assert_eq!(CsrMatrix::identity(3).matmul(&m), m);
    }

    #[test]
    fn matmul_small_dense() {
        // [[1,2],[3,4]] · [[0,1],[1,0]] = [[2,1],[4,3]]
        let a = CsrMatrix::from_triplets(2, 2, [(0, 0, 1.0), (0, 1, 2.0), (1, 0, 3.0), (1, 1, 4.0)]);
        let b = CsrMatrix::from_triplets(2, 2, [(0, 1, 1.0), (1, 0, 1.0)]);
        let c = a.matmul(&b);
        assert_eq!(c.apply(&[1.0, 0.0]), vec![2.0, 4.0]);
        assert_eq!(c.apply(&[0.0, 1.0]), vec![1.0, 3.0]);
    }
}
