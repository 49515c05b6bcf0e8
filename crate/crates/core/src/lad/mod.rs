//! Least-absolute-deviations solver: `min_x ||A x - b||_1`.
//!
//! [`solve_l1`] is a primal-dual interior-point method whose Newton systems
//! reduce to a banded normal matrix `Aᵀ W A`, so the trend problem (whose
//! Gram matrix has half-bandwidth `period - 1`) costs `O(n · period²)` per
//! iteration. [`lp_reference`] solves the same problem exactly with a dense
//! simplex and exists to cross-check it on small instances.

mod banded;
mod ipm;
mod simplex;

pub use banded::{BandedCholesky, BandedSymmetric};
pub use ipm::solve_l1;
pub use simplex::lp_reference;

use crate::error::{Error, Result};

/// A linear map that the l1 solver can work with.
pub trait LinearOperator {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// `out = A x`.
    fn apply(&self, x: &[f64], out: &mut [f64]);
    /// `out = Aᵀ y`.
    fn apply_transpose(&self, y: &[f64], out: &mut [f64]);
    /// `Aᵀ diag(weights) A` in banded form.
    fn weighted_gram(&self, weights: &[f64]) -> BandedSymmetric;

    /// Largest column l1 norm, i.e. `||Aᵀ||_∞`.
    fn transpose_inf_norm(&self) -> f64 {
        // Generic route through |A|ᵀ 1 is not available without entry access,
        // so probe columns one at a time.
        let (m, n) = (self.nrows(), self.ncols());
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; m];
        let mut best = 0.0_f64;
        for j in 0..n {
            e[j] = 1.0;
            self.apply(&e, &mut col);
            e[j] = 0.0;
            best = best.max(col.iter().map(|v| v.abs()).sum());
        }
        best
    }
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    actual: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
}

impl LinearOperator for DenseMatrix {
    fn nrows(&self) -> usize {
        self.rows
    }

    fn ncols(&self) -> usize {
        self.cols
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    fn apply_transpose(&self, y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, &yi) in y.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * yi;
            }
        }
    }

    fn weighted_gram(&self, weights: &[f64]) -> BandedSymmetric {
        let mut g = BandedSymmetric::zeros(self.cols, self.cols.saturating_sub(1));
        for (i, &w) in weights.iter().enumerate() {
            let row = self.row(i);
            for a in 0..self.cols {
                if row[a] == 0.0 {
                    continue;
                }
                for b in 0..=a {
                    g.add(a, b, w * row[a] * row[b]);
                }
            }
        }
        g
    }

    fn transpose_inf_norm(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Compressed sparse row matrix. Column indices within a row must be sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from per-row `(column, value)` lists.
    pub fn from_row_entries(cols: usize, rows: &[Vec<(usize, f64)>]) -> Result<Self> {
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for r in rows {
            let mut sorted = r.clone();
            sorted.sort_by_key(|&(c, _)| c);
            for (c, v) in sorted {
                if c >= cols {
                    return Err(Error::IndexOutOfBounds { index: c, len: cols });
                }
                col_idx.push(c);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn from_dense(a: &DenseMatrix) -> Self {
        let rows: Vec<Vec<(usize, f64)>> = (0..a.rows)
            .map(|i| {
                a.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(j, v)| (j, *v))
                    .collect()
            })
            .collect();
        Self::from_row_entries(a.cols, &rows).expect("columns in range")
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    /// Half-bandwidth of `AᵀA`: the widest column span of any row.
    pub fn gram_bandwidth(&self) -> usize {
        (0..self.rows)
            .filter_map(|i| {
                let span = self.row_ptr[i]..self.row_ptr[i + 1];
                let cols = &self.col_idx[span];
                Some(cols.last()? - cols.first()?)
            })
            .max()
            .unwrap_or(0)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut data = vec![0.0; self.rows * self.cols];
        for i in 0..self.rows {
            for (j, v) in self.row(i) {
                data[i * self.cols + j] += v;
            }
        }
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }
}

impl LinearOperator for CsrMatrix {
    fn nrows(&self) -> usize {
        self.rows
    }

    fn ncols(&self) -> usize {
        self.cols
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).map(|(j, v)| v * x[j]).sum();
        }
    }

    fn apply_transpose(&self, y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, &yi) in y.iter().enumerate() {
            for (j, v) in self.row(i) {
                out[j] += v * yi;
            }
        }
    }

    fn weighted_gram(&self, weights: &[f64]) -> BandedSymmetric {
        let mut g = BandedSymmetric::zeros(self.cols, self.gram_bandwidth());
        for (i, &w) in weights.iter().enumerate() {
            let span = self.row_ptr[i]..self.row_ptr[i + 1];
            let cols = &self.col_idx[span.clone()];
            let vals = &self.values[span];
            for a in 0..cols.len() {
                for b in 0..=a {
                    g.add(cols[a], cols[b], w * vals[a] * vals[b]);
                }
            }
        }
        g
    }

    fn transpose_inf_norm(&self) -> f64 {
        let mut col_sums = vec![0.0; self.cols];
        for (j, v) in self.col_idx.iter().zip(&self.values) {
            col_sums[*j] += v.abs();
        }
        col_sums.into_iter().fold(0.0, f64::max)
    }
}

/// Result of an l1 fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LadSolution {
    pub x: Vec<f64>,
    /// `||A x - b||_1` at `x`.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Best objective seen after each iteration; non-increasing.
    pub residual_history: Vec<f64>,
    /// Dual vector `s` with `|s_i| <= 1` and `Aᵀ s ≈ 0`; empty if the method
    /// does not produce one.
    pub dual: Vec<f64>,
    /// Certified lower bound on the optimal objective (`bᵀ s` for a feasible
    /// dual `s`), or 0 when none is available.
    pub lower_bound: f64,
}

/// `||A x - b||_1`.
pub fn l1_objective<A: LinearOperator + ?Sized>(a: &A, x: &[f64], b: &[f64]) -> f64 {
    residual(a, x, b).iter().map(|r| r.abs()).sum()
}

/// `A x - b`.
pub fn residual<A: LinearOperator + ?Sized>(a: &A, x: &[f64], b: &[f64]) -> Vec<f64> {
    let mut r = vec![0.0; a.nrows()];
    a.apply(x, &mut r);
    r.iter_mut().zip(b).for_each(|(r, b)| *r -= b);
    r
}

/// Subgradient optimality check for `x`: builds `s` with `s_i = sign(r_i)`
/// where `|r_i| > zero_tol` and `s_i = clamp(dual_i, -1, 1)` elsewhere, and
/// returns `||Aᵀ s||_∞`. `x` minimizes `||Ax - b||_1` iff some such `s` gives 0.
pub fn optimality_violation<A: LinearOperator + ?Sized>(
    a: &A,
    x: &[f64],
    b: &[f64],
    dual: &[f64],
    zero_tol: f64,
) -> f64 {
    let r = residual(a, x, b);
    let s: Vec<f64> = r
        .iter()
        .enumerate()
        .map(|(i, &ri)| {
            if ri.abs() > zero_tol {
                ri.signum()
            } else {
                dual.get(i).copied().unwrap_or(0.0).clamp(-1.0, 1.0)
            }
        })
        .collect();
    let mut ats = vec![0.0; a.ncols()];
    a.apply_transpose(&s, &mut ats);
    ats.iter().fold(0.0, |m, v| m.max(v.abs()))
}
