//! Trend extraction: seasonal differencing followed by a single sparse l1
//! fit for the first difference of the trend.
//!
//! With `g` the seasonal difference of the denoised series and `x` the trend
//! slope (`x_k = τ_{k+1} - τ_k`, length `N - 1`), the objective is
//!
//! ```text
//! Σ_r |g_r - Σ_{i=r}^{r+T-1} x_i|  +  λ1 Σ_k |x_k|  +  λ2 Σ_k |x_k - x_{k+1}|
//! ```
//!
//! written as `||P x - q||_1` with `P = [M; λ1 I; λ2 D]`, `q = [g; 0]`.

use crate::config::LadSolverConfig;
use crate::error::{Error, Result};
use crate::lad::{solve_l1, BandedSymmetric, CsrMatrix, LadSolution, LinearOperator};

/// `g_i = y_{i+T} - y_i` for `i = 0..N-T`.
pub fn seasonal_difference(values: &[f64], period: usize) -> Result<Vec<f64>> {
    if period == 0 || values.len() <= period {
        return Err(Error::SeriesTooShort {
            len: values.len(),
            period,
            required: period + 1,
        });
    }
    Ok(values[period..]
        .iter()
        .zip(values)
        .map(|(later, earlier)| later - earlier)
        .collect())
}

/// The stacked system `(P, q)` in structured form.
///
/// `P` is never stored: products use sliding-window sums for the `M` block
/// and adjacent differences for `D`. Zero penalties keep their (all-zero)
/// rows so the shape depends only on `N` and `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseLinearSystem {
    len: usize,
    period: usize,
    lambda1: f64,
    lambda2: f64,
    g: Vec<f64>,
}

impl SparseLinearSystem {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn seasonal_difference(&self) -> &[f64] {
        &self.g
    }

    fn m_rows(&self) -> usize {
        self.len - self.period
    }

    fn d_rows(&self) -> usize {
        self.len - 2
    }

    /// Structural nonzeros of `P`: `(N-T)T + (N-1) + 2(N-2)`.
    pub fn structural_nnz(&self) -> usize {
        self.m_rows() * self.period + (self.len - 1) + 2 * self.d_rows()
    }

    /// `q = [g; 0]`.
    pub fn rhs(&self) -> Vec<f64> {
        let mut q = self.g.clone();
        q.resize(self.nrows(), 0.0);
        q
    }

    /// Explicit CSR copy of `P`, zero-penalty entries included.
    pub fn to_csr(&self) -> CsrMatrix {
        let n = self.len;
        let t = self.period;
        let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(self.nrows());
        for r in 0..self.m_rows() {
            rows.push((r..r + t).map(|c| (c, 1.0)).collect());
        }
        for k in 0..n - 1 {
            rows.push(vec![(k, self.lambda1)]);
        }
        for r in 0..self.d_rows() {
            rows.push(vec![(r, self.lambda2), (r + 1, -self.lambda2)]);
        }
        CsrMatrix::from_row_entries(n - 1, &rows).expect("columns in range")
    }
}

impl LinearOperator for SparseLinearSystem {
    fn nrows(&self) -> usize {
        self.m_rows() + (self.len - 1) + self.d_rows()
    }

    fn ncols(&self) -> usize {
        self.len - 1
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let (mr, t, cols) = (self.m_rows(), self.period, self.len - 1);
        let (m_out, rest) = out.split_at_mut(mr);
        let (i_out, d_out) = rest.split_at_mut(cols);
        for (r, o) in m_out.iter_mut().enumerate() {
            *o = x[r..r + t].iter().sum();
        }
        for (o, xi) in i_out.iter_mut().zip(x) {
            *o = self.lambda1 * xi;
        }
        for (r, o) in d_out.iter_mut().enumerate() {
            *o = self.lambda2 * (x[r] - x[r + 1]);
        }
    }

    fn apply_transpose(&self, y: &[f64], out: &mut [f64]) {
        let (mr, t, cols) = (self.m_rows(), self.period, self.len - 1);
        let y_m = &y[..mr];
        let y_i = &y[mr..mr + cols];
        let y_d = &y[mr + cols..];
        let mut prefix = vec![0.0; mr + 1];
        for r in 0..mr {
            prefix[r + 1] = prefix[r] + y_m[r];
        }
        for (j, o) in out.iter_mut().enumerate() {
            let lo = (j + 1).saturating_sub(t);
            let hi = j.min(mr - 1);
            let mut acc = if lo <= hi { prefix[hi + 1] - prefix[lo] } else { 0.0 };
            acc += self.lambda1 * y_i[j];
            if j < y_d.len() {
                acc += self.lambda2 * y_d[j];
            }
            if j >= 1 {
                acc -= self.lambda2 * y_d[j - 1];
            }
            *o = acc;
        }
    }

    fn weighted_gram(&self, weights: &[f64]) -> BandedSymmetric {
        let (mr, t, cols) = (self.m_rows(), self.period, self.len - 1);
        let w_m = &weights[..mr];
        let w_i = &weights[mr..mr + cols];
        let w_d = &weights[mr + cols..];
        let mut gram = BandedSymmetric::zeros(cols, (t - 1).max(1));
        let mut prefix = vec![0.0; mr + 1];
        for r in 0..mr {
            prefix[r + 1] = prefix[r] + w_m[r];
        }
        // (MᵀWM)_{ij} sums the weights of rows whose window covers both i and j.
        for i in 0..cols {
            let lo_j = (i + 1).saturating_sub(t);
            for j in lo_j..=i {
                let r_lo = (i + 1).saturating_sub(t);
                let r_hi = j.min(mr - 1);
                if r_lo <= r_hi {
                    gram.add(i, j, prefix[r_hi + 1] - prefix[r_lo]);
                }
            }
        }
        let l1 = self.lambda1 * self.lambda1;
        for (i, w) in w_i.iter().enumerate() {
            gram.add(i, i, l1 * w);
        }
        let l2 = self.lambda2 * self.lambda2;
        for (r, w) in w_d.iter().enumerate() {
            gram.add(r, r, l2 * w);
            gram.add(r + 1, r + 1, l2 * w);
            gram.add(r + 1, r, -l2 * w);
        }
        gram
    }

    fn transpose_inf_norm(&self) -> f64 {
        // Interior columns are covered by T rows of M, one of I and two of D.
        (self.period.min(self.m_rows()) as f64) + self.lambda1.abs() + 2.0 * self.lambda2.abs()
    }
}

/// Assembles `(P, q)` for a seasonal difference `g` of a length-`len` series.
pub fn build_system(
    g: &[f64],
    len: usize,
    period: usize,
    lambda1: f64,
    lambda2: f64,
) -> Result<SparseLinearSystem> {
    if period == 0 || len < period + 2 {
        return Err(Error::SeriesTooShort {
            len,
            period,
            required: period + 2,
        });
    }
    if g.len() != len - period {
        return Err(Error::DimensionMismatch {
            expected: len - period,
            actual: g.len(),
        });
    }
    for (name, value) in [("lambda1", lambda1), ("lambda2", lambda2)] {
        if !(value.is_finite() && value >= 0.0) {
            return Err(Error::InvalidParameter { name, value });
        }
    }
    Ok(SparseLinearSystem {
        len,
        period,
        lambda1,
        lambda2,
        g: g.to_vec(),
    })
}

/// Trend relative to its first value, plus the fit that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeTrend {
    /// `τ_t - τ_0`; the first entry is always 0.
    pub relative: Vec<f64>,
    /// The fitted first differences.
    pub slope: Vec<f64>,
    pub solution: LadSolution,
}

impl RelativeTrend {
    /// `y'' = y' - relative trend`.
    pub fn detrend(&self, values: &[f64]) -> Vec<f64> {
        values.iter().zip(&self.relative).map(|(y, r)| y - r).collect()
    }
}

/// Cumulative sum of `slope` starting from 0.
pub fn integrate_slope(slope: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(slope.len() + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for d in slope {
        acc += d;
        out.push(acc);
    }
    out
}

/// Robust relative trend of a (denoised) series.
pub fn extract_relative_trend(
    values: &[f64],
    period: usize,
    lambda1: f64,
    lambda2: f64,
    solver: &LadSolverConfig,
) -> Result<RelativeTrend> {
    let g = seasonal_difference(values, period)?;
    let system = build_system(&g, values.len(), period, lambda1, lambda2)?;
    let solution = solve_l1(&system, &system.rhs(), solver)?;
    Ok(RelativeTrend {
        relative: integrate_slope(&solution.x),
        slope: solution.x.clone(),
        solution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lad::{l1_objective, lp_reference};

    /// Scalar triple sum, written straight from the objective's definition
    /// with one-based time indices.
    fn triple_sum(g: &[f64], x: &[f64], n: usize, t: usize, l1: f64, l2: f64) -> f64 {
        // grad[k] holds ∇τ_k for k = 2..=n.
        let grad = |k: usize| x[k - 2];
        let mut total = 0.0;
        for tt in t + 1..=n {
            let mut s = 0.0;
            for i in 0..t {
                s += grad(tt - i);
            }
            total += (g[tt - t - 1] - s).abs();
        }
        for tt in 2..=n {
            total += l1 * grad(tt).abs();
        }
        for tt in 3..=n {
            total += l2 * (grad(tt) - grad(tt - 1)).abs();
        }
        total
    }

    fn lcg(state: &mut u64) -> f64 {
        *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
    }

    #[test]
    fn periodic_input_has_zero_difference() {
        let v: Vec<f64> = (0..12).map(|t| [1.0, 5.0, -2.0][t % 3]).collect();
        assert!(seasonal_difference(&v, 3).unwrap().iter().all(|g| *g == 0.0));
    }

    #[test]
    fn ramp_difference_is_period_times_slope() {
        let v: Vec<f64> = (1..=10).map(|t| t as f64).collect();
        assert_eq!(seasonal_difference(&v, 3).unwrap(), vec![3.0; 7]);
    }

    #[test]
    fn hand_computed_difference() {
        let v = [1.0, 2.0, 4.0, 1.0, 2.0, 4.0, 2.0, 3.0, 5.0];
        assert_eq!(
            seasonal_difference(&v, 3).unwrap(),
            vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0]
        );
    }

    #[test]
    fn too_short_for_difference() {
        assert!(seasonal_difference(&[1.0, 2.0], 2).is_err());
    }

    #[test]
    fn system_shape_for_small_case() {
        let g = [0.5, -1.0, 2.0];
        let sys = build_system(&g, 5, 2, 1.0, 1.0).unwrap();
        assert_eq!((sys.nrows(), sys.ncols()), (10, 4));
        assert_eq!(sys.rhs(), vec![0.5, -1.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let dense = sys.to_csr().to_dense();
        for r in 0..3 {
            let row: Vec<f64> = (0..4).map(|c| dense.get(r, c)).collect();
            let mut expected = vec![0.0; 4];
            expected[r] = 1.0;
            expected[r + 1] = 1.0;
            assert_eq!(row, expected);
        }
        assert_eq!(sys.structural_nnz(), 3 * 2 + 4 + 2 * 3);
        assert_eq!(sys.to_csr().nnz(), sys.structural_nnz());
    }

    #[test]
    fn zero_penalties_keep_rows() {
        let sys = build_system(&[1.0; 6], 10, 4, 0.0, 0.0).unwrap();
        assert_eq!(sys.nrows(), 3 * 10 - 4 - 3);
        let mut out = vec![1.0; sys.nrows()];
        sys.apply(&[1.0; 9], &mut out);
        assert!(out[6..].iter().all(|v| *v == 0.0));
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            build_system(&[1.0; 4], 10, 4, 1.0, 1.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn structured_products_match_csr() {
        let mut s = 7u64;
        for &(n, t) in &[(8usize, 3usize), (30, 10), (300, 7), (41, 2)] {
            let g: Vec<f64> = (0..n - t).map(|_| lcg(&mut s)).collect();
            let sys = build_system(&g, n, t, 1.3, 0.4).unwrap();
            let csr = sys.to_csr();
            let x: Vec<f64> = (0..n - 1).map(|_| lcg(&mut s)).collect();
            let y: Vec<f64> = (0..sys.nrows()).map(|_| lcg(&mut s)).collect();
            let w: Vec<f64> = (0..sys.nrows()).map(|_| lcg(&mut s).abs() + 0.1).collect();
            let (mut a, mut b) = (vec![0.0; sys.nrows()], vec![0.0; sys.nrows()]);
            sys.apply(&x, &mut a);
            csr.apply(&x, &mut b);
            for (u, v) in a.iter().zip(&b) {
                assert!((u - v).abs() < 1e-12);
            }
            let (mut a, mut b) = (vec![0.0; n - 1], vec![0.0; n - 1]);
            sys.apply_transpose(&y, &mut a);
            csr.apply_transpose(&y, &mut b);
            for (u, v) in a.iter().zip(&b) {
                assert!((u - v).abs() < 1e-12);
            }
            let (ga, gb) = (sys.weighted_gram(&w), csr.weighted_gram(&w));
            for i in 0..n - 1 {
                for j in 0..n - 1 {
                    assert!((ga.get(i, j) - gb.get(i, j)).abs() < 1e-10, "n={n} t={t} ({i},{j})");
                }
            }
            assert!((sys.transpose_inf_norm() - csr.transpose_inf_norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn matrix_form_equals_triple_sum() {
        let mut s = 11u64;
        let (n, t) = (8, 3);
        let g: Vec<f64> = (0..n - t).map(|_| 3.0 * lcg(&mut s)).collect();
        let sys = build_system(&g, n, t, 1.0, 1.0).unwrap();
        let q = sys.rhs();
        for _ in 0..20 {
            let x: Vec<f64> = (0..n - 1).map(|_| 2.0 * lcg(&mut s)).collect();
            let a = l1_objective(&sys, &x, &q);
            let b = triple_sum(&g, &x, n, t, 1.0, 1.0);
            assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0));
        }
    }

    #[test]
    fn periodic_input_gives_zero_trend() {
        let v: Vec<f64> = (0..40).map(|t| [1.0, 3.0, -2.0, 0.5, 0.0][t % 5]).collect();
        let tr = extract_relative_trend(&v, 5, 1.0, 0.5, &LadSolverConfig::default()).unwrap();
        assert!(tr.relative.iter().all(|r| *r == 0.0));
    }

    #[test]
    fn level_shift_becomes_a_step() {
        let (n, t, t0) = (40usize, 5usize, 22usize);
        let v: Vec<f64> = (0..n)
            .map(|i| [1.0, 3.0, -2.0, 0.5, 0.0][i % t] + if i >= t0 { 5.0 } else { 0.0 })
            .collect();
        let tr = extract_relative_trend(&v, t, 0.1, 0.5, &LadSolverConfig::default()).unwrap();
        assert_eq!(tr.relative[0], 0.0);
        for (i, r) in tr.relative.iter().enumerate() {
            let ideal = if i >= t0 { 5.0 } else { 0.0 };
            assert!((r - ideal).abs() < 0.5, "i={i} r={r}");
        }
        // Compare objectives against the exact LP.
        let g = seasonal_difference(&v, t).unwrap();
        let sys = build_system(&g, n, t, 0.1, 0.5).unwrap();
        let exact = lp_reference(&sys.to_csr().to_dense(), &sys.rhs()).unwrap();
        assert!((tr.solution.objective - exact.objective).abs() <= 1e-4 * exact.objective.max(1.0));
    }

    #[test]
    fn ramp_gives_constant_slope() {
        let (n, t, a) = (36usize, 4usize, 0.3);
        let v: Vec<f64> = (0..n).map(|i| [2.0, -1.0, 0.0, -1.0][i % t] + a * i as f64).collect();
        let tr = extract_relative_trend(&v, t, 0.01, 0.5, &LadSolverConfig::default()).unwrap();
        let g = seasonal_difference(&v, t).unwrap();
        let sys = build_system(&g, n, t, 0.01, 0.5).unwrap();
        let exact = lp_reference(&sys.to_csr().to_dense(), &sys.rhs()).unwrap();
        assert!((tr.solution.objective - exact.objective).abs() <= 1e-4 * exact.objective.max(1.0));
        for d in &tr.slope {
            assert!((d - a).abs() < 1e-3, "slope {d}");
        }
    }
}
