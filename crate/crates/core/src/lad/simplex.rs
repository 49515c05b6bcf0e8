//! Exact reference for small l1 problems: the linear program
//!
//! ```text
//! minimize 1ᵀ(e⁺ + e⁻)  subject to  A(x⁺ - x⁻) - e⁺ + e⁻ = b,  all variables >= 0
//! ```
//!
//! solved with a dense full-tableau simplex under Bland's rule. Choosing
//! `e⁻_i` (or `e⁺_i` for negative `b_i`) as the starting basis makes the
//! first tableau feasible, so no phase one is needed.

use super::{l1_objective, DenseMatrix, LadSolution, LinearOperator};
use crate::error::{Error, Result};

const EPS: f64 = 1e-11;

pub fn lp_reference(a: &DenseMatrix, b: &[f64]) -> Result<LadSolution> {
    let (m, n) = (a.nrows(), a.ncols());
    if b.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: b.len(),
        });
    }
    // Columns: x⁺ [0, n), x⁻ [n, 2n), e⁺ [2n, 2n+m), e⁻ [2n+m, 2n+2m).
    let cols = 2 * n + 2 * m;
    let width = cols + 1;
    let e_plus = |i: usize| 2 * n + i;
    let e_minus = |i: usize| 2 * n + m + i;

    let mut tab = vec![0.0; m * width];
    let mut basis = vec![0usize; m];
    let mut sign = vec![1.0; m];
    for i in 0..m {
        sign[i] = if b[i] >= 0.0 { 1.0 } else { -1.0 };
        let row = &mut tab[i * width..(i + 1) * width];
        for j in 0..n {
            row[j] = sign[i] * a.get(i, j);
            row[n + j] = -sign[i] * a.get(i, j);
        }
        row[e_plus(i)] = -sign[i];
        row[e_minus(i)] = sign[i];
        row[cols] = sign[i] * b[i];
        basis[i] = if sign[i] > 0.0 { e_minus(i) } else { e_plus(i) };
    }

    let cost = |j: usize| if j >= 2 * n { 1.0 } else { 0.0 };
    // Reduced costs, with the objective value negated in the last slot.
    let mut reduced: Vec<f64> = (0..width).map(|j| if j < cols { cost(j) } else { 0.0 }).collect();
    for i in 0..m {
        let row = &tab[i * width..(i + 1) * width];
        for j in 0..width {
            reduced[j] -= row[j];
        }
    }

    let max_pivots = 50 * (m + cols).max(10);
    let mut pivots = 0;
    while let Some(enter) = (0..cols).find(|&j| reduced[j] < -EPS) {
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let coef = tab[i * width + enter];
            if coef > EPS {
                let ratio = tab[i * width + cols] / coef;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - EPS || (ratio <= lr + EPS && basis[i] < basis[li]) {
                            Some((i, ratio))
                        } else {
                            Some((li, lr))
                        }
                    }
                };
            }
        }
        let Some((pr, _)) = leave else {
            return Err(Error::Unbounded);
        };
        pivot(&mut tab, &mut reduced, width, pr, enter);
        basis[pr] = enter;
        pivots += 1;
        if pivots > max_pivots {
            // Bland's rule terminates; this only guards against numerical trouble.
            return Err(Error::Unbounded);
        }
    }

    let mut x = vec![0.0; n];
    for (i, &var) in basis.iter().enumerate() {
        let value = tab[i * width + cols];
        if var < n {
            x[var] += value;
        } else if var < 2 * n {
            x[var - n] -= value;
        }
    }
    // Equality-row duals u satisfy reduced(e⁻_i) = 1 - u_i; the sign-of-residual
    // convention used by `LadSolution::dual` is s = -u.
    let dual: Vec<f64> = (0..m).map(|i| reduced[e_minus(i)] - 1.0).collect();
    let lower_bound = -dual.iter().zip(b).map(|(s, b)| s * b).sum::<f64>();
    let objective = l1_objective(a, &x, b);
    Ok(LadSolution {
        x,
        objective,
        iterations: pivots,
        converged: true,
        residual_history: vec![objective],
        dual,
        lower_bound,
    })
}

fn pivot(tab: &mut [f64], reduced: &mut [f64], width: usize, pr: usize, pc: usize) {
    let m = tab.len() / width;
    let p = tab[pr * width + pc];
    for j in 0..width {
        tab[pr * width + j] /= p;
    }
    let pivot_row: Vec<f64> = tab[pr * width..(pr + 1) * width].to_vec();
    for i in 0..m {
        if i == pr {
            continue;
        }
        let f = tab[i * width + pc];
        if f != 0.0 {
            for j in 0..width {
                tab[i * width + j] -= f * pivot_row[j];
            }
        }
    }
    let f = reduced[pc];
    for j in 0..width {
        reduced[j] -= f * pivot_row[j];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(rows: &[Vec<f64>], b: &[f64]) -> LadSolution {
        lp_reference(&DenseMatrix::from_rows(rows).unwrap(), b).unwrap()
    }

    #[test]
    fn median_problem() {
        let sol = lp(&[vec![1.0], vec![1.0]], &[1.0, 3.0]);
        assert!((sol.objective - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_residual() {
        let sol = lp(&[vec![1.0], vec![-1.0]], &[0.0, 0.0]);
        assert_eq!(sol.x, vec![0.0]);
        assert_eq!(sol.objective, 0.0);
    }

    #[test]
    fn three_row_problem_matches_vertex_enumeration() {
        // Vertices interpolate two of the three rows:
        // rows {0,1}: x=(1,1) -> 0+0+2 = 2
        // rows {0,2}: x=(1,-1) -> 0+2+0 = 2
        // rows {1,2}: x=(-1,1) -> 2+0+0 = 2
        let rows = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
        let sol = lp(&rows, &[1.0, 1.0, 0.0]);
        assert!((sol.objective - 2.0).abs() < 1e-12);
        assert!((sol.lower_bound - 2.0).abs() < 1e-12);
    }

    #[test]
    fn negative_rhs_start() {
        let rows = vec![vec![1.0], vec![1.0], vec![1.0]];
        let sol = lp(&rows, &[-4.0, -1.0, 2.0]);
        assert!((sol.x[0] + 1.0).abs() < 1e-12);
        assert!((sol.objective - 6.0).abs() < 1e-12);
        assert!(sol.dual.iter().all(|s| s.abs() <= 1.0 + 1e-12));
    }
}
