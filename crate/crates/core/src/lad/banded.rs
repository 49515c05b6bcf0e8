//! Symmetric positive definite matrices stored by lower band, with an
//! in-place Cholesky factorization.

/// Lower band of a symmetric `n x n` matrix with half-bandwidth `bandwidth`.
///
/// Entry `(i, j)` with `i - bandwidth <= j <= i` lives at
/// `data[i * (bandwidth + 1) + (i - j)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedSymmetric {
    n: usize,
    bandwidth: usize,
    data: Vec<f64>,
}

impl BandedSymmetric {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        let bandwidth = bandwidth.min(n.saturating_sub(1));
        Self {
            n,
            bandwidth,
            data: vec![0.0; n * (bandwidth + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bandwidth);
        i * (self.bandwidth + 1) + (i - j)
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        if i - j > self.bandwidth {
            0.0
        } else {
            self.data[self.offset(i, j)]
        }
    }

    /// Adds `value` to `(i, j)` (and implicitly `(j, i)`).
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        let o = self.offset(i, j);
        self.data[o] += value;
    }

    pub fn max_diagonal(&self) -> f64 {
        (0..self.n).fold(0.0_f64, |m, i| m.max(self.data[self.offset(i, i)]))
    }

    pub fn add_to_diagonal(&mut self, value: f64) {
        for i in 0..self.n {
            let o = self.offset(i, i);
            self.data[o] += value;
        }
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bandwidth);
            for j in lo..=i {
                let a = self.data[self.offset(i, j)];
                y[i] += a * x[j];
                if j != i {
                    y[j] += a * x[i];
                }
            }
        }
        y
    }

    /// Factorizes `A = L Lᵀ`, or returns `None` if a pivot is not positive.
    pub fn cholesky(mut self) -> Option<BandedCholesky> {
        let bw = self.bandwidth;
        let stride = bw + 1;
        for i in 0..self.n {
            let lo = i.saturating_sub(bw);
            for j in lo..=i {
                let mut sum = self.data[i * stride + (i - j)];
                // p ranges over columns shared by rows i and j inside both bands.
                let p_lo = lo.max(j.saturating_sub(bw));
                for p in p_lo..j {
                    sum -= self.data[i * stride + (i - p)] * self.data[j * stride + (j - p)];
                }
                if j == i {
                    if !(sum > 0.0) || !sum.is_finite() {
                        return None;
                    }
                    self.data[i * stride] = sum.sqrt();
                } else {
                    self.data[i * stride + (i - j)] = sum / self.data[j * stride];
                }
            }
        }
        Some(BandedCholesky { factor: self })
    }
}

/// Lower-triangular banded Cholesky factor.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    factor: BandedSymmetric,
}

impl BandedCholesky {
    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let l = &self.factor;
        let n = l.n;
        let bw = l.bandwidth;
        let stride = bw + 1;
        for i in 0..n {
            let lo = i.saturating_sub(bw);
            let mut sum = b[i];
            for p in lo..i {
                sum -= l.data[i * stride + (i - p)] * b[p];
            }
            b[i] = sum / l.data[i * stride];
        }
        for i in (0..n).rev() {
            let hi = (i + bw).min(n - 1);
            let mut sum = b[i];
            for p in i + 1..=hi {
                sum -= l.data[p * stride + (p - i)] * b[p];
            }
            b[i] = sum / l.data[i * stride];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_tridiagonal_system() {
        // 2 -1 tridiagonal, known solution.
        let n = 6;
        let mut a = BandedSymmetric::zeros(n, 1);
        for i in 0..n {
            a.add(i, i, 2.0);
            if i > 0 {
                a.add(i, i - 1, -1.0);
            }
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
        let mut b = a.mul_vec(&x);
        a.cholesky().unwrap().solve_in_place(&mut b);
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_band_matches_general_solve() {
        let n = 5;
        let mut a = BandedSymmetric::zeros(n, 10);
        assert_eq!(a.bandwidth(), 4);
        // Gram matrix of a random-ish tall matrix plus identity.
        let rows: Vec<Vec<f64>> = (0..8)
            .map(|r| (0..n).map(|c| ((r * 7 + c * 3) % 5) as f64 - 2.0).collect())
            .collect();
        for row in &rows {
            for i in 0..n {
                for j in 0..=i {
                    a.add(i, j, row[i] * row[j]);
                }
            }
        }
        a.add_to_diagonal(1.0);
        let x = vec![1.0, -2.0, 0.5, 3.0, -1.0];
        let mut b = a.mul_vec(&x);
        a.cholesky().unwrap().solve_in_place(&mut b);
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn indefinite_matrix_fails() {
        let mut a = BandedSymmetric::zeros(2, 1);
        a.add(0, 0, 1.0);
        a.add(1, 1, 1.0);
        a.add(1, 0, 2.0);
        assert!(a.cholesky().is_none());
    }
}
