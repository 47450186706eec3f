//! Small linear-algebra helpers not covered by nalgebra: a banded LU with
//! partial pivoting for finite-difference systems.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
#[error("matrix is singular at pivot {0}")]
pub struct SingularMatrix(pub usize);

/// Square matrix with `lower` sub-diagonals and `upper` super-diagonals.
/// Storage reserves `lower` extra super-diagonals for pivoting fill-in.
#[derive(Clone, Debug)]
pub struct BandMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        let width = 2 * lower + upper + 1;
        Self {
            n,
            lower,
            upper,
            width,
            data: vec![0.0; n * width],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(
            j + self.lower >= i && j <= i + self.upper + self.lower,
            "entry outside band"
        );
        i * self.width + (j + self.lower - i)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.lower < i || j > i + self.upper {
            0.0
        } else {
            self.data[self.slot(i, j)]
        }
    }

    /// Accumulate into entry `(i, j)`; panics outside the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(
            j + self.lower >= i && j <= i + self.upper,
            "entry ({i}, {j}) outside band"
        );
        let s = self.slot(i, j);
        self.data[s] += v;
    }

    /// y = A x
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.lower);
                let hi = (i + self.upper).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Solve `A x = b` in place by Gaussian elimination with row pivoting.
    pub fn solve(mut self, b: &mut [f64]) -> Result<(), SingularMatrix> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let reach = self.upper + self.lower;
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for k in 0..n {
            let last_row = (k + self.lower).min(n - 1);
            let last_col = (k + reach).min(n - 1);
            let mut p = k;
            let mut best = self.data[self.slot(k, k)].abs();
            for r in k + 1..=last_row {
                let v = self.data[self.slot(r, k)].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best <= f64::EPSILON * scale * n as f64 {
                return Err(SingularMatrix(k));
            }
            if p != k {
                for c in k..=last_col {
                    let (a, bb) = (self.slot(k, c), self.slot(p, c));
                    self.data.swap(a, bb);
                }
                b.swap(k, p);
            }
            let pivot = self.data[self.slot(k, k)];
            for r in k + 1..=last_row {
                let f = self.data[self.slot(r, k)] / pivot;
                if f == 0.0 {
                    continue;
                }
                for c in k..=last_col {
                    let kc = self.data[self.slot(k, c)];
                    let s = self.slot(r, c);
                    self.data[s] -= f * kc;
                }
                b[r] -= f * b[k];
            }
        }
        for k in (0..n).rev() {
            let last_col = (k + reach).min(n - 1);
            let mut s = b[k];
            for c in k + 1..=last_col {
                s -= self.data[self.slot(k, c)] * b[c];
            }
            b[k] = s / self.data[self.slot(k, k)];
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_poisson_1d() {
        // -u'' = 2 on (0,1), u(0)=u(1)=0  => u = x(1-x), exact for the 3-point stencil.
        let n = 9;
        let h = 1.0 / (n + 1) as f64;
        let mut a = BandMatrix::zeros(n, 1, 1);
        for i in 0..n {
            a.add(i, i, 2.0);
            if i > 0 {
                a.add(i, i - 1, -1.0);
            }
            if i + 1 < n {
                a.add(i, i + 1, -1.0);
            }
        }
        let mut b = vec![2.0 * h * h; n];
        a.solve(&mut b).unwrap();
        for (i, u) in b.iter().enumerate() {
            let x = (i + 1) as f64 * h;
            assert!((u - x * (1.0 - x)).abs() < 1e-13);
        }
    }

    #[test]
    fn needs_pivoting() {
        // [[0, 1], [1, 1]] x = [1, 2] => x = [1, 1]
        let mut a = BandMatrix::zeros(2, 1, 1);
        a.add(0, 1, 1.0);
        a.add(1, 0, 1.0);
        a.add(1, 1, 1.0);
        let mut b = vec![1.0, 2.0];
        a.solve(&mut b).unwrap();
        assert!((b[0] - 1.0).abs() < 1e-15 && (b[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn singular_is_reported() {
        let mut a = BandMatrix::zeros(2, 1, 1);
        a.add(0, 0, 1.0);
        a.add(0, 1, 1.0);
        a.add(1, 0, 1.0);
        a.add(1, 1, 1.0);
        let mut b = vec![1.0, 1.0];
        assert!(a.solve(&mut b).is_err());
    }
}
