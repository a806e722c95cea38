use crate::scalar::Real;

/// Symmetric tridiagonal matrix with eigenvalues located by Sturm-sequence
/// bisection.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal<T> {
    diag: Vec<T>,
    off: Vec<T>,
}

impl<T: Real> SymTridiagonal<T> {
    pub fn new(diag: Vec<T>, off: Vec<T>) -> Self {
        assert!(off.len() + 1 == diag.len() || (diag.is_empty() && off.is_empty()));
        Self { diag, off }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    pub fn off(&self) -> &[T] {
        &self.off
    }

    /// Leading `k x k` block.
    pub fn leading(&self, k: usize) -> Self {
        let k = k.min(self.dim());
        Self::new(
            self.diag[..k].to_vec(),
            self.off[..k.saturating_sub(1)].to_vec(),
        )
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: T) -> usize {
        let tiny = T::min_positive_value();
        let mut count = 0;
        let mut q = T::one();
        for i in 0..self.diag.len() {
            let b2 = if i == 0 {
                T::zero()
            } else {
                self.off[i - 1] * self.off[i - 1]
            };
            q = self.diag[i] - x - if i == 0 { T::zero() } else { b2 / q };
            if q == T::zero() {
                q = -tiny;
            }
            if q < T::zero() {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (T, T) {
        let n = self.dim();
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..n {
            let r = if i > 0 {
                self.off[i - 1].abs()
            } else {
                T::zero()
            } + if i + 1 < n {
                self.off[i].abs()
            } else {
                T::zero()
            };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (zero-based).
    pub fn eigenvalue(&self, k: usize) -> T {
        assert!(k < self.dim());
        let (mut lo, mut hi) = self.gershgorin();
        let span = (hi - lo).max(lo.abs().max(hi.abs()));
        lo = lo - T::epsilon() * span;
        hi = hi + T::epsilon() * span;
        for _ in 0..400 {
            let mid = lo + (hi - lo) / T::lit(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo + (hi - lo) / T::lit(2.0)
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        (0..self.dim()).map(|k| self.eigenvalue(k)).collect()
    }

    /// `(lambda_min, lambda_max)`.
    pub fn extremes(&self) -> (T, T) {
        (self.eigenvalue(0), self.eigenvalue(self.dim() - 1))
    }
}
