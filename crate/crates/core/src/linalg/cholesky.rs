use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{reverse_cuthill_mckee, CsrMatrix};

/// Below this dimension the factor is stored with a full lower profile and no
/// reordering.
const DENSE_BELOW: usize = 64;

/// Envelope (variable band) Cholesky factorization `P A P^T = L L^T` with a
/// reverse Cuthill-McKee permutation `P`.
#[derive(Debug, Clone)]
pub struct SparseCholesky<T> {
    n: usize,
    /// `perm[new] = old`
    perm: Vec<usize>,
    /// first stored column of each row of `L`
    first: Vec<usize>,
    /// offset of row `i` (column `first[i]`) in `values`
    offset: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> SparseCholesky<T> {
    pub fn new(a: &CsrMatrix<T>) -> Result<Self> {
        Self::with_pivot_floor(a, T::zero())
    }

    /// Factorizes, failing with [`Error::NotSpd`] on any pivot `<= rel_floor * max diag(A)`.
    pub fn with_pivot_floor(a: &CsrMatrix<T>, rel_floor: T) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                found: a.ncols(),
            });
        }
        let n = a.nrows();
        let perm: Vec<usize> = if n < DENSE_BELOW {
            (0..n).collect()
        } else {
            reverse_cuthill_mckee(a)
        };
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }

        let mut first: Vec<usize> = (0..n).collect();
        if n < DENSE_BELOW {
            first.iter_mut().for_each(|f| *f = 0);
        } else {
            for old_r in 0..n {
                let r = inv[old_r];
                for &old_c in a.row_indices(old_r) {
                    let c = inv[old_c];
                    if c < r {
                        first[r] = first[r].min(c);
                    } else if r < c {
                        first[c] = first[c].min(r);
                    }
                }
            }
        }
        let mut offset = Vec::with_capacity(n + 1);
        offset.push(0);
        for i in 0..n {
            offset.push(offset[i] + (i - first[i] + 1));
        }
        let mut values = vec![T::zero(); offset[n]];
        let mut max_diag = T::zero();
        for old_r in 0..n {
            let r = inv[old_r];
            for (&old_c, &v) in a.row_indices(old_r).iter().zip(a.row_values(old_r)) {
                let c = inv[old_c];
                if c <= r {
                    values[offset[r] + c - first[r]] = v;
                }
                if c == r {
                    max_diag = max_diag.max(v);
                }
            }
        }
        let floor = rel_floor * max_diag;

        for i in 0..n {
            let fi = first[i];
            let row_i = offset[i];
            for j in fi..i {
                let fj = first[j];
                let row_j = offset[j];
                let k0 = fi.max(fj);
                let mut s = values[row_i + j - fi];
                for k in k0..j {
                    s -= values[row_i + k - fi] * values[row_j + k - fj];
                }
                values[row_i + j - fi] = s / values[row_j + j - fj];
            }
            let mut d = values[row_i + i - fi];
            for k in fi..i {
                let l = values[row_i + k - fi];
                d -= l * l;
            }
            if !(d > floor) || !d.is_finite() {
                return Err(Error::NotSpd {
                    row: perm[i],
                    pivot: d.as_f64(),
                });
            }
            values[row_i + i - fi] = d.sqrt();
        }

        Ok(Self {
            n,
            perm,
            first,
            offset,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Stored entries of the triangular factor.
    pub fn factor_nnz(&self) -> usize {
        self.values.len()
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }

    pub fn solve_in_place(&self, b: &mut [T]) {
        assert_eq!(b.len(), self.n, "solve: right-hand side length");
        let n = self.n;
        let mut y: Vec<T> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.values[self.offset[i]..self.offset[i + 1]];
            let mut s = y[i];
            for (k, &l) in (fi..i).zip(row) {
                s -= l * y[k];
            }
            y[i] = s / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.values[self.offset[i]..self.offset[i + 1]];
            let xi = y[i] / row[i - fi];
            y[i] = xi;
            for (k, &l) in (fi..i).zip(row) {
                y[k] -= l * xi;
            }
        }
        for (new, &old) in self.perm.iter().enumerate() {
            b[old] = y[new];
        }
    }
}
