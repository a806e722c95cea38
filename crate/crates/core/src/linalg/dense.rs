use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::SymTridiagonal;

/// Row-major dense matrix. Used for element kernels and test oracles.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dense matmul dimensions");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> T {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum::<T>())
            .fold(T::zero(), T::max)
    }

    /// Inverse by LU with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let (piv, pval) =
                (col..n)
                    .map(|r| (r, a[(r, col)].abs()))
                    .fold(
                        (col, T::zero()),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pval == T::zero() {
                return Err(Error::Singular(col));
            }
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                    inv.data.swap(piv * n + j, col * n + j);
                }
            }
            let d = a[(col, col)];
            for j in 0..n {
                a[(col, j)] /= d;
                inv[(col, j)] /= d;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f == T::zero() {
                    continue;
                }
                for j in 0..n {
                    let (av, iv) = (a[(col, j)], inv[(col, j)]);
                    a[(r, j)] -= f * av;
                    inv[(r, j)] -= f * iv;
                }
            }
        }
        Ok(inv)
    }

    /// Lower Cholesky factor `L` with `A = L L^T`.
    pub fn cholesky(&self) -> Result<Self> {
        let n = self.rows;
        let mut l = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                if i == j {
                    if s <= T::zero() {
                        return Err(Error::NotSpd {
                            row: i,
                            pivot: s.as_f64(),
                        });
                    }
                    l[(i, i)] = s.sqrt();
                } else {
                    l[(i, j)] = s / l[(j, j)];
                }
            }
        }
        Ok(l)
    }

    /// Householder reduction of a symmetric matrix to tridiagonal form.
    pub fn tridiagonalize(&self) -> SymTridiagonal<T> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut v = vec![T::zero(); n];
        let mut p = vec![T::zero(); n];
        let two = T::lit(2.0);
        for k in 0..n.saturating_sub(2) {
            let m = n - k - 1;
            let norm = (k + 1..n).map(|i| a[(i, k)] * a[(i, k)]).sum::<T>().sqrt();
            if norm == T::zero() {
                continue;
            }
            let x0 = a[(k + 1, k)];
            let alpha = if x0 >= T::zero() { -norm } else { norm };
            for (t, i) in (k + 1..n).enumerate() {
                v[t] = a[(i, k)];
            }
            v[0] -= alpha;
            let vnorm = v[..m].iter().map(|&x| x * x).sum::<T>().sqrt();
            if vnorm == T::zero() {
                continue;
            }
            v[..m].iter_mut().for_each(|x| *x /= vnorm);
            for (t, i) in (k + 1..n).enumerate() {
                let row = &a.data[i * n + k + 1..i * n + n];
                p[t] = row.iter().zip(&v[..m]).map(|(&x, &y)| x * y).sum();
            }
            let vp: T = v[..m].iter().zip(&p[..m]).map(|(&x, &y)| x * y).sum();
            for t in 0..m {
                p[t] -= vp * v[t];
            }
            for (t, i) in (k + 1..n).enumerate() {
                for (s, j) in (k + 1..n).enumerate() {
                    a.data[i * n + j] -= two * (v[t] * p[s] + p[t] * v[s]);
                }
            }
            a[(k + 1, k)] = alpha;
            a[(k, k + 1)] = alpha;
            for i in k + 2..n {
                a[(i, k)] = T::zero();
                a[(k, i)] = T::zero();
            }
        }
        let diag = (0..n).map(|i| a[(i, i)]).collect();
        let off = (0..n.saturating_sub(1)).map(|i| a[(i + 1, i)]).collect();
        SymTridiagonal::new(diag, off)
    }

    /// All eigenvalues of a symmetric matrix in ascending order.
    pub fn symmetric_eigenvalues(&self) -> Vec<T> {
        self.tridiagonalize().eigenvalues()
    }
}

impl<T> Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}
