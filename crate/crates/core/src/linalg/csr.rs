use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{DenseMatrix, TripletBuffer};

/// Rows above which matrix-vector products are split across threads.
/// Each row is still summed serially, so results do not depend on the
/// thread count.
const PAR_ROWS: usize = 8192;

/// Compressed sparse row matrix with sorted column indices per row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    data: Vec<T>,
}

impl<T: Real> CsrMatrix<T> {
    pub(crate) fn from_parts_unchecked(
        nrows: usize,
        ncols: usize,
        indptr: Vec<usize>,
        indices: Vec<usize>,
        data: Vec<T>,
    ) -> Self {
        debug_assert_eq!(indptr.len(), nrows + 1);
        debug_assert_eq!(indices.len(), data.len());
        Self {
            nrows,
            ncols,
            indptr,
            indices,
            data,
        }
    }

    /// Validates raw CSR arrays (monotone offsets, sorted unique in-range columns).
    pub fn from_parts(
        nrows: usize,
        ncols: usize,
        indptr: Vec<usize>,
        indices: Vec<usize>,
        data: Vec<T>,
    ) -> Result<Self> {
        if indptr.len() != nrows + 1 || indptr[0] != 0 || *indptr.last().unwrap() != indices.len() {
            return Err(Error::Structural("inconsistent row offsets".into()));
        }
        if indices.len() != data.len() {
            return Err(Error::DimensionMismatch {
                expected: indices.len(),
                found: data.len(),
            });
        }
        for r in 0..nrows {
            if indptr[r] > indptr[r + 1] {
                return Err(Error::Structural("row offsets not monotone".into()));
            }
            let cols = &indices[indptr[r]..indptr[r + 1]];
            for (k, &c) in cols.iter().enumerate() {
                if c >= ncols {
                    return Err(Error::IndexOutOfRange {
                        row: r,
                        col: c,
                        nrows,
                        ncols,
                    });
                }
                if k > 0 && cols[k - 1] >= c {
                    return Err(Error::Structural(format!("row {r} columns not sorted")));
                }
            }
        }
        Ok(Self::from_parts_unchecked(
            nrows, ncols, indptr, indices, data,
        ))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_parts_unchecked(n, n, (0..=n).collect(), (0..n).collect(), vec![T::one(); n])
    }

    pub fn from_dense(d: &DenseMatrix<T>) -> Self {
        let mut t = TripletBuffer::new(d.rows(), d.cols());
        for i in 0..d.rows() {
            for j in 0..d.cols() {
                if d[(i, j)] != T::zero() {
                    t.push(i, j, d[(i, j)]);
                }
            }
        }
        t.compact().expect("indices in range")
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.data.len()
    }

    pub fn indptr(&self) -> &[usize] {
        &self.indptr
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn row_indices(&self, r: usize) -> &[usize] {
        &self.indices[self.indptr[r]..self.indptr[r + 1]]
    }

    pub fn row_values(&self, r: usize) -> &[T] {
        &self.data[self.indptr[r]..self.indptr[r + 1]]
    }

    /// Entry `(i, j)`, zero when not stored.
    pub fn get(&self, i: usize, j: usize) -> T {
        let cols = self.row_indices(i);
        match cols.binary_search(&j) {
            Ok(k) => self.row_values(i)[k],
            Err(_) => T::zero(),
        }
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.nrows.min(self.ncols))
            .map(|i| self.get(i, i))
            .collect()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    fn row_dot(&self, r: usize, x: &[T]) -> T {
        let mut s = T::zero();
        for k in self.indptr[r]..self.indptr[r + 1] {
            s += self.data[k] * x[self.indices[k]];
        }
        s
    }

    /// `y = A x`
    pub fn matvec_into(&self, x: &[T], y: &mut [T]) {
        assert_eq!(x.len(), self.ncols, "matvec: input length");
        assert_eq!(y.len(), self.nrows, "matvec: output length");
        if self.nrows >= PAR_ROWS {
            y.par_iter_mut()
                .enumerate()
                .for_each(|(r, yr)| *yr = self.row_dot(r, x));
        } else {
            for (r, yr) in y.iter_mut().enumerate() {
                *yr = self.row_dot(r, x);
            }
        }
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    /// `y = A^T x`
    pub fn matvec_transpose(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.nrows);
        let mut y = vec![T::zero(); self.ncols];
        for r in 0..self.nrows {
            let xr = x[r];
            for k in self.indptr[r]..self.indptr[r + 1] {
                y[self.indices[k]] += self.data[k] * xr;
            }
        }
        y
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.indices {
            counts[c + 1] += 1;
        }
        for i in 0..self.ncols {
            counts[i + 1] += counts[i];
        }
        let indptr = counts.clone();
        let mut next = counts;
        let mut indices = vec![0usize; self.nnz()];
        let mut data = vec![T::zero(); self.nnz()];
        for r in 0..self.nrows {
            for k in self.indptr[r]..self.indptr[r + 1] {
                let c = self.indices[k];
                indices[next[c]] = r;
                data[next[c]] = self.data[k];
                next[c] += 1;
            }
        }
        Self::from_parts_unchecked(self.ncols, self.nrows, indptr, indices, data)
    }

    /// Sparse product `self * other` (row-wise Gustavson accumulation).
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                found: other.nrows,
            });
        }
        let n = other.ncols;
        let mut acc = vec![T::zero(); n];
        let mut mark = vec![usize::MAX; n];
        let mut pattern: Vec<usize> = Vec::new();
        let mut indptr = Vec::with_capacity(self.nrows + 1);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        indptr.push(0);
        for r in 0..self.nrows {
            pattern.clear();
            for k in self.indptr[r]..self.indptr[r + 1] {
                let mid = self.indices[k];
                let v = self.data[k];
                for kk in other.indptr[mid]..other.indptr[mid + 1] {
                    let c = other.indices[kk];
                    if mark[c] != r {
                        mark[c] = r;
                        acc[c] = T::zero();
                        pattern.push(c);
                    }
                    acc[c] += v * other.data[kk];
                }
            }
            pattern.sort_unstable();
            for &c in &pattern {
                indices.push(c);
                data.push(acc[c]);
            }
            indptr.push(indices.len());
        }
        Ok(Self::from_parts_unchecked(
            self.nrows, n, indptr, indices, data,
        ))
    }

    /// Entrywise `self + alpha * other` over the union pattern.
    pub fn add_scaled(&self, alpha: T, other: &Self) -> Result<Self> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.nrows,
                found: other.nrows,
            });
        }
        let mut t = TripletBuffer::with_capacity(self.nrows, self.ncols, self.nnz() + other.nnz());
        for r in 0..self.nrows {
            for k in self.indptr[r]..self.indptr[r + 1] {
                t.push(r, self.indices[k], self.data[k]);
            }
            for k in other.indptr[r]..other.indptr[r + 1] {
                t.push(r, other.indices[k], alpha * other.data[k]);
            }
        }
        t.compact()
    }

    /// `A(idx, idx)` for a sorted index list.
    pub fn principal_submatrix(&self, idx: &[usize]) -> Self {
        let mut local = vec![usize::MAX; self.ncols];
        for (l, &g) in idx.iter().enumerate() {
            local[g] = l;
        }
        let mut indptr = Vec::with_capacity(idx.len() + 1);
        let mut indices = Vec::new();
        let mut data = Vec::new();
        indptr.push(0);
        for &g in idx {
            for k in self.indptr[g]..self.indptr[g + 1] {
                let l = local[self.indices[k]];
                if l != usize::MAX {
                    indices.push(l);
                    data.push(self.data[k]);
                }
            }
            // global order is preserved only for sorted idx; keep rows sorted regardless
            let start = *indptr.last().unwrap();
            let mut row: Vec<(usize, T)> = indices[start..]
                .iter()
                .copied()
                .zip(data[start..].iter().copied())
                .collect();
            row.sort_by_key(|e| e.0);
            for (k, (c, v)) in row.into_iter().enumerate() {
                indices[start + k] = c;
                data[start + k] = v;
            }
            indptr.push(indices.len());
        }
        Self::from_parts_unchecked(idx.len(), idx.len(), indptr, indices, data)
    }

    pub fn scaled(&self, alpha: T) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= alpha);
        out
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut d = DenseMatrix::zeros(self.nrows, self.ncols);
        for r in 0..self.nrows {
            for k in self.indptr[r]..self.indptr[r + 1] {
                d[(r, self.indices[k])] += self.data[k];
            }
        }
        d
    }

    /// `max |A_ij - A_ji|` over stored entries (and their mirrors).
    pub fn symmetry_defect(&self) -> T {
        let mut worst = T::zero();
        for r in 0..self.nrows {
            for k in self.indptr[r]..self.indptr[r + 1] {
                let c = self.indices[k];
                worst = worst.max((self.data[k] - self.get(c, r)).abs());
            }
        }
        worst
    }

    pub fn is_symmetric(&self, rel_tol: T) -> bool {
        self.nrows == self.ncols && self.symmetry_defect() <= rel_tol * self.max_abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::triple_product;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_sparse(rng: &mut StdRng, r: usize, c: usize, density: f64) -> CsrMatrix<f64> {
        let mut t = TripletBuffer::new(r, c);
        for i in 0..r {
            for j in 0..c {
                if rng.gen::<f64>() < density {
                    t.push(i, j, rng.gen_range(-1.0..1.0));
                }
            }
        }
        t.compact().unwrap()
    }

    fn random_spd(rng: &mut StdRng, n: usize) -> CsrMatrix<f64> {
        let b = random_sparse(rng, n, n, 0.1);
        let bt = b.transpose();
        let mut a = b.matmul(&bt).unwrap();
        a = a
            .add_scaled(1.0, &CsrMatrix::identity(n).scaled(n as f64 * 0.1))
            .unwrap();
        a
    }

    #[test]
    fn triplets_match_dense_accumulation() {
        let mut rng = StdRng::seed_from_u64(7);
        let n = 50;
        let mut t = TripletBuffer::new(n, n);
        let mut dense = vec![vec![0.0; n]; n];
        for _ in 0..600 {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            let v: f64 = rng.gen_range(-1.0..1.0);
            t.push(i, j, v);
            t.push(j, i, v);
            dense[i][j] += v;
            dense[j][i] += v;
        }
        let a = t.compact().unwrap();
        for i in 0..n {
            for j in 0..n {
                assert!((a.get(i, j) - dense[i][j]).abs() <= 1e-14);
            }
        }
        assert!(a.is_symmetric(1e-15));
    }

    #[test]
    fn triple_product_identity_and_unit_row() {
        let mut rng = StdRng::seed_from_u64(1);
        let a = random_spd(&mut rng, 12);
        let id = CsrMatrix::identity(12);
        assert_eq!(triple_product(&id, &a).unwrap().to_dense(), a.to_dense());

        let mut t = TripletBuffer::new(1, 12);
        t.push(0, 5, 1.0);
        let e5 = t.compact().unwrap();
        let p = triple_product(&e5, &a).unwrap();
        assert_eq!(p.nrows(), 1);
        assert_eq!(p.get(0, 0), a.get(5, 5));
    }

    #[test]
    fn triple_product_matches_dense() {
        let mut rng = StdRng::seed_from_u64(3);
        let r = random_sparse(&mut rng, 10, 50, 0.15);
        let a = random_spd(&mut rng, 50);
        let got = triple_product(&r, &a).unwrap().to_dense();
        let rd = r.to_dense();
        let want = rd.matmul(&a.to_dense()).matmul(&rd.transpose());
        let scale = want.max_abs();
        for i in 0..10 {
            for j in 0..10 {
                assert!((got[(i, j)] - want[(i, j)]).abs() <= 1e-12 * scale);
            }
        }
        assert!(triple_product(&r, &CsrMatrix::identity(49)).is_err());
    }

    #[test]
    fn transpose_and_submatrix() {
        let mut rng = StdRng::seed_from_u64(5);
        let a = random_sparse(&mut rng, 20, 30, 0.2);
        assert_eq!(a.transpose().transpose(), a);
        assert_eq!(a.transpose().to_dense(), a.to_dense().transpose());

        let s = random_spd(&mut rng, 20);
        let idx = [1, 4, 7, 8, 15];
        let sub = s.principal_submatrix(&idx);
        for (li, &gi) in idx.iter().enumerate() {
            for (lj, &gj) in idx.iter().enumerate() {
                assert_eq!(sub.get(li, lj), s.get(gi, gj));
            }
        }
    }

    #[test]
    fn from_parts_validates() {
        assert!(
            CsrMatrix::<f64>::from_parts(2, 2, vec![0, 1, 2], vec![0, 1], vec![1.0, 2.0]).is_ok()
        );
        assert!(
            CsrMatrix::<f64>::from_parts(2, 2, vec![0, 2, 2], vec![1, 0], vec![1.0, 2.0]).is_err()
        );
        assert!(
            CsrMatrix::<f64>::from_parts(2, 2, vec![0, 1, 2], vec![0, 2], vec![1.0, 2.0]).is_err()
        );
    }
}
