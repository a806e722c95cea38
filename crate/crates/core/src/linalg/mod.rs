//! Sparse and dense linear algebra kernels: triplet compaction into CSR,
//! sparse products, an envelope Cholesky with reverse Cuthill-McKee ordering,
//! symmetric tridiagonal eigenvalue bisection, dense utilities used by the
//! oracles, and Matrix Market exchange.

mod cholesky;
mod csr;
mod dense;
pub mod market;
mod ordering;
pub mod tolerances;
mod tridiag;
mod triplet;

pub use cholesky::SparseCholesky;
pub use csr::CsrMatrix;
pub use dense::DenseMatrix;
pub use ordering::reverse_cuthill_mckee;
pub use tridiag::SymTridiagonal;
pub use triplet::TripletBuffer;

use crate::scalar::Real;

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm2<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// `y += alpha * x`
pub fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Forms `R A R^T`.
pub fn triple_product<T: Real>(r: &CsrMatrix<T>, a: &CsrMatrix<T>) -> crate::Result<CsrMatrix<T>> {
    let ra = r.matmul(a)?;
    ra.matmul(&r.transpose())
}

/// Factorizes a symmetric positive definite matrix.
pub fn factorize_spd<T: Real>(a: &CsrMatrix<T>) -> crate::Result<SparseCholesky<T>> {
    SparseCholesky::new(a)
}
