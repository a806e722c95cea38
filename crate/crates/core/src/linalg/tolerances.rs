//! Tolerances used across the crate and its tests.

/// Relative residual a direct solve must meet.
pub const SOLVE_RESIDUAL: f64 = 1e-10;
/// Algebraic identities (symmetry, exact reproduction, unisolvence).
pub const IDENTITY: f64 = 1e-12;
/// Upper bound on the 1-norm condition number of a generalized Vandermonde matrix.
pub const VANDERMONDE_COND: f64 = 1e8;
/// Relative pivot floor for the coarse operator factorization.
pub const COARSE_PIVOT: f64 = 1e-12;
/// Eigenvalues below this fraction of the largest count as kernel.
pub const KERNEL_RATIO: f64 = 1e-10;
/// Default PCG stopping tolerance.
pub const PCG_TOL: f64 = 1e-8;
pub const PCG_MAX_ITERS: usize = 2000;
