//! Preconditioned conjugate gradients with true-residual history and a
//! Lanczos estimate of the condition number of `M^{-1} A`.

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm2, CsrMatrix, SymTridiagonal};
use crate::scalar::Real;
use crate::schwarz::Preconditioner;

#[derive(Debug, Clone, PartialEq)]
pub struct PcgReport<T> {
    pub iterations: usize,
    /// `||A u_n - f|| / ||A u_0 - f||` for `n = 0..=iterations`.
    pub relative_residuals: Vec<T>,
    /// Condition estimate `lambda_max / lambda_min` of the Lanczos matrix.
    pub kappa_estimate: T,
    pub converged: bool,
    /// Stopped early because the recursive residual fell below machine
    /// precision while the true residual stayed above `tol`.
    pub stagnated: bool,
    pub solution: Vec<T>,
    /// `z^T r` at every step, all positive on success.
    pub rz: Vec<T>,
    alphas: Vec<T>,
    betas: Vec<T>,
}

impl<T: Real> PcgReport<T> {
    fn trivial(n: usize) -> Self {
        Self {
            iterations: 0,
            relative_residuals: vec![T::one()],
            kappa_estimate: T::one(),
            converged: true,
            stagnated: false,
            solution: vec![T::zero(); n],
            rz: Vec::new(),
            alphas: Vec::new(),
            betas: Vec::new(),
        }
    }

    /// Lanczos tridiagonal after `k` iterations, `1 <= k <= iterations`.
    pub fn lanczos_matrix(&self, k: usize) -> SymTridiagonal<T> {
        lanczos(&self.alphas[..k], &self.betas[..k.saturating_sub(1)])
    }

    /// Condition estimate from the first `k` iterations.
    pub fn kappa_at(&self, k: usize) -> T {
        if k == 0 {
            return T::one();
        }
        kappa(&self.lanczos_matrix(k))
    }

    pub fn final_relative_residual(&self) -> T {
        *self.relative_residuals.last().expect("history starts at 1")
    }
}

/// `betas[k]` is the coefficient forming `p_{k+1}`.
fn lanczos<T: Real>(alphas: &[T], betas: &[T]) -> SymTridiagonal<T> {
    let n = alphas.len();
    let mut d = Vec::with_capacity(n);
    let mut e = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n {
        let mut v = T::one() / alphas[k];
        if k > 0 {
            v += betas[k - 1] / alphas[k - 1];
            e.push(betas[k - 1].sqrt() / alphas[k - 1]);
        }
        d.push(v);
    }
    SymTridiagonal::new(d, e)
}

fn kappa<T: Real>(t: &SymTridiagonal<T>) -> T {
    if t.dim() == 0 {
        return T::one();
    }
    let (lo, hi) = t.extremes();
    if !(lo > T::zero()) {
        return T::infinity();
    }
    (hi / lo).max(T::one())
}

fn check_system<T: Real>(a: &CsrMatrix<T>, f: &[T]) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    if f.len() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: f.len(),
        });
    }
    Ok(())
}

pub fn pcg<T: Real>(
    a: &CsrMatrix<T>,
    m: &dyn Preconditioner<T>,
    f: &[T],
    tol: T,
    max_iters: usize,
) -> Result<PcgReport<T>> {
    pcg_observed(a, m, f, tol, max_iters, |_, _| {})
}

/// [`pcg`], calling `observer(n, u_n)` after each update.
pub fn pcg_observed<T: Real>(
    a: &CsrMatrix<T>,
    m: &dyn Preconditioner<T>,
    f: &[T],
    tol: T,
    max_iters: usize,
    mut observer: impl FnMut(usize, &[T]),
) -> Result<PcgReport<T>> {
    check_system(a, f)?;
    let n = f.len();
    if m.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.dim(),
        });
    }
    let f_norm = norm2(f);
    if f_norm == T::zero() {
        return Ok(PcgReport::trivial(n));
    }
    let mut x = vec![T::zero(); n];
    let mut r = f.to_vec();
    let mut p = vec![T::zero(); n];
    let mut q = vec![T::zero(); n];
    let mut ax = vec![T::zero(); n];
    let mut report = PcgReport::trivial(n);
    report.converged = false;
    let mut rz_old = T::zero();
    for k in 0..max_iters {
        let z = m.apply(&r)?;
        let rz = dot(&z, &r);
        if !(rz > T::zero()) {
            return Err(Error::PreconditionerNotSpd {
                iteration: k,
                value: rz.as_f64(),
            });
        }
        report.rz.push(rz);
        if k == 0 {
            p.copy_from_slice(&z);
        } else {
            let beta = rz / rz_old;
            report.betas.push(beta);
            for (pi, &zi) in p.iter_mut().zip(&z) {
                *pi = zi + beta * *pi;
            }
        }
        a.matvec_into(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > T::zero()) {
            return Err(Error::MatrixNotSpd {
                iteration: k,
                value: pq.as_f64(),
            });
        }
        let alpha = rz / pq;
        report.alphas.push(alpha);
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &q, &mut r);
        rz_old = rz;

        a.matvec_into(&x, &mut ax);
        let true_res = ax
            .iter()
            .zip(f)
            .map(|(&u, &v)| (v - u) * (v - u))
            .sum::<T>()
            .sqrt();
        let rel = true_res / f_norm;
        report.relative_residuals.push(rel);
        report.iterations = k + 1;
        observer(k + 1, &x);
        if rel <= tol {
            report.converged = true;
            break;
        }
        if norm2(&r) <= T::epsilon() * f_norm {
            report.stagnated = true;
            break;
        }
    }
    report.kappa_estimate = report.kappa_at(report.iterations);
    report.solution = x;
    Ok(report)
}

/// Unpreconditioned textbook CG with the same stopping rule as [`pcg`].
pub fn cg<T: Real>(a: &CsrMatrix<T>, f: &[T], tol: T, max_iters: usize) -> Result<PcgReport<T>> {
    check_system(a, f)?;
    let n = f.len();
    let f_norm = norm2(f);
    if f_norm == T::zero() {
        return Ok(PcgReport::trivial(n));
    }
    let mut x = vec![T::zero(); n];
    let mut r = f.to_vec();
    let mut p = r.clone();
    let mut q = vec![T::zero(); n];
    let mut ax = vec![T::zero(); n];
    let mut rr = dot(&r, &r);
    let mut report = PcgReport::trivial(n);
    report.converged = false;
    for k in 0..max_iters {
        report.rz.push(rr);
        a.matvec_into(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > T::zero()) {
            return Err(Error::MatrixNotSpd {
                iteration: k,
                value: pq.as_f64(),
            });
        }
        let alpha = rr / pq;
        report.alphas.push(alpha);
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &q, &mut r);
        a.matvec_into(&x, &mut ax);
        let true_res = ax
            .iter()
            .zip(f)
            .map(|(&u, &v)| (v - u) * (v - u))
            .sum::<T>()
            .sqrt();
        let rel = true_res / f_norm;
        report.relative_residuals.push(rel);
        report.iterations = k + 1;
        if rel <= tol {
            report.converged = true;
            break;
        }
        if norm2(&r) <= T::epsilon() * f_norm {
            report.stagnated = true;
            break;
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        report.betas.push(beta);
        for (pi, &ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
        rr = rr_new;
    }
    report.kappa_estimate = report.kappa_at(report.iterations);
    report.solution = x;
    Ok(report)
}
