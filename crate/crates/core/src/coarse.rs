//! Coarse space spanned by smooth vertex generators times local polynomials,
//! its prolongation into a fine element space by nodal interpolation, and the
//! Galerkin coarse operator.

use rayon::prelude::*;

use crate::assembly::DofMap;
use crate::error::{Error, Result};
use crate::geometry::CartesianMesh;
use crate::linalg::{tolerances, triple_product, CsrMatrix, SparseCholesky, TripletBuffer};
use crate::scalar::{binomial, falling, ipow, Real};

/// Coefficients of the 1-D Hermite value profile on `[0, 1]` in `s = |t|`.
fn profile_coeffs(m: usize) -> &'static [f64] {
    match m {
        2 => &[1.0, 0.0, -3.0, 2.0],
        _ => &[1.0, 0.0, 0.0, -10.0, 15.0, -6.0],
    }
}

/// `psi^(k)(t)` for the degree `2m - 1` profile, zero outside `[-1, 1]`.
pub fn profile<T: Real>(m: usize, k: usize, t: T) -> T {
    let s = t.abs();
    if s > T::one() {
        return T::zero();
    }
    let mut acc = T::zero();
    for (p, &c) in profile_coeffs(m).iter().enumerate().skip(k) {
        if c != 0.0 {
            acc += T::lit(c) * T::from_count(falling(p, k)) * ipow(s, p - k);
        }
    }
    if t < T::zero() && k % 2 == 1 {
        -acc
    } else {
        acc
    }
}

/// `phi_i(x) = psi((x - x_i)/H) psi((y - y_i)/H)`, supported on the 2x2
/// coarse-cell patch around vertex `i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoarseGenerator<T> {
    pub vertex: (usize, usize),
    pub position: [T; 2],
    pub m: usize,
    coarse_size: T,
}

impl<T: Real> CoarseGenerator<T> {
    pub fn coarse_size(&self) -> T {
        self.coarse_size
    }

    /// `D^k` of the 1-D factor along `axis`.
    fn factor(&self, axis: usize, k: usize, t: T) -> T {
        let hinv = T::one() / self.coarse_size;
        profile(self.m, k, (t - self.position[axis]) * hinv) * ipow(hinv, k)
    }

    pub fn derivative(&self, a: usize, b: usize, x: [T; 2]) -> T {
        self.factor(0, a, x[0]) * self.factor(1, b, x[1])
    }

    pub fn value(&self, x: [T; 2]) -> T {
        self.derivative(0, 0, x)
    }
}

fn check_order(m: usize) -> Result<()> {
    if m == 2 || m == 3 {
        Ok(())
    } else {
        Err(Error::Structural(format!(
            "generators exist for m = 2, 3, not {m}"
        )))
    }
}

pub fn build_generator<T: Real>(
    coarse: &CartesianMesh<T>,
    m: usize,
    vertex: (usize, usize),
) -> Result<CoarseGenerator<T>> {
    check_order(m)?;
    let nv = coarse.vertices_per_axis();
    if vertex.0 >= nv || vertex.1 >= nv {
        return Err(Error::Structural(format!(
            "vertex {vertex:?} outside a {nv}x{nv} grid"
        )));
    }
    Ok(CoarseGenerator {
        vertex,
        position: coarse.vertex(vertex.0, vertex.1),
        m,
        coarse_size: coarse.cell_size(),
    })
}

/// Generators of every coarse vertex, boundary included, row-major.
pub fn all_generators<T: Real>(
    coarse: &CartesianMesh<T>,
    m: usize,
) -> Result<Vec<CoarseGenerator<T>>> {
    let nv = coarse.vertices_per_axis();
    (0..nv)
        .flat_map(|j| (0..nv).map(move |i| (i, j)))
        .map(|v| build_generator(coarse, m, v))
        .collect()
}

/// Polynomial factors multiplying the generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MonomialScaling {
    /// `((x - x_i)/H)^a ((y - y_i)/H)^b`.
    #[default]
    Scaled,
    /// `x^a y^b`.
    Unscaled,
}

/// One coarse basis function `phi_i * p_ab`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoarseBasisFunction<T> {
    pub generator: CoarseGenerator<T>,
    pub exponents: (usize, usize),
    pub scaling: MonomialScaling,
}

impl<T: Real> CoarseBasisFunction<T> {
    fn poly(&self, axis: usize, k: usize, t: T) -> T {
        let e = if axis == 0 {
            self.exponents.0
        } else {
            self.exponents.1
        };
        if k > e {
            return T::zero();
        }
        let c = T::from_count(falling(e, k));
        match self.scaling {
            MonomialScaling::Scaled => {
                let hinv = T::one() / self.generator.coarse_size;
                c * ipow((t - self.generator.position[axis]) * hinv, e - k) * ipow(hinv, k)
            }
            MonomialScaling::Unscaled => c * ipow(t, e - k),
        }
    }

    /// `D^k` of the 1-D product `psi * p` along `axis`, by the Leibniz rule.
    fn factor(&self, axis: usize, k: usize, t: T) -> T {
        (0..=k)
            .map(|j| {
                T::from_count(binomial(k, j))
                    * self.generator.factor(axis, j, t)
                    * self.poly(axis, k - j, t)
            })
            .sum()
    }

    pub fn derivative(&self, a: usize, b: usize, x: [T; 2]) -> T {
        self.factor(0, a, x[0]) * self.factor(1, b, x[1])
    }
}

/// Exponents of `P_{m-1}` in the order (0,0), (1,0), (0,1), (2,0), (1,1), (0,2).
pub fn polynomial_exponents(m: usize) -> Vec<(usize, usize)> {
    (0..m)
        .flat_map(|t| (0..=t).map(move |b| (t - b, b)))
        .collect()
}

#[derive(Debug, Clone)]
pub struct CoarseSpace<T> {
    coarse: CartesianMesh<T>,
    m: usize,
    basis: Vec<CoarseBasisFunction<T>>,
    prolongation: CsrMatrix<T>,
    restriction: CsrMatrix<T>,
    operator: CsrMatrix<T>,
    factor: SparseCholesky<T>,
}

impl<T: Real> CoarseSpace<T> {
    pub fn coarse_mesh(&self) -> &CartesianMesh<T> {
        &self.coarse
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[CoarseBasisFunction<T>] {
        &self.basis
    }

    /// `R0^T`: fine free DOFs x coarse dimension.
    pub fn prolongation(&self) -> &CsrMatrix<T> {
        &self.prolongation
    }

    /// `R0`.
    pub fn restriction(&self) -> &CsrMatrix<T> {
        &self.restriction
    }

    /// `A0 = R0 A R0^T`.
    pub fn operator(&self) -> &CsrMatrix<T> {
        &self.operator
    }

    /// `R0 R0^T`.
    pub fn gram(&self) -> Result<CsrMatrix<T>> {
        self.restriction.matmul(&self.prolongation)
    }

    /// `R0^T A0^{-1} R0 r`.
    pub fn apply(&self, r: &[T]) -> Result<Vec<T>> {
        if r.len() != self.prolongation.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.prolongation.nrows(),
                found: r.len(),
            });
        }
        let r0 = self.restriction.matvec(r);
        let z0 = self.factor.solve(&r0);
        Ok(self.prolongation.matvec(&z0))
    }
}

pub fn build_coarse_space<T: Real>(
    coarse: &CartesianMesh<T>,
    m: usize,
    dofmap: &DofMap<T>,
    a: &CsrMatrix<T>,
) -> Result<CoarseSpace<T>> {
    build_coarse_space_with(coarse, m, dofmap, a, MonomialScaling::Scaled)
}

pub fn build_coarse_space_with<T: Real>(
    coarse: &CartesianMesh<T>,
    m: usize,
    dofmap: &DofMap<T>,
    a: &CsrMatrix<T>,
    scaling: MonomialScaling,
) -> Result<CoarseSpace<T>> {
    check_order(m)?;
    let fine = dofmap.mesh();
    if !fine.refines(coarse) || fine.cells_per_axis() < coarse.cells_per_axis() {
        return Err(Error::NonNested {
            coarse: coarse.cells_per_axis(),
            fine: fine.cells_per_axis(),
        });
    }
    let nc = coarse.cells_per_axis();
    if nc < 2 {
        return Err(Error::InvalidMesh(
            "coarse mesh has no interior vertices".into(),
        ));
    }
    let nf = dofmap.free_count();
    if a.nrows() != nf || a.ncols() != nf {
        return Err(Error::DimensionMismatch {
            expected: nf,
            found: a.nrows(),
        });
    }
    let exps = polynomial_exponents(m);
    let mut basis = Vec::with_capacity((nc - 1) * (nc - 1) * exps.len());
    for j in 1..nc {
        for i in 1..nc {
            let g = build_generator(coarse, m, (i, j))?;
            for &e in &exps {
                basis.push(CoarseBasisFunction {
                    generator: g,
                    exponents: e,
                    scaling,
                });
            }
        }
    }

    // Lattice points strictly inside omega_i, in lattice units.
    let span = dofmap.lattice_per_cell() * fine.cells_per_axis() / nc;
    let derivs = dofmap.family().anchor_derivs();
    let columns: Vec<Vec<(usize, T)>> = basis
        .par_iter()
        .map(|bf| {
            let (vi, vj) = bf.generator.vertex;
            let (cx, cy) = (vi * span, vj * span);
            let mut col = Vec::new();
            for q in cy + 1 - span..cy + span {
                for p in cx + 1 - span..cx + span {
                    let y = dofmap.anchor((p, q));
                    for &d in derivs {
                        let Some(g) = dofmap.index((p, q), d) else {
                            continue;
                        };
                        let v = bf.derivative(d.0, d.1, y) * dofmap.dof_scale(d);
                        if v != T::zero() {
                            col.push((g, v));
                        }
                    }
                }
            }
            col
        })
        .collect();
    let mut buf = TripletBuffer::new(nf, basis.len());
    for (c, col) in columns.iter().enumerate() {
        for &(g, v) in col {
            buf.push(g, c, v);
        }
    }
    let prolongation = buf.compact()?;
    let restriction = prolongation.transpose();
    let operator = triple_product(&restriction, a)?;
    let factor = SparseCholesky::with_pivot_floor(&operator, T::lit(tolerances::COARSE_PIVOT))
        .map_err(|e| match e {
            Error::NotSpd { row, pivot } => Error::CoarseRankDeficient { index: row, pivot },
            other => other,
        })?;
    Ok(CoarseSpace {
        coarse: *coarse,
        m,
        basis,
        prolongation,
        restriction,
        operator,
        factor,
    })
}
