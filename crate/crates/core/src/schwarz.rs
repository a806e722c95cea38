//! One- and two-level additive Schwarz preconditioners
//! `M^{-1} = sum_k R_k^T A_k^{-1} R_k` with exact local and coarse solves.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::assembly::DofMap;
use crate::coarse::{build_coarse_space, CoarseSpace};
use crate::error::{Error, Result};
use crate::geometry::Decomposition;
use crate::linalg::{CsrMatrix, SparseCholesky};
use crate::scalar::Real;

/// Anything usable as `M^{-1}` inside PCG.
pub trait Preconditioner<T: Real>: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, r: &[T]) -> Result<Vec<T>>;
}

/// `M = I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Identity(pub usize);

impl<T: Real> Preconditioner<T> for Identity {
    fn dim(&self) -> usize {
        self.0
    }

    fn apply(&self, r: &[T]) -> Result<Vec<T>> {
        check_len(self.0, r)?;
        Ok(r.to_vec())
    }
}

fn check_len<T>(n: usize, r: &[T]) -> Result<()> {
    if r.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: r.len(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Level {
    None,
    OneLevel,
    #[default]
    TwoLevel,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::None, Level::OneLevel, Level::TwoLevel];

    pub fn name(self) -> &'static str {
        match self {
            Level::None => "none",
            Level::OneLevel => "one-level",
            Level::TwoLevel => "two-level",
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(Level::None),
            "one-level" | "one" | "1" => Ok(Level::OneLevel),
            "two-level" | "two" | "2" => Ok(Level::TwoLevel),
            other => Err(format!("unknown preconditioner '{other}'")),
        }
    }
}

/// Free DOFs anchored strictly inside one subdomain, with `A_k` factorized.
#[derive(Debug, Clone)]
pub struct LocalSpace<T> {
    index: usize,
    dofs: Vec<usize>,
    factor: SparseCholesky<T>,
}

impl<T: Real> LocalSpace<T> {
    pub fn index(&self) -> usize {
        self.index
    }

    /// Sorted global indices.
    pub fn dofs(&self) -> &[usize] {
        &self.dofs
    }

    pub fn len(&self) -> usize {
        self.dofs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dofs.is_empty()
    }

    /// `A_k^{-1} R_k r`, in local numbering.
    pub fn solve_restricted(&self, r: &[T]) -> Vec<T> {
        let mut rk: Vec<T> = self.dofs.iter().map(|&g| r[g]).collect();
        self.factor.solve_in_place(&mut rk);
        rk
    }
}

/// Sorted free DOFs whose anchor lies strictly inside each subdomain box.
pub fn local_dof_sets<T: Real>(
    decomp: &Decomposition<T>,
    dofmap: &DofMap<T>,
) -> Result<Vec<Vec<usize>>> {
    if decomp.fine().cells_per_axis() != dofmap.mesh().cells_per_axis() {
        return Err(Error::Structural(format!(
            "decomposition on {} cells per axis, DOF map on {}",
            decomp.fine().cells_per_axis(),
            dofmap.mesh().cells_per_axis()
        )));
    }
    let r = dofmap.lattice_per_cell();
    decomp
        .subdomains()
        .iter()
        .enumerate()
        .map(|(k, b)| {
            let dofs: Vec<usize> = dofmap
                .free_dofs()
                .iter()
                .enumerate()
                .filter(|(_, d)| b.contains_lattice_strictly(d.lattice.0, d.lattice.1, r))
                .map(|(g, _)| g)
                .collect();
            if dofs.is_empty() {
                Err(Error::EmptySubdomain(k))
            } else {
                Ok(dofs)
            }
        })
        .collect()
}

pub fn build_local_spaces<T: Real>(
    decomp: &Decomposition<T>,
    dofmap: &DofMap<T>,
    a: &CsrMatrix<T>,
) -> Result<Vec<LocalSpace<T>>> {
    let n = dofmap.free_count();
    if a.nrows() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.nrows(),
        });
    }
    let sets = local_dof_sets(decomp, dofmap)?;
    sets.into_par_iter()
        .enumerate()
        .map(|(index, dofs)| {
            let ak = a.principal_submatrix(&dofs);
            let factor = SparseCholesky::new(&ak)?;
            Ok(LocalSpace {
                index,
                dofs,
                factor,
            })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct AdditiveSchwarz<T> {
    level: Level,
    n: usize,
    locals: Vec<LocalSpace<T>>,
    coarse: Option<CoarseSpace<T>>,
    parallel: bool,
}

impl<T: Real> AdditiveSchwarz<T> {
    /// Sets up the preconditioner for `level`. `none` builds nothing.
    pub fn build(
        level: Level,
        decomp: &Decomposition<T>,
        dofmap: &DofMap<T>,
        a: &CsrMatrix<T>,
    ) -> Result<Self> {
        let n = dofmap.free_count();
        if a.nrows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.nrows(),
            });
        }
        let (locals, coarse) = match level {
            Level::None => (Vec::new(), None),
            Level::OneLevel => (build_local_spaces(decomp, dofmap, a)?, None),
            Level::TwoLevel => {
                let m = dofmap.family().order();
                let (locals, coarse) = rayon::join(
                    || build_local_spaces(decomp, dofmap, a),
                    || build_coarse_space(decomp.coarse(), m, dofmap, a),
                );
                (locals?, Some(coarse?))
            }
        };
        Ok(Self {
            level,
            n,
            locals,
            coarse,
            parallel: true,
        })
    }

    /// Assembles a preconditioner from prebuilt parts.
    pub fn from_parts(
        n: usize,
        locals: Vec<LocalSpace<T>>,
        coarse: Option<CoarseSpace<T>>,
    ) -> Result<Self> {
        for l in &locals {
            if l.dofs.last().is_some_and(|&g| g >= n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: l.dofs[l.dofs.len() - 1] + 1,
                });
            }
        }
        if let Some(c) = &coarse {
            if c.prolongation().nrows() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.prolongation().nrows(),
                });
            }
        }
        let level = match (&coarse, locals.is_empty()) {
            (Some(_), _) => Level::TwoLevel,
            (None, false) => Level::OneLevel,
            (None, true) => Level::None,
        };
        Ok(Self {
            level,
            n,
            locals,
            coarse,
            parallel: true,
        })
    }

    /// Chooses between a rayon-parallel and a serial loop over subdomains.
    /// Both give bit-identical results.
    pub fn with_parallel(mut self, parallel: bool) -> Self {
        self.parallel = parallel;
        self
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn local_spaces(&self) -> &[LocalSpace<T>] {
        &self.locals
    }

    pub fn coarse_space(&self) -> Option<&CoarseSpace<T>> {
        self.coarse.as_ref()
    }

    pub fn coarse_dim(&self) -> usize {
        self.coarse.as_ref().map_or(0, CoarseSpace::dim)
    }

    /// Contributions of the subdomains in `subset` (and the coarse term if
    /// requested), summed in the order coarse, then `subset` order.
    pub fn apply_subset(&self, r: &[T], subset: &[usize], include_coarse: bool) -> Result<Vec<T>> {
        check_len(self.n, r)?;
        if let Some(&k) = subset.iter().find(|&&k| k >= self.locals.len()) {
            return Err(Error::Structural(format!("no subdomain {k}")));
        }
        let mut z = match (&self.coarse, include_coarse) {
            (Some(c), true) => c.apply(r)?,
            _ => vec![T::zero(); self.n],
        };
        let solve = |&k: &usize| self.locals[k].solve_restricted(r);
        let parts: Vec<Vec<T>> = if self.parallel {
            subset.par_iter().map(solve).collect()
        } else {
            subset.iter().map(solve).collect()
        };
        for (&k, zk) in subset.iter().zip(parts) {
            for (&g, v) in self.locals[k].dofs.iter().zip(zk) {
                z[g] += v;
            }
        }
        Ok(z)
    }
}

impl<T: Real> Preconditioner<T> for AdditiveSchwarz<T> {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, r: &[T]) -> Result<Vec<T>> {
        if self.level == Level::None {
            check_len(self.n, r)?;
            return Ok(r.to_vec());
        }
        let all: Vec<usize> = (0..self.locals.len()).collect();
        self.apply_subset(r, &all, true)
    }
}

pub fn build_preconditioner<T: Real>(
    level: Level,
    decomp: &Decomposition<T>,
    dofmap: &DofMap<T>,
    a: &CsrMatrix<T>,
) -> Result<AdditiveSchwarz<T>> {
    AdditiveSchwarz::build(level, decomp, dofmap, a)
}
