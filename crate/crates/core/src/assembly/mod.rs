//! Global DOF numbering with clamped boundary DOFs removed, sparse assembly of
//! the energy form (plus the interior penalty edge terms for `c0ip`), loads,
//! nodal interpolation and evaluation of discrete functions.
//!
//! Derivative DOFs are stored in cell-reference scaling: the DOF for `D^beta`
//! at an anchor holds `(h/2)^|beta| D^beta u`. All cells then share one local
//! stiffness matrix.

mod manufactured;

use rayon::prelude::*;

pub use manufactured::Manufactured;

use crate::elements::gauss_legendre;
use crate::elements::{
    local_load_tabulated, local_stiffness_tabulated, Family, QuadratureRule, ReferenceElement,
};
use crate::error::{Error, Result};
use crate::geometry::CartesianMesh;
use crate::linalg::{CsrMatrix, TripletBuffer};
use crate::scalar::{ipow, Real};

/// Default interior penalty parameter.
pub const DEFAULT_ETA: f64 = 5.0;

/// Gauss points per edge for the interior penalty terms.
pub const EDGE_QUADRATURE_POINTS: usize = 4;

/// A free (unconstrained) DOF: lattice anchor and derivative multi-index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreeDof {
    pub lattice: (usize, usize),
    pub deriv: (usize, usize),
}

/// One DOF slot of the global numbering.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DofEntry<T> {
    pub anchor: [T; 2],
    pub lattice: (usize, usize),
    pub deriv: (usize, usize),
    /// `None` for DOFs removed by the clamped condition.
    pub index: Option<usize>,
}

/// Global numbering over the DOF lattice (vertices, or the `Q2` node grid for
/// `c0ip`). Slots are ordered by anchor row, then column, then derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap<T> {
    family: Family,
    mesh: CartesianMesh<T>,
    lattice: usize,
    derivs: &'static [(usize, usize)],
    slots: Vec<Option<usize>>,
    free: Vec<FreeDof>,
}

impl<T: Real> DofMap<T> {
    pub fn new(mesh: CartesianMesh<T>, family: Family) -> Result<Self> {
        let n = mesh.cells_per_axis();
        if n < 2 {
            return Err(Error::InvalidMesh(format!(
                "need at least 2 cells per axis for interior DOFs, got {n}"
            )));
        }
        let r = family.lattice_per_cell();
        let last = r * n;
        let derivs = family.anchor_derivs();
        let mut slots = Vec::with_capacity((last + 1) * (last + 1) * derivs.len());
        let mut free = Vec::new();
        for q in 0..=last {
            for p in 0..=last {
                let boundary = p == 0 || q == 0 || p == last || q == last;
                for &deriv in derivs {
                    if boundary {
                        slots.push(None);
                    } else {
                        slots.push(Some(free.len()));
                        free.push(FreeDof {
                            lattice: (p, q),
                            deriv,
                        });
                    }
                }
            }
        }
        Ok(Self {
            family,
            mesh,
            lattice: r,
            derivs,
            slots,
            free,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn mesh(&self) -> &CartesianMesh<T> {
        &self.mesh
    }

    /// Lattice points per cell edge.
    pub fn lattice_per_cell(&self) -> usize {
        self.lattice
    }

    /// Lattice points per axis minus one.
    pub fn lattice_extent(&self) -> usize {
        self.lattice * self.mesh.cells_per_axis()
    }

    pub fn free_count(&self) -> usize {
        self.free.len()
    }

    pub fn free_dofs(&self) -> &[FreeDof] {
        &self.free
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Physical position of lattice point `(p, q)`.
    pub fn anchor(&self, (p, q): (usize, usize)) -> [T; 2] {
        let d = T::from_count(self.lattice_extent());
        [T::from_count(p) / d, T::from_count(q) / d]
    }

    /// `(h/2)^(a+b)`: physical derivative to stored DOF value.
    pub fn dof_scale(&self, (a, b): (usize, usize)) -> T {
        ipow(self.mesh.cell_size() / T::lit(2.0), a + b)
    }

    pub fn index(&self, lattice: (usize, usize), deriv: (usize, usize)) -> Option<usize> {
        let d = self.derivs.iter().position(|&x| x == deriv)?;
        let w = self.lattice_extent() + 1;
        self.slots[(lattice.1 * w + lattice.0) * self.derivs.len() + d]
    }

    pub fn entries(&self) -> impl Iterator<Item = DofEntry<T>> + '_ {
        let w = self.lattice_extent() + 1;
        let nd = self.derivs.len();
        self.slots.iter().enumerate().map(move |(s, &index)| {
            let lattice = ((s / nd) % w, s / nd / w);
            DofEntry {
                anchor: self.anchor(lattice),
                lattice,
                deriv: self.derivs[s % nd],
                index,
            }
        })
    }

    /// Global indices of the local DOFs of cell `(cx, cy)`, in the reference
    /// element's order.
    pub fn cell_dofs(
        &self,
        elem: &ReferenceElement<T>,
        cx: usize,
        cy: usize,
    ) -> Vec<Option<usize>> {
        let w = self.lattice_extent() + 1;
        let nd = self.derivs.len();
        elem.dofs()
            .iter()
            .map(|d| {
                let p = self.lattice * cx + d.lattice_offset.0;
                let q = self.lattice * cy + d.lattice_offset.1;
                let k = self
                    .derivs
                    .iter()
                    .position(|&x| x == d.deriv)
                    .expect("derivative in layout");
                self.slots[(q * w + p) * nd + k]
            })
            .collect()
    }

    fn check(&self, elem: &ReferenceElement<T>) -> Result<()> {
        if elem.family() != self.family {
            return Err(Error::Structural(format!(
                "element {} does not match DOF map {}",
                elem.family(),
                self.family
            )));
        }
        Ok(())
    }
}

pub fn build_dofmap<T: Real>(mesh: CartesianMesh<T>, family: Family) -> Result<DofMap<T>> {
    DofMap::new(mesh, family)
}

fn check_mesh<T: Real>(mesh: &CartesianMesh<T>, dofmap: &DofMap<T>) -> Result<()> {
    if mesh.cells_per_axis() != dofmap.mesh.cells_per_axis() {
        return Err(Error::Structural(format!(
            "mesh with {} cells per axis does not match DOF map with {}",
            mesh.cells_per_axis(),
            dofmap.mesh.cells_per_axis()
        )));
    }
    Ok(())
}

/// Energy (volume) part of the operator, summed cell by cell.
pub fn assemble_stiffness<T: Real>(
    mesh: &CartesianMesh<T>,
    elem: &ReferenceElement<T>,
    dofmap: &DofMap<T>,
) -> Result<CsrMatrix<T>> {
    check_mesh(mesh, dofmap)?;
    dofmap.check(elem)?;
    let quad = elem.default_quadrature();
    let tables = elem.tabulate(&quad, elem.order());
    let k = local_stiffness_tabulated(elem, mesh.cell_size(), &quad, &tables)?;
    let n = mesh.cells_per_axis();
    let ns = elem.num_shapes();
    // one triplet list per cell row, concatenated in row order
    let rows: Vec<Vec<(usize, usize, T)>> = (0..n)
        .into_par_iter()
        .map(|cy| {
            let mut out = Vec::with_capacity(n * ns * ns);
            for cx in 0..n {
                let g = dofmap.cell_dofs(elem, cx, cy);
                for (i, gi) in g.iter().enumerate() {
                    let Some(gi) = *gi else { continue };
                    for (j, gj) in g.iter().enumerate() {
                        if let Some(gj) = *gj {
                            out.push((gi, gj, k[(i, j)]));
                        }
                    }
                }
            }
            out
        })
        .collect();
    let nf = dofmap.free_count();
    let mut buf = TripletBuffer::with_capacity(nf, nf, rows.iter().map(Vec::len).sum());
    for row in rows {
        for (i, j, v) in row {
            buf.push(i, j, v);
        }
    }
    buf.compact()
}

/// Which parts of the interior penalty edge form to assemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeTerms {
    All,
    /// Only the two average-times-jump terms.
    Consistency,
    /// Only `(eta/|e|) [du/dn][dv/dn]`.
    Penalty,
}

/// Edge contributions of the C0 interior penalty form.
///
/// Jumps are `(T+ trace) - (T- trace)` with the normal pointing from `T-` to
/// `T+`; on the boundary the jump is `-du/dn` with outward normal and the
/// average is the one-sided second normal derivative.
pub fn assemble_c0ip_edges<T: Real>(
    mesh: &CartesianMesh<T>,
    elem: &ReferenceElement<T>,
    dofmap: &DofMap<T>,
    eta: T,
) -> Result<CsrMatrix<T>> {
    assemble_c0ip_edge_terms(mesh, elem, dofmap, eta, EdgeTerms::All)
}

pub fn assemble_c0ip_edge_terms<T: Real>(
    mesh: &CartesianMesh<T>,
    elem: &ReferenceElement<T>,
    dofmap: &DofMap<T>,
    eta: T,
    terms: EdgeTerms,
) -> Result<CsrMatrix<T>> {
    check_mesh(mesh, dofmap)?;
    dofmap.check(elem)?;
    if elem.family() != Family::C0ip {
        return Err(Error::Structural(format!(
            "edge terms are defined for c0ip only, not {}",
            elem.family()
        )));
    }
    if !(eta > T::zero()) || !eta.is_finite() {
        return Err(Error::InvalidPenalty(eta.as_f64()));
    }
    let n = mesh.cells_per_axis();
    let h = mesh.cell_size();
    let (gx, gw) = gauss_legendre::<T>(EDGE_QUADRATURE_POINTS);
    let two_over_h = T::lit(2.0) / h;
    let d1 = two_over_h;
    let d2 = two_over_h * two_over_h;
    let half = T::lit(0.5);
    let (use_avg, use_pen) = match terms {
        EdgeTerms::All => (true, true),
        EdgeTerms::Consistency => (true, false),
        EdgeTerms::Penalty => (false, true),
    };
    let pen = eta / h;

    // Tables for (normal axis, side, quad point).
    let mut tables = Vec::with_capacity(2 * 2 * gx.len());
    for axis in 0..2 {
        for side in [-T::one(), T::one()] {
            for &t in &gx {
                let pt = if axis == 0 { [side, t] } else { [t, side] };
                tables.push(elem.shape_eval(pt, 2));
            }
        }
    }
    let nq = gx.len();
    let table =
        |axis: usize, side_plus: bool, k: usize| &tables[(axis * 2 + side_plus as usize) * nq + k];
    let nd = |axis: usize, order: usize| if axis == 0 { (order, 0) } else { (0, order) };

    // (cell, side_plus, avg_weight) for each side of an edge
    let mut edges: Vec<(usize, Vec<((usize, usize), bool, T)>)> = Vec::new();
    for axis in 0..2 {
        let cell = |along: usize, across: usize| {
            if axis == 0 {
                (along, across)
            } else {
                (across, along)
            }
        };
        for i in 0..=n {
            for c in 0..n {
                let mut sides = Vec::with_capacity(2);
                if i > 0 {
                    let w = if i < n { half } else { T::one() };
                    sides.push((cell(i - 1, c), true, w));
                }
                if i < n {
                    let w = if i > 0 { half } else { T::one() };
                    sides.push((cell(i, c), false, w));
                }
                edges.push((axis, sides));
            }
        }
    }

    let nf = dofmap.free_count();
    let mut buf = TripletBuffer::new(nf, nf);
    let mut idx: Vec<usize> = Vec::new();
    let mut jump: Vec<T> = Vec::new();
    let mut avg: Vec<T> = Vec::new();
    for (axis, sides) in &edges {
        let axis = *axis;
        idx.clear();
        let mut pos: Vec<Vec<Option<usize>>> = Vec::new();
        for &((cx, cy), _, _) in sides {
            let g = dofmap.cell_dofs(elem, cx, cy);
            pos.push(
                g.iter()
                    .map(|gi| {
                        gi.map(|gi| match idx.iter().position(|&x| x == gi) {
                            Some(p) => p,
                            None => {
                                idx.push(gi);
                                idx.len() - 1
                            }
                        })
                    })
                    .collect(),
            );
        }
        if idx.is_empty() {
            continue;
        }
        for k in 0..nq {
            jump.clear();
            jump.resize(idx.len(), T::zero());
            avg.clear();
            avg.resize(idx.len(), T::zero());
            for (s, &(_, plus, w)) in sides.iter().enumerate() {
                let tab = table(axis, plus, k);
                let (a1, b1) = nd(axis, 1);
                let (a2, b2) = nd(axis, 2);
                // jump coefficient is -(side sign) times the axis derivative
                let sign = if plus { -T::one() } else { T::one() };
                for (j, p) in pos[s].iter().enumerate() {
                    if let Some(p) = *p {
                        jump[p] += sign * d1 * tab.get(a1, b1, j);
                        avg[p] += w * d2 * tab.get(a2, b2, j);
                    }
                }
            }
            let wq = gw[k] * h / T::lit(2.0);
            for i in 0..idx.len() {
                for j in 0..idx.len() {
                    let mut v = T::zero();
                    if use_avg {
                        v += avg[i] * jump[j] + avg[j] * jump[i];
                    }
                    if use_pen {
                        v += pen * jump[i] * jump[j];
                    }
                    if v != T::zero() {
                        buf.push(idx[i], idx[j], wq * v);
                    }
                }
            }
        }
    }
    buf.compact()
}

/// Full discrete operator: the energy form, plus edge terms with penalty
/// `eta` for `c0ip` (ignored for the other families).
pub fn assemble_operator<T: Real>(
    mesh: &CartesianMesh<T>,
    elem: &ReferenceElement<T>,
    dofmap: &DofMap<T>,
    eta: T,
) -> Result<CsrMatrix<T>> {
    let a = assemble_stiffness(mesh, elem, dofmap)?;
    if elem.family() == Family::C0ip {
        let e = assemble_c0ip_edges(mesh, elem, dofmap, eta)?;
        a.add_scaled(T::one(), &e)
    } else {
        Ok(a)
    }
}

/// Load vector `int f v` over the free DOFs.
pub fn assemble_load<T: Real>(
    mesh: &CartesianMesh<T>,
    elem: &ReferenceElement<T>,
    dofmap: &DofMap<T>,
    f: impl Fn([T; 2]) -> T + Sync,
) -> Result<Vec<T>> {
    check_mesh(mesh, dofmap)?;
    dofmap.check(elem)?;
    let quad: QuadratureRule<T> = elem.default_quadrature();
    let tables = elem.tabulate(&quad, 0);
    let n = mesh.cells_per_axis();
    let h = mesh.cell_size();
    let rows: Vec<Vec<(usize, T)>> = (0..n)
        .into_par_iter()
        .map(|cy| {
            let mut out = Vec::new();
            for cx in 0..n {
                let b = local_load_tabulated(elem, mesh.cell_origin(cx, cy), h, &f, &quad, &tables);
                for (gi, v) in dofmap.cell_dofs(elem, cx, cy).into_iter().zip(b) {
                    if let Some(gi) = gi {
                        out.push((gi, v));
                    }
                }
            }
            out
        })
        .collect();
    let mut load = vec![T::zero(); dofmap.free_count()];
    for row in rows {
        for (i, v) in row {
            load[i] += v;
        }
    }
    Ok(load)
}

/// Nodal interpolant over the free DOFs: `g(a, b, x)` must return `D^(a,b) u(x)`.
pub fn interpolate<T: Real>(dofmap: &DofMap<T>, g: impl Fn(usize, usize, [T; 2]) -> T) -> Vec<T> {
    dofmap
        .free_dofs()
        .iter()
        .map(|d| g(d.deriv.0, d.deriv.1, dofmap.anchor(d.lattice)) * dofmap.dof_scale(d.deriv))
        .collect()
}

/// Local coefficients of `u` on cell `(cx, cy)`; eliminated DOFs are zero.
pub fn cell_coefficients<T: Real>(
    dofmap: &DofMap<T>,
    elem: &ReferenceElement<T>,
    u: &[T],
    cx: usize,
    cy: usize,
) -> Vec<T> {
    dofmap
        .cell_dofs(elem, cx, cy)
        .into_iter()
        .map(|g| g.map_or(T::zero(), |g| u[g]))
        .collect()
}

/// `D^(a,b) u_h(x)` evaluated from the cell containing `x`.
pub fn evaluate<T: Real>(
    dofmap: &DofMap<T>,
    elem: &ReferenceElement<T>,
    u: &[T],
    x: [T; 2],
    (a, b): (usize, usize),
) -> T {
    let mesh = dofmap.mesh();
    let (cx, cy) = mesh.locate(x);
    evaluate_in_cell(dofmap, elem, u, (cx, cy), x, (a, b))
}

/// Like [`evaluate`], with the cell given explicitly.
pub fn evaluate_in_cell<T: Real>(
    dofmap: &DofMap<T>,
    elem: &ReferenceElement<T>,
    u: &[T],
    (cx, cy): (usize, usize),
    x: [T; 2],
    (a, b): (usize, usize),
) -> T {
    let mesh = dofmap.mesh();
    let h = mesh.cell_size();
    let o = mesh.cell_origin(cx, cy);
    let two = T::lit(2.0);
    let xi = [
        two * (x[0] - o[0]) / h - T::one(),
        two * (x[1] - o[1]) / h - T::one(),
    ];
    let table = elem.shape_eval(xi, a + b);
    let c = cell_coefficients(dofmap, elem, u, cx, cy);
    let s: T = table
        .deriv(a, b)
        .iter()
        .zip(&c)
        .map(|(&n, &ci)| n * ci)
        .sum();
    s * ipow(two / h, a + b)
}

/// `sqrt(v^T A v)`.
pub fn energy_norm<T: Real>(a: &CsrMatrix<T>, v: &[T]) -> T {
    let av = a.matvec(v);
    v.iter()
        .zip(&av)
        .map(|(&x, &y)| x * y)
        .sum::<T>()
        .max(T::zero())
        .sqrt()
}
