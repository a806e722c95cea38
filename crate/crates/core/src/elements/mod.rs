//! Reference elements on `[-1, 1]^2` for the four discretizations, built from
//! DOF functionals and a monomial basis by inverting the generalized
//! Vandermonde matrix, plus the local energy and load kernels.
//!
//! Shape functions are dual to the *reference* functionals: a derivative DOF
//! of order `k` is the reference derivative, i.e. `(h/2)^k` times the physical
//! one. Every cell of a uniform mesh therefore shares the same local stiffness.

mod quadrature;

use std::fmt;
use std::str::FromStr;

pub use quadrature::{gauss_legendre, QuadratureRule};

use crate::error::{Error, Result};
use crate::linalg::{tolerances, DenseMatrix};
use crate::scalar::{falling, ipow, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Bogner-Fox-Schmit, conforming `Q3` Hermite.
    Bfs,
    /// Adini, nonconforming incomplete cubic.
    Adini,
    /// `Q2` Lagrange used with the C0 interior penalty form.
    C0ip,
    /// Jin-Wu sixth-order nonconforming element.
    JinWu,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::Bfs, Family::Adini, Family::C0ip, Family::JinWu];

    /// Order `m` of the energy `|u|_{H^m}`.
    pub fn order(self) -> usize {
        match self {
            Family::JinWu => 3,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Bfs => "bfs",
            Family::Adini => "adini",
            Family::C0ip => "c0ip",
            Family::JinWu => "jinwu",
        }
    }

    /// Gauss points per axis for the volume integrals.
    pub fn volume_quadrature_points(self) -> usize {
        match self {
            Family::JinWu => 8,
            _ => 6,
        }
    }

    /// DOF anchors per cell edge: vertices only, or the 3x3 `Q2` nodes.
    pub fn lattice_per_cell(self) -> usize {
        match self {
            Family::C0ip => 2,
            _ => 1,
        }
    }

    /// Derivative multi-indices carried at each anchor.
    pub fn anchor_derivs(self) -> &'static [(usize, usize)] {
        match self {
            Family::Bfs => &[(0, 0), (1, 0), (0, 1), (1, 1)],
            Family::Adini => &[(0, 0), (1, 0), (0, 1)],
            Family::C0ip => &[(0, 0)],
            Family::JinWu => &[(0, 0), (1, 0), (0, 1), (2, 0), (0, 2)],
        }
    }

    /// Exponents `(p, q)` of the monomials `x^p y^q` spanning the local space.
    pub fn monomials(self) -> Vec<(usize, usize)> {
        match self {
            Family::Bfs => tensor(3),
            Family::C0ip => tensor(2),
            Family::Adini => {
                let mut v: Vec<_> = (0..=3usize)
                    .flat_map(|t| (0..=t).map(move |q| (t - q, q)))
                    .collect();
                v.extend([(3, 1), (1, 3)]);
                v
            }
            Family::JinWu => {
                let q1 = [(0, 0), (1, 0), (0, 1), (1, 1)];
                let factors = [(0, 0), (2, 0), (0, 2), (4, 0), (0, 4)];
                factors
                    .iter()
                    .flat_map(|&(fa, fb)| q1.iter().map(move |&(a, b)| (a + fa, b + fb)))
                    .collect()
            }
        }
    }
}

fn tensor(k: usize) -> Vec<(usize, usize)> {
    (0..=k).flat_map(|q| (0..=k).map(move |p| (p, q))).collect()
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bfs" => Ok(Family::Bfs),
            "adini" => Ok(Family::Adini),
            "c0ip" => Ok(Family::C0ip),
            "jinwu" | "jin-wu" => Ok(Family::JinWu),
            other => Err(format!("unknown element family '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnchorClass {
    Vertex,
    EdgeMidpoint,
    CellCenter,
}

/// `D^(a,b)` evaluated at an anchor of the reference square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DofFunctional<T> {
    pub anchor: [T; 2],
    pub deriv: (usize, usize),
    pub anchor_class: AnchorClass,
    /// Anchor position on the cell's DOF lattice, `0..=lattice_per_cell` per axis.
    pub lattice_offset: (usize, usize),
}

impl<T: Real> DofFunctional<T> {
    /// Applies the functional to the monomial `x^p y^q`.
    pub fn apply_monomial(&self, (p, q): (usize, usize)) -> T {
        let (a, b) = self.deriv;
        let ca = falling(p, a);
        let cb = falling(q, b);
        if ca == 0 || cb == 0 {
            return T::zero();
        }
        T::from_count(ca * cb) * ipow(self.anchor[0], p - a) * ipow(self.anchor[1], q - b)
    }
}

fn dof_layout<T: Real>(family: Family) -> Vec<DofFunctional<T>> {
    let r = family.lattice_per_cell();
    let mut dofs = Vec::new();
    for oy in 0..=r {
        for ox in 0..=r {
            let class = match (ox % r == 0, oy % r == 0) {
                (true, true) => AnchorClass::Vertex,
                (false, false) => AnchorClass::CellCenter,
                _ => AnchorClass::EdgeMidpoint,
            };
            let to_ref = |o: usize| T::lit(2.0 * o as f64 / r as f64 - 1.0);
            for &deriv in family.anchor_derivs() {
                dofs.push(DofFunctional {
                    anchor: [to_ref(ox), to_ref(oy)],
                    deriv,
                    anchor_class: class,
                    lattice_offset: (ox, oy),
                });
            }
        }
    }
    dofs
}

/// Position of `(a, b)` in a [`ShapeTable`]: grouped by total order, then by `b`.
#[inline]
pub fn deriv_index(a: usize, b: usize) -> usize {
    let t = a + b;
    t * (t + 1) / 2 + b
}

/// `D^(a,b) N_j` at one point for all `a + b <= max_deriv`, in reference coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeTable<T> {
    max_deriv: usize,
    num_shapes: usize,
    values: Vec<T>,
}

impl<T: Real> ShapeTable<T> {
    pub fn max_deriv(&self) -> usize {
        self.max_deriv
    }

    pub fn get(&self, a: usize, b: usize, j: usize) -> T {
        assert!(a + b <= self.max_deriv, "derivative order not tabulated");
        self.values[deriv_index(a, b) * self.num_shapes + j]
    }

    /// All shape functions for derivative `(a, b)`.
    pub fn deriv(&self, a: usize, b: usize) -> &[T] {
        assert!(a + b <= self.max_deriv, "derivative order not tabulated");
        let k = deriv_index(a, b);
        &self.values[k * self.num_shapes..(k + 1) * self.num_shapes]
    }
}

#[derive(Debug, Clone)]
pub struct ReferenceElement<T> {
    family: Family,
    monomials: Vec<(usize, usize)>,
    vandermonde: DenseMatrix<T>,
    /// `coeffs[(k, j)]`: coefficient of monomial `k` in shape function `j`.
    coeffs: DenseMatrix<T>,
    dofs: Vec<DofFunctional<T>>,
    vandermonde_cond: T,
}

impl<T: Real> ReferenceElement<T> {
    pub fn new(family: Family) -> Result<Self> {
        let monomials = family.monomials();
        let dofs = dof_layout::<T>(family);
        if monomials.len() != dofs.len() {
            return Err(Error::Structural(format!(
                "{family}: {} monomials but {} functionals",
                monomials.len(),
                dofs.len()
            )));
        }
        let vandermonde = DenseMatrix::from_fn(dofs.len(), monomials.len(), |i, j| {
            dofs[i].apply_monomial(monomials[j])
        });
        let coeffs = vandermonde
            .inverse()
            .map_err(|_| Error::IllConditionedElement {
                family: family.name(),
                cond: f64::INFINITY,
            })?;
        let cond = vandermonde.norm1() * coeffs.norm1();
        if !(cond.as_f64() <= tolerances::VANDERMONDE_COND) {
            return Err(Error::IllConditionedElement {
                family: family.name(),
                cond: cond.as_f64(),
            });
        }
        Ok(Self {
            family,
            monomials,
            vandermonde,
            coeffs,
            dofs,
            vandermonde_cond: cond,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn order(&self) -> usize {
        self.family.order()
    }

    pub fn num_shapes(&self) -> usize {
        self.dofs.len()
    }

    pub fn monomials(&self) -> &[(usize, usize)] {
        &self.monomials
    }

    pub fn dofs(&self) -> &[DofFunctional<T>] {
        &self.dofs
    }

    /// `V[(i, j)]`: functional `i` applied to monomial `j`.
    pub fn vandermonde(&self) -> &DenseMatrix<T> {
        &self.vandermonde
    }

    pub fn coeffs(&self) -> &DenseMatrix<T> {
        &self.coeffs
    }

    pub fn vandermonde_cond(&self) -> T {
        self.vandermonde_cond
    }

    /// Exact derivatives of every shape function at `point`.
    pub fn shape_eval(&self, point: [T; 2], max_deriv: usize) -> ShapeTable<T> {
        let nd = deriv_index(0, max_deriv) + 1;
        let ns = self.num_shapes();
        let mut values = vec![T::zero(); nd * ns];
        for t in 0..=max_deriv {
            for b in 0..=t {
                let a = t - b;
                let row = &mut values[deriv_index(a, b) * ns..(deriv_index(a, b) + 1) * ns];
                for (k, &(p, q)) in self.monomials.iter().enumerate() {
                    let ca = falling(p, a);
                    let cb = falling(q, b);
                    if ca == 0 || cb == 0 {
                        continue;
                    }
                    let mono =
                        T::from_count(ca * cb) * ipow(point[0], p - a) * ipow(point[1], q - b);
                    for (j, r) in row.iter_mut().enumerate() {
                        *r += mono * self.coeffs[(k, j)];
                    }
                }
            }
        }
        ShapeTable {
            max_deriv,
            num_shapes: ns,
            values,
        }
    }

    pub fn tabulate(&self, quad: &QuadratureRule<T>, max_deriv: usize) -> Vec<ShapeTable<T>> {
        quad.points
            .iter()
            .map(|&p| self.shape_eval(p, max_deriv))
            .collect()
    }

    /// Reference DOF values of a function given through its reference
    /// derivatives `g(a, b, point)`.
    pub fn interpolate(&self, g: impl Fn(usize, usize, [T; 2]) -> T) -> Vec<T> {
        self.dofs
            .iter()
            .map(|d| g(d.deriv.0, d.deriv.1, d.anchor))
            .collect()
    }

    /// The quadrature rule the crate uses for this family's volume terms.
    pub fn default_quadrature(&self) -> QuadratureRule<T> {
        QuadratureRule::gauss_tensor(self.family.volume_quadrature_points())
    }
}

pub fn build_element<T: Real>(family: Family) -> Result<ReferenceElement<T>> {
    ReferenceElement::new(family)
}

/// Multinomial weights `m! / (a! b!)` of the contraction `grad^m u : grad^m v`,
/// indexed by `a` with `b = m - a`.
pub fn multinomial_weights(m: usize) -> Vec<usize> {
    (0..=m).map(|a| falling(m, a) / falling(a, a)).collect()
}

/// Local energy matrix `sum_{|alpha|=m} (m!/alpha!) int_T D^alpha N_i D^alpha N_j`
/// on a physical square cell of side `h`, in the reference-DOF basis.
pub fn local_stiffness<T: Real>(
    elem: &ReferenceElement<T>,
    h: T,
    quad: &QuadratureRule<T>,
) -> Result<DenseMatrix<T>> {
    let tables = elem.tabulate(quad, elem.order());
    local_stiffness_tabulated(elem, h, quad, &tables)
}

pub(crate) fn local_stiffness_tabulated<T: Real>(
    elem: &ReferenceElement<T>,
    h: T,
    quad: &QuadratureRule<T>,
    tables: &[ShapeTable<T>],
) -> Result<DenseMatrix<T>> {
    let m = elem.order();
    let n = elem.num_shapes();
    let weights = multinomial_weights(m);
    let two_over_h = T::lit(2.0) / h;
    let half_h = h / T::lit(2.0);
    // (2/h)^{2m} from the derivatives, (h/2)^2 from the volume element
    let scale = ipow(two_over_h, 2 * m) * half_h * half_h;
    let mut k = DenseMatrix::<T>::zeros(n, n);
    for (table, &w) in tables.iter().zip(&quad.weights) {
        for (a, &c) in weights.iter().enumerate() {
            let d = table.deriv(a, m - a);
            let f = w * T::from_count(c) * scale;
            for i in 0..n {
                let fi = f * d[i];
                if fi == T::zero() {
                    continue;
                }
                for j in 0..n {
                    k[(i, j)] += fi * d[j];
                }
            }
        }
    }
    let defect = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .fold(T::zero(), |acc: T, (i, j)| {
            acc.max((k[(i, j)] - k[(j, i)]).abs())
        });
    let rel = T::lit(tolerances::IDENTITY).max(T::epsilon() * T::lit(64.0));
    if defect > rel * k.max_abs() {
        return Err(Error::Structural(format!(
            "{}: local stiffness not symmetric (defect {defect:e})",
            elem.family()
        )));
    }
    Ok(k)
}

/// Local load `b_i = int_T f N_i dx` on the cell `[x0, x0+h] x [y0, y0+h]`.
pub fn local_load<T: Real>(
    elem: &ReferenceElement<T>,
    origin: [T; 2],
    h: T,
    f: impl Fn([T; 2]) -> T,
    quad: &QuadratureRule<T>,
) -> Vec<T> {
    let tables = elem.tabulate(quad, 0);
    local_load_tabulated(elem, origin, h, &f, quad, &tables)
}

pub(crate) fn local_load_tabulated<T: Real>(
    elem: &ReferenceElement<T>,
    origin: [T; 2],
    h: T,
    f: &impl Fn([T; 2]) -> T,
    quad: &QuadratureRule<T>,
    tables: &[ShapeTable<T>],
) -> Vec<T> {
    let half_h = h / T::lit(2.0);
    let jac = half_h * half_h;
    let mut b = vec![T::zero(); elem.num_shapes()];
    for ((p, &w), table) in quad.points.iter().zip(&quad.weights).zip(tables) {
        let x = [
            origin[0] + (p[0] + T::one()) * half_h,
            origin[1] + (p[1] + T::one()) * half_h,
        ];
        let fw = f(x) * w * jac;
        if fw == T::zero() {
            continue;
        }
        for (bi, &n) in b.iter_mut().zip(table.deriv(0, 0)) {
            *bi += fw * n;
        }
    }
    b
}
