#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use polyschwarz::assembly::{assemble_load, assemble_operator, DofMap, Manufactured, DEFAULT_ETA};
use polyschwarz::elements::{build_element, Family, ReferenceElement};
use polyschwarz::geometry::{CartesianMesh, Decomposition};
use polyschwarz::schwarz::Preconditioner;
use polyschwarz::CsrMatrix64;

pub struct Problem {
    pub mesh: CartesianMesh<f64>,
    pub elem: ReferenceElement<f64>,
    pub dofmap: DofMap<f64>,
    pub a: CsrMatrix64,
    pub f: Vec<f64>,
}

pub fn problem(family: Family, n: usize) -> Problem {
    let mesh = CartesianMesh::new(n).unwrap();
    let elem = build_element(family).unwrap();
    let dofmap = DofMap::new(mesh, family).unwrap();
    let a = assemble_operator(&mesh, &elem, &dofmap, DEFAULT_ETA).unwrap();
    let ms = Manufactured::for_order(family.order()).unwrap();
    let f = assemble_load(&mesh, &elem, &dofmap, |x| ms.rhs(x)).unwrap();
    Problem {
        mesh,
        elem,
        dofmap,
        a,
        f,
    }
}

pub fn decomposition(n_coarse: usize, n_fine: usize, layers: usize) -> Decomposition<f64> {
    Decomposition::new(
        CartesianMesh::new(n_coarse).unwrap(),
        CartesianMesh::new(n_fine).unwrap(),
        layers,
    )
    .unwrap()
}

pub fn to_nalgebra(a: &CsrMatrix64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(a.nrows(), a.ncols());
    for i in 0..a.nrows() {
        for (&j, &v) in a.row_indices(i).iter().zip(a.row_values(i)) {
            m[(i, j)] = v;
        }
    }
    m
}

/// Eigenvalues of `M^{-1} A` from the similar matrix `L^T M^{-1} L`, `A = L L^T`,
/// with `M^{-1}` formed column by column.
pub fn dense_preconditioned_spectrum(a: &CsrMatrix64, m: &dyn Preconditioner<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut minv = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = m.apply(&e).unwrap();
        e[j] = 0.0;
        for i in 0..n {
            minv[(i, j)] = col[i];
        }
    }
    let minv = (&minv + minv.transpose()) * 0.5;
    let l = to_nalgebra(a).cholesky().expect("A is SPD").l();
    let b = l.transpose() * minv * &l;
    let b = (&b + b.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(b).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

pub fn dense_kappa(a: &CsrMatrix64) -> f64 {
    let ev = SymmetricEigen::new(to_nalgebra(a)).eigenvalues;
    ev.max() / ev.min()
}

pub fn relative_diff(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let s: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
    d / s
}
