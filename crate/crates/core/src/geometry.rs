//! Uniform cartesian meshes of the unit square and the overlapping subdomain
//! covering obtained by dilating coarse cells with fine-cell layers.

use std::marker::PhantomData;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform grid of `n x n` square cells on `[0,1]^2`.
///
/// Coordinates are always formed as `i / n`, never accumulated, so the same
/// vertex is bit-identical wherever it is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CartesianMesh<T> {
    n: usize,
    _scalar: PhantomData<T>,
}

impl<T: Real> CartesianMesh<T> {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMesh("cells per axis must be positive".into()));
        }
        Ok(Self {
            n,
            _scalar: PhantomData,
        })
    }

    pub fn cells_per_axis(&self) -> usize {
        self.n
    }

    pub fn cell_size(&self) -> T {
        T::one() / T::from_count(self.n)
    }

    pub fn num_cells(&self) -> usize {
        self.n * self.n
    }

    pub fn vertices_per_axis(&self) -> usize {
        self.n + 1
    }

    pub fn num_vertices(&self) -> usize {
        (self.n + 1) * (self.n + 1)
    }

    /// Coordinate `i / n`.
    #[inline]
    pub fn coord(&self, i: usize) -> T {
        T::from_count(i) / T::from_count(self.n)
    }

    pub fn vertex(&self, i: usize, j: usize) -> [T; 2] {
        [self.coord(i), self.coord(j)]
    }

    /// Lower-left corner of cell `(i, j)`.
    pub fn cell_origin(&self, i: usize, j: usize) -> [T; 2] {
        self.vertex(i, j)
    }

    /// Cell containing `x`; points on shared edges go to the upper cell,
    /// except on the top/right boundary.
    pub fn locate(&self, x: [T; 2]) -> (usize, usize) {
        let n = T::from_count(self.n);
        let f = |t: T| -> usize {
            let k = (t * n).floor().to_usize().unwrap_or(0);
            k.min(self.n - 1)
        };
        (f(x[0]), f(x[1]))
    }

    /// Whether this mesh is obtained from `coarse` by uniform refinement.
    pub fn refines(&self, coarse: &CartesianMesh<T>) -> bool {
        self.n % coarse.n == 0
    }
}

pub fn build_mesh<T: Real>(n: usize) -> Result<CartesianMesh<T>> {
    CartesianMesh::new(n)
}

/// Half-open box of fine cells `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellBox {
    pub x0: usize,
    pub x1: usize,
    pub y0: usize,
    pub y1: usize,
}

impl CellBox {
    pub fn contains_cell(&self, i: usize, j: usize) -> bool {
        self.x0 <= i && i < self.x1 && self.y0 <= j && j < self.y1
    }

    /// Whether the lattice point `(p, q)` of a lattice with `r` points per
    /// cell edge lies strictly inside the (closed) box.
    pub fn contains_lattice_strictly(&self, p: usize, q: usize, r: usize) -> bool {
        r * self.x0 < p && p < r * self.x1 && r * self.y0 < q && q < r * self.y1
    }

    pub fn width(&self) -> usize {
        self.x1 - self.x0
    }

    pub fn height(&self) -> usize {
        self.y1 - self.y0
    }
}

/// Overlapping decomposition of the fine mesh into one subdomain per coarse cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<T> {
    coarse: CartesianMesh<T>,
    fine: CartesianMesh<T>,
    overlap_layers: usize,
    subdomains: Vec<CellBox>,
}

impl<T: Real> Decomposition<T> {
    /// Subdomain `k = cy * n_c + cx` is coarse cell `(cx, cy)` dilated by
    /// `overlap_layers` fine cells on each side and clipped to the domain.
    pub fn new(
        coarse: CartesianMesh<T>,
        fine: CartesianMesh<T>,
        overlap_layers: usize,
    ) -> Result<Self> {
        if !fine.refines(&coarse) || fine.n < coarse.n {
            return Err(Error::NonNested {
                coarse: coarse.n,
                fine: fine.n,
            });
        }
        let ratio = fine.n / coarse.n;
        if overlap_layers == 0 || overlap_layers >= ratio {
            return Err(Error::OverlapOutOfRange {
                layers: overlap_layers,
                limit: ratio,
            });
        }
        let nf = fine.n;
        let mut subdomains = Vec::with_capacity(coarse.num_cells());
        for cy in 0..coarse.n {
            for cx in 0..coarse.n {
                subdomains.push(CellBox {
                    x0: (cx * ratio).saturating_sub(overlap_layers),
                    x1: ((cx + 1) * ratio + overlap_layers).min(nf),
                    y0: (cy * ratio).saturating_sub(overlap_layers),
                    y1: ((cy + 1) * ratio + overlap_layers).min(nf),
                });
            }
        }
        Ok(Self {
            coarse,
            fine,
            overlap_layers,
            subdomains,
        })
    }

    /// A decomposition with explicitly given boxes. Boxes must lie in the
    /// fine grid and cover it; the overlap range restriction is not applied.
    pub fn with_boxes(
        coarse: CartesianMesh<T>,
        fine: CartesianMesh<T>,
        overlap_layers: usize,
        subdomains: Vec<CellBox>,
    ) -> Result<Self> {
        if !fine.refines(&coarse) {
            return Err(Error::NonNested {
                coarse: coarse.n,
                fine: fine.n,
            });
        }
        for b in &subdomains {
            if b.x0 >= b.x1 || b.y0 >= b.y1 || b.x1 > fine.n || b.y1 > fine.n {
                return Err(Error::Structural(format!("invalid subdomain box {b:?}")));
            }
        }
        let d = Self {
            coarse,
            fine,
            overlap_layers,
            subdomains,
        };
        if d.membership_counts().contains(&0) {
            return Err(Error::Structural(
                "subdomains do not cover the fine mesh".into(),
            ));
        }
        Ok(d)
    }

    pub fn coarse(&self) -> &CartesianMesh<T> {
        &self.coarse
    }

    pub fn fine(&self) -> &CartesianMesh<T> {
        &self.fine
    }

    pub fn overlap_layers(&self) -> usize {
        self.overlap_layers
    }

    /// Overlap width `delta = layers * h`.
    pub fn delta(&self) -> T {
        T::from_count(self.overlap_layers) / T::from_count(self.fine.n)
    }

    /// Coarse cell size `H`.
    pub fn coarse_size(&self) -> T {
        self.coarse.cell_size()
    }

    pub fn subdomains(&self) -> &[CellBox] {
        &self.subdomains
    }

    pub fn num_subdomains(&self) -> usize {
        self.subdomains.len()
    }

    /// Number of subdomains containing each fine cell (row-major).
    pub fn membership_counts(&self) -> Vec<usize> {
        let nf = self.fine.n;
        let mut counts = vec![0usize; nf * nf];
        for b in &self.subdomains {
            for j in b.y0..b.y1 {
                for i in b.x0..b.x1 {
                    counts[j * nf + i] += 1;
                }
            }
        }
        counts
    }
}

pub fn build_decomposition<T: Real>(
    coarse: CartesianMesh<T>,
    fine: CartesianMesh<T>,
    overlap_layers: usize,
) -> Result<Decomposition<T>> {
    Decomposition::new(coarse, fine, overlap_layers)
}

#[cfg(test)]
mod tests {
    use super::*;

    type Mesh = CartesianMesh<f64>;

    #[test]
    fn mesh_counts_and_coordinates() {
        assert!(Mesh::new(0).is_err());
        let m1 = Mesh::new(1).unwrap();
        assert_eq!(m1.num_cells(), 1);
        assert_eq!(m1.num_vertices(), 4);
        assert_eq!(m1.vertex(1, 1), [1.0, 1.0]);
        let m4 = Mesh::new(4).unwrap();
        assert_eq!(m4.num_cells(), 16);
        assert_eq!(m4.num_vertices(), 25);
        assert_eq!(m4.cell_size(), 0.25);
        let m8 = Mesh::new(8).unwrap();
        assert_eq!(m8.vertex(3, 5), [0.375, 0.625]);
        // reproducible bit-for-bit
        let m7 = Mesh::new(7).unwrap();
        for i in 0..=7 {
            assert_eq!(m7.coord(i).to_bits(), m7.coord(i).to_bits());
            assert_eq!(m7.coord(i).to_bits(), (i as f64 / 7.0).to_bits());
        }
        assert_eq!(m7.coord(7), 1.0);
    }

    #[test]
    fn locate_cells() {
        let m = Mesh::new(4).unwrap();
        assert_eq!(m.locate([0.0, 0.0]), (0, 0));
        assert_eq!(m.locate([1.0, 1.0]), (3, 3));
        assert_eq!(m.locate([0.3, 0.76]), (1, 3));
    }

    #[test]
    fn decomposition_boxes() {
        let c = Mesh::new(2).unwrap();
        let f = Mesh::new(8).unwrap();
        let d = Decomposition::new(c, f, 1).unwrap();
        assert_eq!(d.num_subdomains(), 4);
        assert_eq!(
            d.subdomains()[0],
            CellBox {
                x0: 0,
                x1: 5,
                y0: 0,
                y1: 5
            }
        );
        assert_eq!(
            d.subdomains()[3],
            CellBox {
                x0: 3,
                x1: 8,
                y0: 3,
                y1: 8
            }
        );

        let d2 = Decomposition::new(c, f, 2).unwrap();
        assert_eq!(
            d2.subdomains()[0],
            CellBox {
                x0: 0,
                x1: 6,
                y0: 0,
                y1: 6
            }
        );
        let counts = d2.membership_counts();
        for j in 2..6 {
            for i in 2..6 {
                assert_eq!(counts[j * 8 + i], 4);
            }
        }

        let d3 = Decomposition::new(Mesh::new(4).unwrap(), Mesh::new(64).unwrap(), 4).unwrap();
        assert_eq!(d3.delta(), 1.0 / 16.0);
    }

    #[test]
    fn decomposition_errors() {
        let c = Mesh::new(3).unwrap();
        let f = Mesh::new(8).unwrap();
        assert!(matches!(
            Decomposition::new(c, f, 1),
            Err(Error::NonNested { .. })
        ));
        let c = Mesh::new(2).unwrap();
        assert!(matches!(
            Decomposition::new(c, f, 0),
            Err(Error::OverlapOutOfRange { .. })
        ));
        assert!(matches!(
            Decomposition::new(c, f, 4),
            Err(Error::OverlapOutOfRange { .. })
        ));
    }

    #[test]
    fn covering_and_coloring_bound_exhaustive() {
        for nc in 1..=8usize {
            for ratio in 2..=6usize {
                let nf = nc * ratio;
                for layers in 1..ratio {
                    let d =
                        Decomposition::new(Mesh::new(nc).unwrap(), Mesh::new(nf).unwrap(), layers)
                            .unwrap();
                    let counts = d.membership_counts();
                    assert!(counts.iter().all(|&c| c >= 1));
                    if 2 * layers < ratio {
                        assert!(
                            counts.iter().all(|&c| c <= 4),
                            "nc={nc} ratio={ratio} l={layers}"
                        );
                    }
                    let h = d.coarse_size() + 2.0 * d.delta();
                    for b in d.subdomains() {
                        assert!(b.width() as f64 / nf as f64 <= h + 1e-15);
                    }
                }
            }
        }
    }
}
