//! Two-level overlapping additive Schwarz preconditioners for `2m`-th order
//! elliptic problems on uniform rectangular grids of the unit square.
//!
//! The crate covers the full pipeline: meshes and overlapping decompositions
//! ([`geometry`]), four reference elements ([`elements`]), global assembly
//! ([`assembly`]), the coarse space built from smooth vertex generators
//! ([`coarse`]), the additive Schwarz operator ([`schwarz`]) and PCG with a
//! Lanczos condition estimate ([`krylov`]).
//!
//! All numerical code is generic over [`Real`]; the `*64` aliases below fix
//! the scalar to `f64`.

pub mod assembly;
pub mod coarse;
pub mod elements;
pub mod error;
pub mod geometry;
pub mod krylov;
pub mod linalg;
pub mod scalar;
pub mod schwarz;

pub use error::{Error, Result};
pub use scalar::Real;

pub use assembly::{DofMap, Manufactured};
pub use coarse::{CoarseSpace, MonomialScaling};
pub use elements::{Family, ReferenceElement};
pub use geometry::{CartesianMesh, CellBox, Decomposition};
pub use krylov::{cg, pcg, PcgReport};
pub use schwarz::{AdditiveSchwarz, Level, Preconditioner};

pub type CsrMatrix64 = linalg::CsrMatrix<f64>;
pub type DenseMatrix64 = linalg::DenseMatrix<f64>;
pub type SparseCholesky64 = linalg::SparseCholesky<f64>;
pub type CartesianMesh64 = geometry::CartesianMesh<f64>;
pub type Decomposition64 = geometry::Decomposition<f64>;
pub type ReferenceElement64 = elements::ReferenceElement<f64>;
pub type DofMap64 = assembly::DofMap<f64>;
pub type CoarseSpace64 = coarse::CoarseSpace<f64>;
pub type AdditiveSchwarz64 = schwarz::AdditiveSchwarz<f64>;
pub type PcgReport64 = krylov::PcgReport<f64>;
pub type ReferenceElement32 = elements::ReferenceElement<f32>;
pub type CsrMatrix32 = linalg::CsrMatrix<f32>;
