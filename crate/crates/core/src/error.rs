use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("fine mesh with {fine} cells per axis does not refine coarse mesh with {coarse}")]
    NonNested { coarse: usize, fine: usize },
    #[error("overlap of {layers} layers outside the admissible range 1..{limit}")]
    OverlapOutOfRange { layers: usize, limit: usize },
    #[error("generalized Vandermonde matrix of {family} is ill-conditioned (cond = {cond:e})")]
    IllConditionedElement { family: &'static str, cond: f64 },
    #[error("matrix is singular (zero pivot in column {0})")]
    Singular(usize),
    #[error("matrix not symmetric positive definite: pivot {pivot:e} at row {row}")]
    NotSpd { row: usize, pivot: f64 },
    #[error("coarse operator is rank deficient: pivot {pivot:e} at coarse index {index}")]
    CoarseRankDeficient { index: usize, pivot: f64 },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("index ({row}, {col}) out of range for {nrows}x{ncols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },
    #[error("subdomain {0} contains no free degrees of freedom")]
    EmptySubdomain(usize),
    #[error("penalty parameter must be positive, got {0}")]
    InvalidPenalty(f64),
    #[error("{0}")]
    Structural(String),
    #[error("CG breakdown at iteration {iteration}: matrix not SPD (p^T A p = {value:e})")]
    MatrixNotSpd { iteration: usize, value: f64 },
    #[error("CG breakdown at iteration {iteration}: preconditioner not SPD (z^T r = {value:e})")]
    PreconditionerNotSpd { iteration: usize, value: f64 },
    #[error("matrix market: {0}")]
    MatrixMarket(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
