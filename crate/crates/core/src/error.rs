use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("grade exceeds dimension: {grade} > {dim}")]
    GradeOverflow { grade: usize, dim: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("grade mismatch: expected {expected}, found {found}")]
    GradeMismatch { expected: usize, found: usize },
    #[error("invalid index set {0:?}")]
    InvalidIndexSet(Vec<usize>),
    #[error("uncertifiable family: polynomial atoms have no global C^r bound")]
    UncertifiableFamily,
    #[error("division by zero scale")]
    ZeroScale,
    #[error("dipole order exceeds r_max ({0})")]
    OrderOverflow(usize),
    #[error("empty frequency budget")]
    EmptyBudget,
    #[error("point {0:?} is not on the oracle grid")]
    OffGrid(Vec<f64>),
    #[error("unsupported oracle configuration: {0}")]
    UnsupportedOracle(String),
    #[error("degenerate cell: {0}")]
    DegenerateCell(String),
    #[error("points have no boundary")]
    PointBoundary,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("certificate check failed: {0}")]
    CertificateInvalid(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
