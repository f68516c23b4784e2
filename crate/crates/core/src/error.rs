use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("matrix must be non-empty and square, got {rows} rows with row lengths {detail}")]
    NotSquare { rows: usize, detail: String },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not Hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is not skew-Hermitian (residual {residual:e})")]
    NotSkewHermitian { residual: f64 },
    #[error("{what} is not unitary (residual {residual:e})")]
    NotUnitary { what: String, residual: f64 },
    #[error("{what} is not an orthogonal projector")]
    NotProjector { what: String },
    #[error("M*M is not a projector, so M is not a transformer for a projector effect")]
    NotProjectorGram,
    #[error("subspace is not contained in the range of the projector (residual {residual:e})")]
    NotNested { residual: f64 },
    #[error("relative complements are not perpendicular (residual {residual:e})")]
    NotPerpendicular { residual: f64 },
    #[error("outcome has probability {weight:e}; post-measurement state undefined")]
    ZeroBranch { weight: f64 },
    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),
    #[error("rank {rank} out of range for dimension {dim}")]
    RankOutOfRange { rank: usize, dim: usize },
    #[error("parameter vector has length {actual}, expected {expected}")]
    BadParameterLength { expected: usize, actual: usize },
    #[error("truncation dimension {0} is below the minimum of 3")]
    TruncationTooSmall(usize),
    #[error("invalid tolerance {name} = {value}")]
    InvalidTolerance { name: &'static str, value: f64 },
    #[error("invalid search problem: {0}")]
    InvalidProblem(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
