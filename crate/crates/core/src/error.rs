use thiserror::Error;

/// Errors raised by state construction, measurement evaluation and the
/// statistical drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("operator is not physical: {0}")]
    NonPhysicalOperator(String),

    #[error("operator is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid rank {rank} for a {dim}-dimensional state")]
    InvalidRank { rank: usize, dim: usize },

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("number of discs must be odd, got {0}")]
    EvenN2(usize),

    #[error("unsupported local dimension {0}")]
    UnsupportedDim(usize),

    #[error("earmarked set is empty")]
    EmptySet,

    #[error("invalid X-state parameters: {0}")]
    InvalidXState(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("insufficient samples: {got} < {needed}")]
    InsufficientSamples { got: usize, needed: usize },

    #[error("non-positive residual at n = {n}: mean error {mean:e} <= asymptote {asymptote:e}")]
    NegativeResidual { n: f64, mean: f64, asymptote: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
