use thiserror::Error;

/// Invalid parameters or inputs that violate an operation's preconditions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("cannot parse `{0}` as a number")]
    Unparsable(String),
    #[error("exponent must be positive, got {0}")]
    NonPositiveExponent(String),
    #[error("non-finite entry {0} in vector")]
    NonFiniteEntry(f64),
    #[error("dimension mismatch: n0 = {0}, n1 = {1}")]
    DimensionMismatch(u32, u32),
    #[error("ambient dimension n must be at least 1")]
    ZeroDimension,
    #[error("vector does not conform to space: {0}")]
    ShapeMismatch(String),
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("{0}")]
    OutOfRange(String),
}

/// Failures of the numerical procedures themselves.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComputeError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("basis is rank deficient (rank {rank} < {expected})")]
    RankDeficient { rank: usize, expected: usize },
    #[error("subspace oracle exhausted after {found} of {needed} humps (partial ratio {partial_ratio:?})")]
    OracleExhausted {
        found: usize,
        needed: usize,
        partial_ratio: Option<f64>,
    },
}

pub type Result<T, E = ComputeError> = std::result::Result<T, E>;
