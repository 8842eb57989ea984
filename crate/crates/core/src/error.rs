use thiserror::Error;

pub type Result<T, E = ItcError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ItcError {
    #[error("image has no foreground cells")]
    EmptyImage,
    #[error("mask must contain only 0 and 1, found {value} at ({u}, {v})")]
    NotBinary { u: usize, v: usize, value: f64 },
    #[error("grid dimensions must be positive, got {width}x{height}")]
    EmptyGrid { width: usize, height: usize },
    #[error("value buffer has length {len}, expected {expected}")]
    LengthMismatch { len: usize, expected: usize },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("fields have different dimensions: {0:?} vs {1:?}")]
    DimensionMismatch((usize, usize), (usize, usize)),
    #[error("sigma must be positive and finite, got {0}")]
    InvalidSigma(f64),
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("codebook size {m} is invalid for {n} data points")]
    InvalidM { m: usize, n: usize },
    #[error("codebook must contain at least one vector")]
    EmptyCodebook,
    #[error("codebook potential underflowed to zero")]
    DegenerateCodebook,
    #[error("data and codebook densities have disjoint support")]
    DisjointSupport,
    #[error("codebook vector {0} is stranded away from the data support")]
    StrandedVector(usize),
    #[error("stranded codebook vectors could not be recovered after {0} re-samplings")]
    StrandedRetriesExhausted(usize),
    #[error("weights must be non-negative, found {value} at index {index}")]
    NegativeWeight { index: usize, value: f64 },
}
