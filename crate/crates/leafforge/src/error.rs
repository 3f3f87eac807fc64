use thiserror::Error;

/// Errors shared across the crate. All arithmetic is exact; any overflow of the
/// fixed-width fast path is reported rather than wrapped.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("gram matrix is not square")]
    NotSquare,

    #[error("gram matrix is not symmetric")]
    NotSymmetric,

    #[error("form is not unimodular (determinant {det})")]
    NonUnimodular { det: String },

    #[error("degenerate form: symmetric elimination found no usable pivot")]
    Degenerate,

    #[error("empty block list")]
    EmptyBlocks,

    #[error("integer overflow in exact arithmetic")]
    Overflow,

    #[error("vector is not characteristic for this form")]
    NotCharacteristic,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("no integer completion: parameter s must be odd, got {0}")]
    NoIntegerCompletion(i64),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("parity invariant violated: K+ + K- is not even coordinatewise")]
    ParityViolation,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
