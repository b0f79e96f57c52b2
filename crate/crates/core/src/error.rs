use thiserror::Error;

/// Errors raised by certificate construction, matrix materialization and the oracles.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("radicand mismatch: {left} vs {right}")]
    RadicandMismatch { left: String, right: String },

    #[error("invalid radicand {0}: must be positive and not a rational square")]
    InvalidRadicand(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("size {size} exceeds the configured cap {cap}")]
    CapExceeded { size: usize, cap: usize },

    #[error("degenerate denominator: n - 2k + 1 = {0} must be positive")]
    DegenerateDenominator(i64),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("empty eps1 window for {0}; this indicates a bug")]
    EmptyWindow(String),

    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
}

pub type Result<T> = std::result::Result<T, Error>;
