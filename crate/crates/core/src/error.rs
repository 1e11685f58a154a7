use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("point is not in the domain")]
    NotInDomain,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid Riesz regime: {0}")]
    InvalidRegime(String),

    #[error("divergent integral: s = {s} must be smaller than d = {d}")]
    Divergent { s: f64, d: usize },

    #[error("not enough samples: need at least {needed}, got {got}")]
    NotEnoughSamples { needed: usize, got: usize },

    #[error("singular lattice basis")]
    SingularBasis,

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
