use thiserror::Error;

/// Errors raised by the library. Checkers that measure a property report
/// failure through their return value, not through this type.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("game is not synchronous")]
    NotSynchronous,

    #[error("density is invalid: {0}")]
    InvalidDensity(String),

    #[error("weights are not a probability vector: {0}")]
    BadWeights(String),

    #[error("not a bijection: {0}")]
    NotBijective(String),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("vector strategy Gram matrix has an imaginary part of {0:.3e}")]
    NonRealGram(f64),

    #[error("negative probability {value:.3e} at {location}")]
    NegativeEntry { value: f64, location: String },

    #[error("projective system failed verification: {0}")]
    UnverifiedSystem(String),

    #[error("bad input: {0}")]
    BadInput(String),

    #[error("map is not completely positive (min Choi eigenvalue {0:.3e})")]
    NotCP(f64),

    #[error("map is not a unital channel: {0}")]
    NotUnitalChannel(String),

    #[error("internal cross-check mismatch: {0}")]
    InternalMismatch(String),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
