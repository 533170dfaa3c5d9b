//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("dimension {0} exceeds the dense cap {1}")]
    DimensionCap(usize, usize),
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("trace is {0:.17}, expected 1")]
    TraceNotOne(f64),
    #[error("operator is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPositive(f64),
    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("state norm is {0:.17}, expected 1")]
    NotNormalized(f64),
    #[error("cannot normalize a vector of zero norm")]
    ZeroNorm,
    #[error("POVM does not sum to the identity (max deviation {0:.3e})")]
    IncompletePovm(f64),
    #[error("kept-qubit set must be a nonempty proper subset of 0..{0}")]
    BadKeepSet(usize),
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("{0}")]
    BadParameter(String),
    #[error("parity strings are not linearly independent over GF(2)")]
    DependentRows,
    #[error("block structure exceeds configured caps: {0}")]
    BlockCap(String),
    #[error("deterministic information is defined only for pure sources")]
    MixedSourceUnsupported,
    #[error("incompatible attack/scheme combination: {0}")]
    IncompatibleAttack(String),
    #[error("empty privacy-amplification mask")]
    EmptyMask,
    #[error("not enough bits for the requested pipeline: {0}")]
    InsufficientBits(String),
    #[error("error rate {0} is unreachable for this attack")]
    UnreachableErrorRate(f64),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::BadParameter(msg.into())
    }
}
