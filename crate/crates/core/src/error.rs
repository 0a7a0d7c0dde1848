//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix dimension {0} unsupported (expected 2 or 4)")]
    BadDim(usize),

    #[error("matrix is not Hermitian (asymmetry {0:.3e} exceeds 1e-12)")]
    NotHermitian(f64),

    #[error("operator is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    #[error("tensor product dimension {0} unsupported (scope is qubit ⊗ qubit)")]
    ResultDimUnsupported(usize),

    #[error("unsharpness parameter {eta} outside [0, {max}]")]
    EtaOutOfRange { eta: f64, max: f64 },

    #[error("trace {0} must equal 1 within 1e-10")]
    InvalidTrace(f64),

    #[error("effect spectrum [{min:.3e}, {max:.3e}] outside [0, 1] tolerance band")]
    NotEffect { min: f64, max: f64 },

    #[error("effects do not sum to identity (max-abs residual {0:.3e})")]
    Incomplete(f64),

    #[error("duplicate outcome label {0}")]
    DuplicateLabel(i64),

    #[error("zero vector cannot be normalized")]
    ZeroNorm,

    #[error("probability {0:.3e} below the -1e-12 clamp floor")]
    NegativeProbability(f64),

    #[error("branch probability {0:.3e} too small for a state update")]
    ZeroProbabilityBranch(f64),

    #[error("probability table total {0} must equal 1 within 1e-10")]
    BadTableTotal(f64),

    #[error("probability {0} outside [0, 1]")]
    POutOfRange(f64),

    #[error("correlation {0} outside [-1, 1]")]
    CorrelationOutOfRange(f64),

    #[error("unsupported number of observables {0} (expected 2 or 3)")]
    UnsupportedArity(usize),

    #[error("sample count must be at least 1")]
    BadN,

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
