use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("algebra is not nilpotent")]
    NotNilpotent,
    #[error("flatness identity {identity} violated by {violation:e}")]
    FlatnessViolation { identity: usize, violation: f64 },
    #[error("metric is not equivariant under the monodromy (violation {0:e})")]
    MetricNotEquivariant(f64),
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn mismatch(expected: impl ToString, found: impl ToString) -> Self {
        Error::DimensionMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }

    /// True for errors caused by bad user data rather than numerical trouble.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::InternalConsistency(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
