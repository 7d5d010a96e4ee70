use thiserror::Error;

/// Errors raised by geometry, sampling and estimation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeoError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is near-singular (smallest eigenvalue {0:e})")]
    NearSingular(f64),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("invalid tree: {0}")]
    InvalidTree(String),
}

impl GeoError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        GeoError::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, GeoError>;
