use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ErdError {
    #[error("iteration did not converge: {0}")]
    NonConvergence(String),
    #[error("quadrature tolerance not met (value {value}, error estimate {error_estimate:e})")]
    ToleranceNotMet {
        value: Complex64,
        error_estimate: f64,
    },
    #[error("path lift diverged: {0}")]
    Diverged(String),
    #[error("geometry too close to degenerate: {0}")]
    AmbiguousGeometry(String),
    #[error("chart does not fit tree shape: {0}")]
    ShapeMismatch(String),
    #[error("inconsistent gluing: {0}")]
    InconsistentGluing(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, ErdError>;
