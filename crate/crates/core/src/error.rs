use thiserror::Error;

/// Errors raised by the numerical kernels, samplers and estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A density was evaluated on a coordinate hyperplane where it is unbounded.
    #[error("singular density: {0}")]
    Singularity(String),

    /// An estimator was requested whose weighted second moment is infinite.
    #[error("infinite-variance estimator refused: {0}")]
    HighVariance(String),

    /// A quadrature or root finder failed to reach its tolerance.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Malformed textual input (step-function specs, config files).
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn check_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(domain(format!("{name} must be finite and > 0, got {x}")))
    }
}
