use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not reach tolerance {tol:e} within {evaluations} evaluations (estimated error {estimated_error:e})")]
    QuadratureNonConvergence {
        tol: f64,
        estimated_error: f64,
        evaluations: usize,
    },

    #[error("no sign change found while bracketing: {0}")]
    Bracketing(String),

    #[error("root finder did not converge after {iterations} iterations (residual {residual:e})")]
    RootNonConvergence { iterations: usize, residual: f64 },

    #[error("Newton iteration diverged after {iterations} iterations (last residual {residual:e})")]
    NewtonDivergence { iterations: usize, residual: f64 },

    #[error("inconsistent geometry: {0}")]
    Geometry(String),
}

pub type Result<T> = std::result::Result<T, Error>;
