use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function has a pole at {0}")]
    Pole(f64),
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("tridiagonal eigensolver did not converge for eigenvalue {index} after {sweeps} sweeps")]
    NoConvergence { index: usize, sweeps: usize },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("integrand evaluated to NaN at {0}")]
    Evaluation(f64),
    #[error("signal has no analytic derivative but {0} requires one")]
    MissingDerivative(&'static str),
    #[error("tolerance {tol:e} not reached within {panels} panels")]
    ToleranceUnreachable { tol: f64, panels: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
