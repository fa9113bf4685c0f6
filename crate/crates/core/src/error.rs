use thiserror::Error;

/// Errors raised by the numerical kernels.
///
/// Variants carry enough context to reconstruct what went wrong without a
/// debugger: the offending index, the budget that ran out, or the best value
/// a non-converged quadrature reached.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum MahlerError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: index {index} exceeds available maximum {max}")]
    Range { index: usize, max: usize },

    #[error("resource error: {0}")]
    Resource(String),

    #[error("integrity error at k = {k}: {message}")]
    Integrity { k: usize, message: String },

    #[error("usage error: {0}")]
    Usage(String),

    #[error(
        "quadrature did not reach tolerance {tol} after {levels} levels: best value {best}, estimate {estimate}"
    )]
    Convergence {
        best: String,
        estimate: String,
        tol: String,
        levels: u32,
    },

    #[error("integrand returned a non-finite value at abscissa {abscissa}")]
    Integrand { abscissa: String },
}

pub type Result<T> = std::result::Result<T, MahlerError>;

pub(crate) fn domain(msg: impl Into<String>) -> MahlerError {
    MahlerError::Domain(msg.into())
}
