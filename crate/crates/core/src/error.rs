use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CasimirError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The model does not support the requested evaluation.
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// A formula hit an exact singularity.
    #[error("singularity: {0}")]
    Singularity(String),

    /// An iterative or adaptive scheme ran out of refinement budget.
    #[error("{context} did not converge (last estimate {estimate:e}, error estimate {error:e})")]
    Convergence {
        context: String,
        estimate: f64,
        error: f64,
    },

    /// Malformed input text.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Division by a vanishing reference quantity.
    #[error("division by zero: {0}")]
    Division(String),
}

pub type Result<T> = std::result::Result<T, CasimirError>;

pub(crate) fn domain(msg: impl Into<String>) -> CasimirError {
    CasimirError::Domain(msg.into())
}
