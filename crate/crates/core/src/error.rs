use crate::quad::IntegralEstimate;

/// Unified error type for the crate.
///
/// Variants are grouped by how a caller should react: [`Error::Parse`] and
/// [`Error::Invalid`] are specification problems (bad expression text, bad
/// config, violated preconditions) and map to CLI exit code 2;
/// [`Error::Eval`], [`Error::Numeric`], [`Error::ToleranceNotReached`] and
/// [`Error::Degenerate`] are runtime/numerical failures and map to exit
/// code 3.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Syntax or name-resolution failure while parsing an expression.
    /// `offset` is a byte offset into the source text.
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    /// Invalid configuration or violated precondition.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// Domain error or overflow while evaluating an expression.
    #[error("evaluation error: {0}")]
    Eval(String),

    /// Numerical failure (non-finite integrand, divergent recursion, ...).
    #[error("numerical failure: {0}")]
    Numeric(String),

    /// Adaptive quadrature could not reach the requested tolerance within
    /// its evaluation budget. Carries the best estimate obtained.
    #[error(
        "quadrature tolerance not reached: best estimate {} with error bound {}",
        estimate.value, estimate.error_bound
    )]
    ToleranceNotReached { estimate: IntegralEstimate },

    /// An operation is undefined for this input (for example an a-priori
    /// bound whose inner integral vanishes identically).
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

impl Error {
    /// True for errors that indicate bad input rather than a numerical
    /// failure at runtime.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Invalid(_))
    }
}
