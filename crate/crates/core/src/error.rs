use thiserror::Error;

pub type Result<T> = std::result::Result<T, HeunError>;

/// Errors raised by the coefficient engines and their front ends.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeunError {
    /// A parameter record violates one of its invariants.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The parameters are valid but cannot be represented in the requested form
    /// (e.g. `a` is not the square of a rational in exact mode).
    #[error("unsupported parameter `{name}`: {reason}")]
    UnsupportedParameter { name: &'static str, reason: String },

    /// An exact zero showed up in a denominator.
    #[error("division by zero: {0}")]
    DivisionByZero(String),

    /// An operation was called outside of its stated domain of applicability.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("method `{method}` not applicable: {reason}")]
    MethodNotApplicable { method: String, reason: String },

    /// Evaluation point outside of the open unit disk.
    #[error("point outside the unit disk: |z| = {0}")]
    Domain(f64),

    #[error("series did not converge within {cap} terms")]
    NonConvergence { cap: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

impl HeunError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        HeunError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn not_applicable(method: impl ToString, reason: impl Into<String>) -> Self {
        HeunError::MethodNotApplicable {
            method: method.to_string(),
            reason: reason.into(),
        }
    }

    /// Short, stable reason code used by the command-line front end.
    pub fn code(&self) -> &'static str {
        match self {
            HeunError::InvalidParameter { .. } => "invalid-parameter",
            HeunError::UnsupportedParameter { .. } => "unsupported-parameter",
            HeunError::DivisionByZero(_) => "division-by-zero",
            HeunError::Precondition(_) => "precondition",
            HeunError::MethodNotApplicable { .. } => "method-not-applicable",
            HeunError::Domain(_) => "domain",
            HeunError::NonConvergence { .. } => "non-convergence",
            HeunError::Numerical(_) => "numerical",
            HeunError::Parse { .. } => "parse",
        }
    }
}
