use thiserror::Error;

/// Errors raised by the calculator.
///
/// The CLI maps these onto exit codes, so variants are grouped by how the
/// caller is expected to react rather than by module.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("series exponent denominators differ: {0} vs {1}")]
    DenominatorMismatch(u32, u32),

    #[error("leading coefficient is not invertible (series has no nonzero term below truncation)")]
    NotInvertible,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("enumeration of {count} classes exceeds the budget of {budget}")]
    BudgetExceeded { count: String, budget: u64 },

    #[error("no leading term below truncation z^{0}")]
    NoLeadingTerm(usize),

    #[error("result is not fixed by complex conjugation: {0}")]
    NotReal(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
