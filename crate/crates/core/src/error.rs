use thiserror::Error;

/// Errors raised while reading or validating a formula.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: literal {lit} out of range for {n_vars} variables")]
    LiteralOutOfRange { line: usize, lit: i64, n_vars: usize },
    #[error("line {line}: variable {var} appears twice in one constraint")]
    DuplicateVariable { line: usize, var: u32 },
    #[error("line {line}: cardinality bound {bound} out of range for {arity} literals")]
    BoundOutOfRange { line: usize, bound: i64, arity: usize },
}

/// Errors raised by the library outside of parsing.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),
    #[error("brute force refuses {0} variables (limit {limit})", limit = crate::formula::BRUTE_FORCE_LIMIT)]
    TooManyVariables(usize),
    #[error("non-finite coordinate at index {0}")]
    NonFinite(usize),
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("formula cannot be written as {0}")]
    Unrepresentable(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
