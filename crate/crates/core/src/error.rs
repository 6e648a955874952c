use thiserror::Error;

/// Every failure the engine can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("undefined pairing between {0} and {1}")]
    UndefinedPairing(String, String),
    #[error("jet order exceeded: {0}")]
    JetOrderExceeded(String),
    #[error("non-invertible by central-square rule: {0}")]
    NonInvertible(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("pole on the real axis at {0}")]
    RealPole(String),
    #[error("polynomial part present")]
    PolynomialPart,
    #[error("invariant violation: {0}")]
    Invariant(String),
    #[error("size guard: n = {0} exceeds 8")]
    SizeGuard(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
