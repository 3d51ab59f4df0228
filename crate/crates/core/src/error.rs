use thiserror::Error;

/// Errors raised while constructing codes or evaluating field operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unsupported extension degree m={0} (supported: 2, 3, 4, 5, 8)")]
    UnsupportedDegree(u32),
    #[error("division by zero in GF(2^m)")]
    DivisionByZero,
    #[error("symbol {value} is outside GF({q})")]
    SymbolOutOfRange { value: u32, q: usize },
    #[error("invalid code parameters: {0}")]
    InvalidParameters(String),
    #[error("code too large to enumerate: {q}^{dim} codewords exceeds 2^24")]
    TooLargeToEnumerate { q: usize, dim: usize },
    #[error("invalid code spec `{spec}`: {reason}")]
    CodeSpec { spec: String, reason: String },
    #[error("invalid simulation config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
