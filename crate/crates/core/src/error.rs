use thiserror::Error;

/// Errors raised by the symbolic engine and the analyses built on it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CsaError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown identifier `{name}` at line {line}, column {column}")]
    UnknownIdentifier {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("derivative order exceeded: `{name}` has order {order}, maximum is {max}")]
    OrderExceeded {
        name: String,
        order: usize,
        max: usize,
    },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("pole: {0}")]
    Pole(String),
    #[error("invalid jet context: {0}")]
    Context(String),
    #[error("invalid system: {0}")]
    System(String),
    #[error("not supported: {0}")]
    Unsupported(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("degree bound exceeded: {0}")]
    DegreeOverflow(String),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("{0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, CsaError>;
