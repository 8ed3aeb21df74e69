use thiserror::Error;

/// Errors produced by the core algorithms.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("expression uses x{index} but only {supplied} position coordinate(s) were supplied")]
    MissingVariable { index: usize, supplied: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("regularity violated: {0}")]
    Regularity(String),

    #[error("singular metric: 1 - p^2 = {one_minus_p2:e} at the requested position")]
    SingularMetric { one_minus_p2: f64 },

    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
