use thiserror::Error;

/// Errors raised by the evaluation, parsing and checking layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A partial node (reciprocal, log, sqrt) was evaluated outside its domain.
    #[error("domain error at eps={eps}: {what} in `{node}`")]
    Domain {
        eps: f64,
        what: &'static str,
        node: String,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("invalid index set: {0}")]
    IndexSet(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("unresolved name `{name}` at line {line}")]
    Unresolved { name: String, line: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("sampling failure: {0}")]
    Sampling(String),
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// A parse error in a one-line argument (no source position).
    pub fn parse(msg: impl Into<String>) -> Error {
        Error::Parse {
            line: 1,
            col: 1,
            msg: msg.into(),
        }
    }
}
