use thiserror::Error;

/// A parse failure with the 1-based line it was found on.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("graph is not dually positive: {0}")]
    NotDuallyPositive(String),

    #[error("expected a {expected} graph")]
    WrongSide { expected: &'static str },

    #[error("embedding is not valid for this cap: {0}")]
    InvalidEmbedding(String),

    #[error("search exhausted budget after {explored} nodes")]
    SearchBudget { explored: u64 },

    #[error("word length guard exceeded ({letters} letters > {limit})")]
    WordLength { letters: usize, limit: usize },

    #[error("factorizations live on different surfaces ({left} vs {right} holes)")]
    SurfaceMismatch { left: usize, right: usize },

    #[error("monodromy mismatch: {0}")]
    MonodromyMismatch(String),

    #[error("no commutation path found: {0}")]
    NoCommutationPath(String),

    #[error("invalid occurrence: {0}")]
    InvalidOccurrence(String),

    #[error("budget misconfigured: {0}")]
    BadBudget(String),
}

impl Error {
    /// Whether this error comes from a resource guard rather than bad input.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::SearchBudget { .. } | Error::WordLength { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
