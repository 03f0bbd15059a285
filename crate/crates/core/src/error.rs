use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("no significant digit: value is zero")]
    NoSignificantDigit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("empty sample: no nonzero values to score")]
    EmptySample,
}

/// Invalid parameters: generator specs, thresholds, sampling plans.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid configuration: {0}")]
pub struct ConfigError(pub String);

impl ConfigError {
    pub fn new(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("line {line}: {reason}: {text:?}")]
    MalformedEdge {
        line: u64,
        text: String,
        reason: &'static str,
    },

    #[error("column {0:?} not found in header")]
    MissingColumn(String),

    #[error("row {row}: column {column:?}: not a nonnegative integer: {text:?}")]
    BadCell { row: u64, column: String, text: String },

    #[error("row {row}: {message}")]
    BadRow { row: u64, message: String },
}

impl IngestError {
    /// True when the error comes from how the reader was configured rather
    /// than from the data it read.
    pub fn is_config(&self) -> bool {
        matches!(self, IngestError::MissingColumn(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum LookupError {
    #[error("user {0} is not in the graph")]
    UnknownUser(u64),
}
