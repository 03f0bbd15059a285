use std::path::Path;

use benfordnet::{IngestError, StatsError};
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// `validate` emitted at least one FAIL verdict.
    pub const VALIDATION_FAILED: i32 = 1;
    /// Bad flags, config file or generator parameters.
    pub const CONFIG: i32 = 2;
    /// Malformed or empty input data.
    pub const DATA: i32 = 3;
    pub const IO: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn ingest(path: &Path, e: IngestError) -> Self {
        match e {
            IngestError::Io(source) => CliError::io(path, source),
            e if e.is_config() => CliError::Config(format!("{}: {e}", path.display())),
            e => CliError::Data(format!("{}: {e}", path.display())),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Data(_) => exit::DATA,
            CliError::Io { .. } => exit::IO,
        }
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        CliError::Data(e.to_string())
    }
}
