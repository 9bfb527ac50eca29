use std::path::PathBuf;

use thiserror::Error;

/// Input and configuration errors; all map to exit code 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    MalformedJson {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema violation at {path}: {message}")]
    SchemaViolation { path: String, message: String },
    #[error("set '{set}': {source}")]
    InvalidSet {
        set: String,
        #[source]
        source: tgc_core::Error,
    },
    #[error("no set named '{name}' (available: {available})")]
    UnknownSet { name: String, available: String },
    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {}: {source}", path.display())]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] tgc_core::Error),
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
