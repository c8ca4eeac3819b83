//! Error type shared by every stage of the pipeline.

use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input data; carries the 1-based line number.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// An input file could not be opened or read.
    #[error("cannot read {path}: {source}")]
    InputFile { path: PathBuf, source: io::Error },

    #[error("unknown book id `{0}`")]
    UnknownBook(String),

    #[error("unknown community id {0}")]
    UnknownCommunity(u32),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Filtering removed everything there was to analyze.
    #[error("network is empty after filtering: {0}")]
    EmptyNetwork(String),

    #[error("graph has no nodes")]
    EmptyGraph,

    /// Two inputs that must share a node or subject universe do not.
    #[error("mismatched inputs: {0}")]
    Mismatch(String),

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    /// Input is structurally valid but degenerate for the requested analysis.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// Process exit code for this error when surfaced by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::InputFile { .. } | Error::UnknownBook(_) => 2,
            Error::EmptyNetwork(_) => 3,
            Error::NonConvergence { .. } => 4,
            Error::Io(_) | Error::Csv(_) => 5,
            _ => 1,
        }
    }
}
