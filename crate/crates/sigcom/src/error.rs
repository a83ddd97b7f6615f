//! Error type shared by every module, with the CLI exit-code mapping.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration: bad CLI arguments, out-of-range parameters,
    /// inconsistent spectral settings, and the like.
    #[error("config: {0}")]
    Config(String),

    /// Input data failed validation — parse failures, non-finite samples,
    /// ragged rows, windows larger than the recording, empty graphs…
    /// Each message carries the location (row/column, window, stage) where
    /// the problem was detected.
    #[error("data: {0}")]
    Data(String),

    /// A numeric routine did not converge (eigensolver sweep limit).
    #[error("numeric: {0}")]
    Numeric(String),

    /// Filesystem failure, annotated with the offending path.
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code: 2 config, 3 data (including I/O), 4 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Data(_) | Error::Io { .. } => 3,
            Error::Numeric(_) => 4,
        }
    }
}
