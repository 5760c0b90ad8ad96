use std::fmt;
use std::path::{Path, PathBuf};

use drivecontext_core::Error as CoreError;

/// Process exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {message}", path.display())]
    Schema { path: PathBuf, message: String },

    #[error("{0}")]
    Data(String),

    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn schema(path: &Path, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.to_path_buf(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Config(_) => EXIT_USAGE,
            Error::Schema { .. } | Error::Data(_) => EXIT_DATA,
            Error::Core(e) => match e {
                CoreError::InvalidConfig(_)
                | CoreError::UnknownAlgorithm { .. }
                | CoreError::InvalidSpec(_) => EXIT_USAGE,
                _ => EXIT_DATA,
            },
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A rejected input row. Displays as `line=<n> reason=<text>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub line: u64,
    pub reason: String,
}

impl Warning {
    pub fn new(line: u64, reason: impl Into<String>) -> Self {
        Self {
            line,
            reason: reason.into(),
        }
    }
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line={} reason={}", self.line, self.reason)
    }
}
