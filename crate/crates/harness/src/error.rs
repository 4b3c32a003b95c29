use std::path::{Path, PathBuf};

use thiserror::Error;

/// Problems with user-supplied files, flags or configuration. These map to
/// exit code 1.
#[derive(Debug, Error)]
pub enum InputError {
    #[error("{}:{line}: {msg}", path.display())]
    Parse { path: PathBuf, line: u64, msg: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Data(#[from] disentangle_core::Error),
}

impl InputError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn parse(path: &Path, line: u64, msg: impl Into<String>) -> Self {
        Self::Parse {
            path: path.to_path_buf(),
            line,
            msg: msg.into(),
        }
    }
}

pub type InputResult<T> = std::result::Result<T, InputError>;
