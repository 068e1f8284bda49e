use std::fmt::Display;
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid input: {0}")]
    Schema(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn domain(e: impl Display) -> Self {
        CliError::Domain(e.to_string())
    }

    pub fn in_file(self, path: &Path) -> Self {
        match self {
            CliError::Schema(m) => CliError::Schema(format!("{}: {m}", path.display())),
            other => other,
        }
    }

    /// 1 for usage and I/O problems, 2 for domain precondition violations.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Schema(_) => 1,
            CliError::Domain(_) => 2,
        }
    }
}
