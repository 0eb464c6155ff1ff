use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("CSV schema error: {0}")]
    Schema(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] ttortho::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// Process exit code: 2 configuration, 3 numerical failure, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        use ttortho::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Schema(_) | CliError::Io { .. } | CliError::Csv(_) => 4,
            CliError::Core(e) => match e {
                E::Io(_) | E::Format(_) => 4,
                E::InvalidArgument(_) | E::Shape(_) | E::Index(_) | E::TooLargeToDensify { .. } => 2,
                _ => 3,
            },
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
