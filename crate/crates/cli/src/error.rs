use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration, plot spec or command line.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Data { path: PathBuf, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Data { .. } => 1,
            Self::Numerical(_) => 2,
            Self::Io { .. } => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}

/// Classifies a model-layer error: parameter problems are configuration
/// errors, solver and capacity problems are numerical.
impl From<welfare_core::Error> for CliError {
    fn from(e: welfare_core::Error) -> Self {
        use welfare_core::Error as E;
        match e {
            E::InvalidGame(_)
            | E::InvalidParams(_)
            | E::InvalidScheme(_)
            | E::InvalidState(_)
            | E::Configuration(_) => Self::Config(e.to_string()),
            _ => Self::Numerical(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
