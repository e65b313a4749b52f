use std::path::PathBuf;

use vofl_core::Error as CoreError;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const VALIDATION: u8 = 1;
    pub const CONFIG: u8 = 2;
    pub const NUMERICAL: u8 = 3;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: CoreError,
    },

    #[error("{0}")]
    Validation(String),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Wraps a library error. Bad inputs map to configuration errors, the
    /// rest to numerical failures.
    pub fn core(context: impl Into<String>, source: CoreError) -> Self {
        let context = context.into();
        match source {
            CoreError::Domain { .. }
            | CoreError::Dimension(_)
            | CoreError::Profile(_)
            | CoreError::Grid(_)
            | CoreError::Policy(_)
            | CoreError::Invalid(_)
            | CoreError::TableMismatch => CliError::Config(format!("{context}: {source}")),
            _ => CliError::Numerical { context, source },
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => exit::CONFIG,
            CliError::Numerical { .. } => exit::NUMERICAL,
            CliError::Validation(_) => exit::VALIDATION,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
