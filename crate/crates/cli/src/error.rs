//! Driver error type, exit codes, and the machine-readable error record.

use thiserror::Error;

/// Errors surfaced by the command-line driver.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration file, bad flag, or an inconsistent combination.
    #[error("configuration error: {0}")]
    Config(String),

    /// Filesystem failure, annotated with the path involved.
    #[error("i/o error on {path}: {source}")]
    Io {
        /// Path of the file or directory the operation touched.
        path: String,
        /// Underlying error.
        #[source]
        source: std::io::Error,
    },

    /// Malformed or mismatched checkpoint contents.
    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    /// Error propagated from the engine.
    #[error(transparent)]
    Core(#[from] nqs_core::Error),
}

impl CliError {
    /// Stable error class written to `error.json`.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Checkpoint(_) => "checkpoint",
            CliError::Core(err) => match err {
                nqs_core::Error::Domain(_) => "domain",
                nqs_core::Error::Capacity(_) => "capacity",
                nqs_core::Error::Config(_) => "config",
                nqs_core::Error::Numerical(_) => "numerical",
                nqs_core::Error::ChainState(_) => "chain-state",
                nqs_core::Error::Proposal(_) => "proposal",
                nqs_core::Error::ZeroAmplitudeSnapshot { .. } => "zero-amplitude",
                nqs_core::Error::Diverged { .. } => "diverged",
                nqs_core::Error::Parse(_) => "parse",
                nqs_core::Error::Io(_) => "io",
            },
        }
    }

    /// Process exit code: configuration problems exit 2, runtime failures 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Core(nqs_core::Error::Config(_)) => 2,
            _ => 1,
        }
    }
}

/// Convenience alias for driver results.
pub type Result<T> = std::result::Result<T, CliError>;

/// Wrap an I/O error with the path it concerns.
pub fn io_err(path: &std::path::Path, source: std::io::Error) -> CliError {
    CliError::Io { path: path.display().to_string(), source }
}
