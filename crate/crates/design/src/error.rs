use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot parse config: {0}")]
    Parse(serde_json::Error),

    #[error("invalid config: {0}")]
    Validation(String),

    #[error("numeric failure: {0}")]
    Numeric(#[from] rvas_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    /// Process exit status: 2 for unreadable JSON, 3 for a config that
    /// parses but is invalid, 4 for numeric failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(e) if e.is_syntax() || e.is_eof() => 2,
            CliError::Parse(_) | CliError::Validation(_) => 3,
            CliError::Numeric(_) => 4,
            CliError::Io { .. } | CliError::Pool(_) => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

/// Maps core errors raised while checking a config to validation errors.
pub(crate) fn invalid(context: &str) -> impl Fn(rvas_core::Error) -> CliError + '_ {
    move |e| CliError::Validation(format!("{context}: {e}"))
}
