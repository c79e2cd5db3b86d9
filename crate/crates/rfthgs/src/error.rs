use std::path::PathBuf;

use reward_engine::SuiteError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error("cannot load evaluation suite: {0}")]
    SuiteLoad(#[from] SuiteError),
    #[error("no best-known cost for instance `{0}`")]
    MissingBks(String),
    #[error("{path}:{line}: {message}")]
    LogParse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Data(String),
}

impl RunError {
    /// Process exit status: 2 for configuration problems, 3 for bad data.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::ConfigInvalid(_) => 2,
            RunError::SuiteLoad(SuiteError::Manifest(_) | SuiteError::Invalid(_)) => 2,
            _ => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> RunError {
        let path = path.into();
        move |source| RunError::Io { path, source }
    }
}
