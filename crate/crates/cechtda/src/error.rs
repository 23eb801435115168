use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_DEPENDENCY: i32 = 4;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("config: {0}")]
    Config(String),
    #[error("stage `{stage}` output {artifact} is missing; run `cechtda {stage}` first")]
    Dependency { stage: &'static str, artifact: PathBuf },
    #[error("subject {subject}: {count} simplices break the nerve condition (pass --allow-rips to keep a Rips filtration)")]
    Verification { subject: String, count: usize },
    #[error("subject {subject}: {source}")]
    Subject { subject: String, source: cechtda_core::Error },
    #[error(transparent)]
    Core(#[from] cechtda_core::Error),
}

pub type Result<T> = std::result::Result<T, PipelineError>;

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Dependency { .. } => EXIT_DEPENDENCY,
            PipelineError::Core(e) | PipelineError::Subject { source: e, .. } if e.is_numeric() => EXIT_NUMERIC,
            _ => EXIT_VALIDATION,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        PipelineError::Io { path: path.into(), source }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        PipelineError::Parse { path: path.into(), line, msg: msg.into() }
    }

    pub(crate) fn subject(subject: &str) -> impl FnOnce(cechtda_core::Error) -> Self + '_ {
        move |source| PipelineError::Subject { subject: subject.to_string(), source }
    }
}
