//! Library side of the `redqa` command: configuration and run orchestration.

pub mod config;
pub mod engine;

use std::path::PathBuf;

use qa_core::corpora::CorpusError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Corpus(CorpusError),
    #[error("{}: {1}", .0.display())]
    Io(PathBuf, #[source] std::io::Error),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    /// 1 for usage and configuration problems, 2 for unreadable corpora.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Corpus(_) => 2,
            _ => 1,
        }
    }
}

pub const EXIT_BUDGET: i32 = 3;
