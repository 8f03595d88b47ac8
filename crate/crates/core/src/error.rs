use std::path::PathBuf;

use thiserror::Error;

use crate::tracker::ChangeHistoryGraph;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Location of a syntax error inside a source file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub path: String,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}:{}:{}: {}",
            self.path, self.line, self.column, self.message
        )
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown commit `{0}`")]
    UnknownCommit(String),

    #[error("path `{path}` does not exist at commit {commit}")]
    UnknownPath { path: String, commit: String },

    #[error("`{path}` at {commit} is not valid UTF-8")]
    Decode { path: String, commit: String },

    #[error("not a git repository: {0}")]
    NotARepository(PathBuf),

    #[error("git {args} failed: {stderr}")]
    Git { args: String, stderr: String },

    #[error("parse error at {0}")]
    Parse(ParseError),

    #[error("no {kind} block starting at line {line} in {path}")]
    CodeElementNotFound {
        path: String,
        kind: String,
        line: usize,
    },

    #[error("method bodies too large to map ({nodes} nodes, limit {limit})")]
    SizeLimit { nodes: usize, limit: usize },

    #[error("history and oracle refer to different elements (`{history}` vs `{oracle}`)")]
    MismatchedElement { history: String, oracle: String },

    #[error("line range derailed by a reformatting commit {commit}; supply the block range at that commit")]
    RangeRestartNeeded { commit: String },

    #[error("tracking aborted: {source}")]
    Aborted {
        partial: Box<ChangeHistoryGraph>,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::Parse(e)
    }
}
