//! Command line and HTTP front end over the `blocktrace` library.

pub mod repos;
pub mod server;
pub mod session;

use serde::{Deserialize, Serialize};

use blocktrace::{BlockTracker, ChangeHistoryGraph, Config, Error, Repository, StatementKind};

/// A tracking request as sent by clients. `blockType` is one of the
/// trackable kinds or `pipeline`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrackRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repo_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clone_url: Option<String>,
    #[serde(default = "head")]
    pub commit: String,
    pub file_path: String,
    pub block_type: String,
    pub line: usize,
}

fn head() -> String {
    "HEAD".into()
}

/// Parses a user supplied block type, refusing kinds that cannot be tracked.
pub fn block_kind(s: &str) -> Result<StatementKind, Error> {
    match StatementKind::parse(s) {
        Some(k) if k.is_trackable() || s == "pipeline" => Ok(k),
        _ => Err(Error::Invalid(format!("unsupported block type `{s}`"))),
    }
}

/// Runs the tracker for `req` against an opened repository.
pub fn run_track(repo: &Repository, req: &TrackRequest, cfg: &Config) -> Result<ChangeHistoryGraph, Error> {
    BlockTracker::builder()
        .repository(repo)
        .file(req.file_path.clone())
        .kind(block_kind(&req.block_type)?)
        .line(req.line)
        .start_commit(req.commit.clone())
        .config(cfg.clone())
        .build()?
        .track()
}

/// The error that decided the outcome, looking through aborted sessions.
pub fn root_cause(e: &Error) -> &Error {
    match e {
        Error::Aborted { source, .. } => root_cause(source),
        other => other,
    }
}

/// Process exit code for a failed `track`.
pub fn exit_code(e: &Error) -> i32 {
    match root_cause(e) {
        Error::CodeElementNotFound { .. } => 2,
        _ => 1,
    }
}

/// HTTP status for a failed request.
pub fn http_status(e: &Error) -> u16 {
    match root_cause(e) {
        Error::UnknownCommit(_)
        | Error::UnknownPath { .. }
        | Error::NotARepository(_)
        | Error::CodeElementNotFound { .. } => 404,
        Error::Parse(_) | Error::Invalid(_) | Error::Decode { .. } | Error::Config(_) | Error::SizeLimit { .. } => 422,
        _ => 500,
    }
}

/// Short machine readable name of an error.
pub fn error_kind(e: &Error) -> &'static str {
    match root_cause(e) {
        Error::UnknownCommit(_) => "unknown-commit",
        Error::UnknownPath { .. } => "unknown-path",
        Error::NotARepository(_) => "unknown-repository",
        Error::CodeElementNotFound { .. } => "code-element-not-found",
        Error::Parse(_) => "parse-error",
        Error::Invalid(_) | Error::Config(_) => "invalid-input",
        Error::Decode { .. } => "decode-error",
        Error::SizeLimit { .. } => "size-limit",
        Error::MismatchedElement { .. } => "mismatched-element",
        Error::RangeRestartNeeded { .. } => "range-restart-needed",
        Error::Git { .. } => "git-error",
        _ => "internal",
    }
}
