//! Read-only access to a local git repository through the `git` executable.
//!
//! Every query is a fixed argument list handed to the system `git` (or the
//! binary named by `BLOCKTRACE_GIT`). History walks follow first-parent
//! ancestry.

use std::collections::HashMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::{Arc, RwLock};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable overriding the git binary.
pub const GIT_ENV: &str = "BLOCKTRACE_GIT";

const RECORD_SEP: char = '\u{1e}';
const FIELD_SEP: char = '\u{1f}';
const LOG_FORMAT: &str = "--format=%x1e%H%x1f%P%x1f%an%x1f%aI%x1f%B";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CommitRef {
    pub id: String,
    pub author: String,
    pub authored_at: DateTime<Utc>,
    pub message: String,
    pub parent_ids: Vec<String>,
}

impl CommitRef {
    pub fn first_parent(&self) -> Option<&str> {
        self.parent_ids.first().map(String::as_str)
    }

    pub fn is_root(&self) -> bool {
        self.parent_ids.is_empty()
    }

    pub fn short_id(&self) -> &str {
        &self.id[..self.id.len().min(8)]
    }
}

/// True when `id` is a full lowercase SHA-1.
pub fn is_commit_id(id: &str) -> bool {
    id.len() == 40 && id.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f'))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FileChangeKind {
    Added,
    Modified,
    Deleted,
    Renamed,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FileChange {
    pub path_before: Option<String>,
    pub path_after: Option<String>,
    pub kind: FileChangeKind,
}

impl FileChange {
    /// The path the file has after the commit, or before it for deletions.
    pub fn path(&self) -> &str {
        self.path_after
            .as_deref()
            .or(self.path_before.as_deref())
            .unwrap_or_default()
    }
}

type BlobKey = (String, String);

/// Handle to a local clone. Cheap to share across threads.
pub struct Repository {
    root: PathBuf,
    git: OsString,
    blobs: RwLock<HashMap<BlobKey, Option<Arc<str>>>>,
}

impl std::fmt::Debug for Repository {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Repository").field("root", &self.root).finish()
    }
}

impl Repository {
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let root = path.as_ref().to_path_buf();
        if !root.is_dir() {
            return Err(Error::NotARepository(root));
        }
        let repo = Repository {
            root,
            git: std::env::var_os(GIT_ENV).unwrap_or_else(|| "git".into()),
            blobs: RwLock::default(),
        };
        let out = repo.run_raw(&["rev-parse", "--git-dir"])?;
        if !out.status.success() {
            return Err(Error::NotARepository(repo.root));
        }
        Ok(repo)
    }

    /// Opens `dest`, cloning `url` into it first when it does not exist yet.
    pub fn clone_if_absent(url: &str, dest: impl AsRef<Path>) -> Result<Self> {
        let dest = dest.as_ref();
        if !dest.exists() {
            let git = std::env::var_os(GIT_ENV).unwrap_or_else(|| "git".into());
            let out = Command::new(git)
                .arg("clone")
                .arg("--quiet")
                .arg(url)
                .arg(dest)
                .output()?;
            if !out.status.success() {
                return Err(Error::Git {
                    args: format!("clone {url}"),
                    stderr: String::from_utf8_lossy(&out.stderr).trim().to_string(),
                });
            }
        }
        Self::open(dest)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn run_raw(&self, args: &[&str]) -> Result<Output> {
        Ok(Command::new(&self.git)
            .args(args)
            .current_dir(&self.root)
            .env("GIT_OPTIONAL_LOCKS", "0")
            .output()?)
    }

    pub(crate) fn run(&self, args: &[&str]) -> Result<Vec<u8>> {
        let out = self.run_raw(args)?;
        if out.status.success() {
            Ok(out.stdout)
        } else {
            Err(Error::Git {
                args: args.join(" "),
                stderr: String::from_utf8_lossy(&out.stderr).trim().to_string(),
            })
        }
    }

    /// Resolves any revision expression to a commit.
    pub fn resolve(&self, rev: &str) -> Result<CommitRef> {
        let spec = format!("{rev}^{{commit}}");
        let out = self.run_raw(&["rev-parse", "--verify", "--quiet", &spec])?;
        if !out.status.success() {
            return Err(Error::UnknownCommit(rev.to_string()));
        }
        let id = String::from_utf8_lossy(&out.stdout).trim().to_string();
        let raw = self.run(&["log", "-1", LOG_FORMAT, &id])?;
        parse_log(&raw)?
            .into_iter()
            .next()
            .ok_or(Error::UnknownCommit(rev.to_string()))
    }

    /// Commits reachable from `start` along first parents, newest first.
    pub fn first_parent_chain(&self, start: &str) -> Result<Vec<String>> {
        let raw = self.run(&["rev-list", "--first-parent", start])?;
        Ok(String::from_utf8_lossy(&raw)
            .lines()
            .map(str::to_string)
            .collect())
    }

    /// Commits in which `path` changed, following renames, newest first.
    pub fn file_history(&self, path: &str, start: &CommitRef) -> Result<Vec<CommitRef>> {
        if !self.path_exists(&start.id, path)? {
            return Err(Error::UnknownPath {
                path: path.to_string(),
                commit: start.id.clone(),
            });
        }
        let raw = self.run(&[
            "log",
            "--first-parent",
            "--follow",
            LOG_FORMAT,
            &start.id,
            "--",
            path,
        ])?;
        parse_log(&raw)
    }

    fn path_exists(&self, commit: &str, path: &str) -> Result<bool> {
        let spec = format!("{commit}:{path}");
        Ok(self.run_raw(&["cat-file", "-e", &spec])?.status.success())
    }

    /// Contents of `path` at `commit`, or `None` when the path is absent.
    pub fn read_file(&self, commit: &str, path: &str) -> Result<Option<Arc<str>>> {
        let key = (commit.to_string(), path.to_string());
        if let Some(hit) = self.blobs.read().expect("blob cache poisoned").get(&key) {
            return Ok(hit.clone());
        }
        let spec = format!("{commit}:{path}");
        let out = self.run_raw(&["show", &spec])?;
        let value = if out.status.success() {
            let text = String::from_utf8(out.stdout).map_err(|_| Error::Decode {
                path: path.to_string(),
                commit: commit.to_string(),
            })?;
            Some(Arc::<str>::from(text))
        } else {
            let stderr = String::from_utf8_lossy(&out.stderr);
            if stderr.contains("does not exist") || stderr.contains("exists on disk, but not in")
            {
                None
            } else if stderr.contains("invalid object name") || stderr.contains("bad revision")
            {
                return Err(Error::UnknownCommit(commit.to_string()));
            } else {
                return Err(Error::Git {
                    args: format!("show {spec}"),
                    stderr: stderr.trim().to_string(),
                });
            }
        };
        self.blobs
            .write()
            .expect("blob cache poisoned")
            .entry(key)
            .or_insert(value.clone());
        Ok(value)
    }

    /// Files added, modified, deleted or renamed by `commit` against its first parent.
    pub fn changed_files(&self, commit: &CommitRef) -> Result<Vec<FileChange>> {
        let raw = match commit.first_parent() {
            Some(parent) => self.run(&[
                "diff-tree",
                "-r",
                "-M",
                "-z",
                "--no-commit-id",
                "--name-status",
                parent,
                &commit.id,
            ])?,
            None => self.run(&[
                "diff-tree",
                "-r",
                "-M",
                "-z",
                "--root",
                "--no-commit-id",
                "--name-status",
                &commit.id,
            ])?,
        };
        parse_name_status(&raw)
    }

    /// Paths of every file in the tree of `commit`.
    pub fn list_files(&self, commit: &str) -> Result<Vec<String>> {
        let raw = self.run(&["ls-tree", "-r", "-z", "--name-only", commit])?;
        Ok(raw
            .split(|b| *b == 0)
            .filter(|s| !s.is_empty())
            .map(|s| String::from_utf8_lossy(s).into_owned())
            .collect())
    }
}

fn parse_log(raw: &[u8]) -> Result<Vec<CommitRef>> {
    let text = String::from_utf8_lossy(raw);
    let mut commits = Vec::new();
    for record in text.split(RECORD_SEP).filter(|r| !r.trim().is_empty()) {
        let mut fields = record.splitn(5, FIELD_SEP);
        let mut next = || fields.next().unwrap_or_default();
        let id = next().trim().to_string();
        let parents = next();
        let author = next().to_string();
        let date = next();
        let message = next().trim_end().to_string();
        let authored_at = DateTime::parse_from_rfc3339(date.trim())
            .map_err(|e| Error::Git {
                args: "log".into(),
                stderr: format!("bad date `{date}`: {e}"),
            })?
            .with_timezone(&Utc);
        commits.push(CommitRef {
            id,
            author,
            authored_at,
            message,
            parent_ids: parents.split_whitespace().map(str::to_string).collect(),
        });
    }
    Ok(commits)
}

fn parse_name_status(raw: &[u8]) -> Result<Vec<FileChange>> {
    let mut parts = raw
        .split(|b| *b == 0)
        .filter(|s| !s.is_empty())
        .map(|s| String::from_utf8_lossy(s).into_owned());
    let mut changes = Vec::new();
    while let Some(status) = parts.next() {
        let mut path = || {
            parts.next().ok_or_else(|| Error::Git {
                args: "diff-tree".into(),
                stderr: "truncated name-status output".into(),
            })
        };
        let change = match status.chars().next() {
            Some('A') => FileChange {
                path_before: None,
                path_after: Some(path()?),
                kind: FileChangeKind::Added,
            },
            Some('D') => FileChange {
                path_before: Some(path()?),
                path_after: None,
                kind: FileChangeKind::Deleted,
            },
            Some('R') => {
                let before = path()?;
                let after = path()?;
                FileChange {
                    path_before: Some(before),
                    path_after: Some(after),
                    kind: FileChangeKind::Renamed,
                }
            }
            Some('C') => {
                let _source = path()?;
                FileChange {
                    path_before: None,
                    path_after: Some(path()?),
                    kind: FileChangeKind::Added,
                }
            }
            _ => {
                let p = path()?;
                FileChange {
                    path_before: Some(p.clone()),
                    path_after: Some(p),
                    kind: FileChangeKind::Modified,
                }
            }
        };
        changes.push(change);
    }
    Ok(changes)
}
