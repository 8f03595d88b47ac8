use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gitio::Repository;

/// Corrected line range to resume from after a reformatting commit. The
/// range refers to the file as of the parent of `commit`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeRestart {
    pub commit: String,
    #[serde(default)]
    pub file: Option<String>,
    pub start_line: usize,
    pub end_line: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineRequest {
    pub file: String,
    pub start_line: usize,
    pub end_line: usize,
    pub start_commit: String,
    /// Commit where the block was introduced; older reports are dropped.
    #[serde(default)]
    pub introduced: Option<String>,
    #[serde(default)]
    pub restarts: Vec<RangeRestart>,
}

/// Share of the file's lines that a commit rewrote only in whitespace.
const REFORMAT_SHARE: f64 = 0.95;

fn added_lines(repo: &Repository, parent: &str, commit: &str, file: &str, ignore_ws: bool) -> Result<usize> {
    let mut args = vec!["diff", "--numstat"];
    if ignore_ws {
        args.extend(["-w", "--ignore-blank-lines"]);
    }
    args.extend([parent, commit, "--", file]);
    let raw = repo.run(&args)?;
    Ok(String::from_utf8_lossy(&raw)
        .lines()
        .filter_map(|l| l.split('\t').next()?.parse::<usize>().ok())
        .sum())
}

fn is_reformatting(repo: &Repository, commit: &str, file: &str) -> Result<bool> {
    let c = repo.resolve(commit)?;
    let Some(parent) = c.first_parent() else {
        return Ok(false);
    };
    let Some(text) = repo.read_file(commit, file)? else {
        return Ok(false);
    };
    let total = text.lines().count();
    if total == 0 {
        return Ok(false);
    }
    let plain = added_lines(repo, parent, commit, file, false)?;
    let semantic = added_lines(repo, parent, commit, file, true)?;
    Ok(plain.saturating_sub(semantic) as f64 / total as f64 > REFORMAT_SHARE)
}

fn trace(repo: &Repository, file: &str, start: usize, end: usize, from: &str) -> Result<Vec<String>> {
    let range = format!("{start},{end}:{file}");
    let raw = repo.run(&["log", "--first-parent", "-L", &range, "--format=commit:%H", "-s", from])?;
    Ok(String::from_utf8_lossy(&raw)
        .lines()
        .filter_map(|l| l.strip_prefix("commit:"))
        .map(str::to_string)
        .collect())
}

/// Commits `git log -L` reports for a line range, newest first.
///
/// A commit that mostly reformats the file ends the trace; the caller must
/// supply a corrected range for it in `restarts`, otherwise
/// [`Error::RangeRestartNeeded`] names the commit.
pub fn gitlog_baseline(repo: &Repository, req: &BaselineRequest) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut file = req.file.clone();
    let (mut start, mut end) = (req.start_line, req.end_line);
    let mut from = repo.resolve(&req.start_commit)?.id;
    'segments: loop {
        for c in trace(repo, &file, start, end, &from)? {
            out.push(c.clone());
            if req.introduced.as_deref() == Some(c.as_str()) {
                break 'segments;
            }
            if is_reformatting(repo, &c, &file)? {
                let Some(r) = req.restarts.iter().find(|r| r.commit == c) else {
                    return Err(Error::RangeRestartNeeded { commit: c });
                };
                let Some(parent) = repo.resolve(&c)?.first_parent().map(str::to_string) else {
                    break 'segments;
                };
                if let Some(f) = &r.file {
                    file = f.clone();
                }
                (start, end) = (r.start_line, r.end_line);
                from = parent;
                continue 'segments;
            }
        }
        break;
    }
    Ok(out)
}
