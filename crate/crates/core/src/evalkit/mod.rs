//! Oracles, precision/recall scoring, the line-range baseline and timing.

mod baseline;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use baseline::{gitlog_baseline, BaselineRequest, RangeRestart};

use crate::error::{Error, Result};
use crate::tracker::{BlockTracker, Category, ChangeKind, Step};
use crate::wire::{EdgeDoc, GraphDocument};

pub const ORACLE_SCHEMA_VERSION: u32 = 1;

fn is_false(b: &bool) -> bool {
    !*b
}

/// One commit of a block's true history.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedChange {
    pub commit_id: String,
    pub change_types: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub before: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub after: Option<String>,
    /// Set on a terminal entry at the repository's first commit.
    #[serde(default, skip_serializing_if = "is_false")]
    pub existed_since_first_commit: bool,
}

/// Ground truth for one tracked block, newest commit first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleEntry {
    #[serde(rename = "schemaVersion")]
    pub schema_version: u32,
    pub repository: String,
    pub file: String,
    pub block_kind: String,
    pub block_key: String,
    pub expected: Vec<ExpectedChange>,
}

impl OracleEntry {
    pub fn from_json(text: &str) -> Result<Self> {
        let o: OracleEntry = serde_json::from_str(text)?;
        o.validate()?;
        Ok(o)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("oracles always serialize")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != ORACLE_SCHEMA_VERSION {
            return Err(Error::Invalid(format!(
                "unsupported oracle schema version {}",
                self.schema_version
            )));
        }
        if let Some(last) = self.expected.last() {
            let introduced = last.change_types.iter().any(|t| t == "introduced");
            if !introduced && !last.existed_since_first_commit {
                return Err(Error::Invalid(format!(
                    "terminal oracle entry {} is neither introduced nor at the first commit",
                    last.commit_id
                )));
            }
        }
        for e in &self.expected {
            for t in &e.change_types {
                if ChangeKind::from_tag(t).is_none() {
                    return Err(Error::Invalid(format!("unknown change type `{t}`")));
                }
            }
        }
        Ok(())
    }

    /// Oracle that accepts `doc` exactly as it is, e.g. after every node
    /// was confirmed by a reviewer.
    pub fn from_graph(doc: &GraphDocument, repository: &str) -> Self {
        let start = doc.start_node();
        let mut order: Vec<usize> = (0..doc.nodes.len()).collect();
        // newest first; RFC 3339 strings with one offset sort by time
        order.sort_by(|a, b| doc.nodes[*b].date.cmp(&doc.nodes[*a].date));
        let expected = order
            .into_iter()
            .map(|i| {
                let incoming: Vec<&EdgeDoc> = doc.edges.iter().filter(|e| e.to == i).collect();
                let mut tags: Vec<String> = Vec::new();
                for e in &incoming {
                    for c in &e.changes {
                        let t = c.kind.tag();
                        if !tags.contains(&t) {
                            tags.push(t);
                        }
                    }
                }
                let before = incoming
                    .iter()
                    .find_map(|e| e.from)
                    .map(|f| doc.nodes[f].signature.clone());
                ExpectedChange {
                    commit_id: doc.nodes[i].commit_id.clone(),
                    change_types: tags,
                    before,
                    after: Some(doc.nodes[i].signature.clone()),
                    existed_since_first_commit: incoming.is_empty(),
                }
            })
            .collect();
        OracleEntry {
            schema_version: ORACLE_SCHEMA_VERSION,
            repository: repository.to_string(),
            file: start.map(|n| n.file.clone()).unwrap_or_default(),
            block_kind: start.map(|n| n.block_type.clone()).unwrap_or_default(),
            block_key: start.map(|n| n.signature.clone()).unwrap_or_default(),
            expected,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Commit,
    Change,
}

impl std::str::FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "commit" => Ok(Level::Commit),
            "change" => Ok(Level::Change),
            other => Err(Error::Invalid(format!("unknown level `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub level: Level,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

impl ScoreReport {
    /// Precision and recall from raw counts; an empty denominator gives 1.
    pub fn from_counts(level: Level, tp: usize, fp: usize, fn_: usize) -> Self {
        ScoreReport {
            level,
            tp,
            fp,
            fn_,
            precision: ratio(tp, tp + fp),
            recall: ratio(tp, tp + fn_),
        }
    }

    /// Sums counts of reports at the same level.
    pub fn aggregate<'a>(level: Level, reports: impl IntoIterator<Item = &'a ScoreReport>) -> Self {
        let (mut tp, mut fp, mut fn_) = (0, 0, 0);
        for r in reports {
            tp += r.tp;
            fp += r.fp;
            fn_ += r.fn_;
        }
        Self::from_counts(level, tp, fp, fn_)
    }

    pub fn is_perfect(&self) -> bool {
        self.fp == 0 && self.fn_ == 0
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScoreOptions {
    /// Score only the main line: at a merge, follow the first parent edge
    /// and ignore the other branches.
    pub baseline_fair: bool,
}

fn main_line(doc: &GraphDocument) -> (HashSet<usize>, Vec<&EdgeDoc>) {
    let mut nodes = HashSet::new();
    let mut edges = Vec::new();
    let mut cur = doc.start;
    while doc.nodes.get(cur).is_some() && nodes.insert(cur) {
        let incoming: Vec<&EdgeDoc> = doc.edges.iter().filter(|e| e.to == cur).collect();
        edges.extend(incoming.iter().filter(|e| e.from.is_none()).copied());
        match incoming.iter().find(|e| e.from.is_some()) {
            Some(e) => {
                edges.push(e);
                cur = e.from.expect("checked");
            }
            None => break,
        }
    }
    (nodes, edges)
}

/// Compares a tracked history with its oracle.
pub fn score(history: &GraphDocument, oracle: &OracleEntry, level: Level) -> Result<ScoreReport> {
    score_with(history, oracle, level, ScoreOptions::default())
}

pub fn score_with(
    history: &GraphDocument,
    oracle: &OracleEntry,
    level: Level,
    opts: ScoreOptions,
) -> Result<ScoreReport> {
    if let Some(start) = history.start_node() {
        if start.block_type != oracle.block_kind {
            return Err(Error::MismatchedElement {
                history: format!("{} {}", start.block_type, start.signature),
                oracle: format!("{} {}", oracle.block_kind, oracle.block_key),
            });
        }
    }
    let (nodes, edges): (Vec<usize>, Vec<&EdgeDoc>) = if opts.baseline_fair {
        let (n, e) = main_line(history);
        (n.into_iter().collect(), e)
    } else {
        ((0..history.nodes.len()).collect(), history.edges.iter().collect())
    };
    let (found, truth): (BTreeSet<(String, String)>, BTreeSet<(String, String)>) = match level {
        Level::Commit => (
            nodes
                .iter()
                .map(|&i| (history.nodes[i].commit_id.clone(), String::new()))
                .collect(),
            oracle
                .expected
                .iter()
                .map(|e| (e.commit_id.clone(), String::new()))
                .collect(),
        ),
        Level::Change => (
            edges
                .iter()
                .flat_map(|e| {
                    let commit = history.nodes[e.to].commit_id.clone();
                    e.changes.iter().map(move |c| (commit.clone(), c.kind.tag()))
                })
                .collect(),
            oracle
                .expected
                .iter()
                .flat_map(|e| e.change_types.iter().map(move |t| (e.commit_id.clone(), t.clone())))
                .collect(),
        ),
    };
    let tp = found.intersection(&truth).count();
    Ok(ScoreReport::from_counts(level, tp, found.len() - tp, truth.len() - tp))
}

/// Commit-level score of a plain list of commits, e.g. a baseline's output.
pub fn score_commits(found: &[String], oracle: &OracleEntry) -> ScoreReport {
    let found: BTreeSet<&str> = found.iter().map(String::as_str).collect();
    let truth: BTreeSet<&str> = oracle.expected.iter().map(|e| e.commit_id.as_str()).collect();
    let tp = found.intersection(&truth).count();
    ScoreReport::from_counts(Level::Commit, tp, found.len() - tp, truth.len() - tp)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommitTiming {
    pub commit: String,
    pub ms: f64,
    pub step: Step,
    pub category: Category,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CategoryStat {
    pub commits: usize,
    pub ms: f64,
    /// Share of the summed per-commit time.
    pub time_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingReport {
    pub total_ms: f64,
    pub processed: usize,
    pub commits: Vec<CommitTiming>,
    pub categories: BTreeMap<Category, CategoryStat>,
}

impl TimingReport {
    /// Every processed commit falls in exactly one category.
    pub fn is_conserved(&self) -> bool {
        self.categories.values().map(|c| c.commits).sum::<usize>() == self.processed
            && self.commits.len() == self.processed
    }
}

/// Runs one tracking session and reports where the time went.
pub fn time_session(tracker: &BlockTracker<'_>) -> Result<TimingReport> {
    let t0 = Instant::now();
    let (_, log) = tracker.track_with_log()?;
    let total_ms = t0.elapsed().as_secs_f64() * 1e3;
    let commits: Vec<CommitTiming> = log
        .entries
        .iter()
        .map(|e| CommitTiming {
            commit: e.commit.clone(),
            ms: e.elapsed.as_secs_f64() * 1e3,
            step: e.step,
            category: e.category,
        })
        .collect();
    let summed: f64 = commits.iter().map(|c| c.ms).sum();
    let mut categories: BTreeMap<Category, CategoryStat> = [Category::NoChange, Category::Change, Category::Move]
        .into_iter()
        .map(|c| (c, CategoryStat::default()))
        .collect();
    for c in &commits {
        let s = categories.get_mut(&c.category).expect("all categories present");
        s.commits += 1;
        s.ms += c.ms;
    }
    for s in categories.values_mut() {
        s.time_fraction = if summed > 0.0 { s.ms / summed } else { 0.0 };
    }
    Ok(TimingReport {
        total_ms,
        processed: commits.len(),
        commits,
        categories,
    })
}
