//! Review sessions: a tracked graph plus a reviewer's verdict per commit.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use blocktrace::evalkit::OracleEntry;
use blocktrace::tracker::Change;
use blocktrace::wire::{EdgeDoc, GraphDocument};

use crate::TrackRequest;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictKind {
    Confirm,
    Reject,
}

/// The block a rejected commit's older side should have been matched to,
/// located in the parent of that commit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Correction {
    pub file: String,
    pub block_type: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ValidationDecision {
    pub commit_id: String,
    pub verdict: VerdictKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correction: Option<Correction>,
}

/// Review state of one commit; commits without an entry are pending.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Confirmed,
    RejectedCorrected,
    RejectedUnresolved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SessionState {
    Active,
    Unresolved,
    Complete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Session {
    pub id: String,
    /// Checkout the session was tracked in.
    pub repository: String,
    pub request: TrackRequest,
    pub state: SessionState,
    pub graph: GraphDocument,
    pub verdicts: BTreeMap<String, Verdict>,
    pub decisions: Vec<ValidationDecision>,
    /// Truth accumulated so far: the accepted part of the graph.
    pub oracle: OracleEntry,
}

impl Session {
    pub fn new(id: String, repository: String, request: TrackRequest, graph: GraphDocument) -> Self {
        let oracle = OracleEntry::from_graph(&GraphDocument::default(), &repository);
        let mut s = Session {
            id,
            repository,
            request,
            state: SessionState::Active,
            graph,
            verdicts: BTreeMap::new(),
            decisions: Vec::new(),
            oracle,
        };
        s.refresh();
        s
    }

    /// First node of `commit`, if the graph has one.
    pub fn node_of(&self, commit: &str) -> Option<usize> {
        self.graph.nodes.iter().position(|n| n.commit_id == commit)
    }

    pub fn record(&mut self, decision: ValidationDecision, verdict: Verdict) {
        self.verdicts.insert(decision.commit_id.clone(), verdict);
        self.decisions.push(decision);
        self.refresh();
    }

    /// Recomputes derived state after the graph or the verdicts changed.
    pub fn refresh(&mut self) {
        let live: HashSet<&str> = self.graph.nodes.iter().map(|n| n.commit_id.as_str()).collect();
        self.verdicts.retain(|c, _| live.contains(c.as_str()));
        self.state = if self.verdicts.values().any(|v| *v == Verdict::RejectedUnresolved) {
            SessionState::Unresolved
        } else if live.iter().all(|c| self.verdicts.contains_key(*c)) {
            SessionState::Complete
        } else {
            SessionState::Active
        };
        let mut oracle = OracleEntry::from_graph(&self.graph, &self.repository);
        oracle.expected.retain(|e| {
            matches!(
                self.verdicts.get(&e.commit_id),
                Some(Verdict::Confirmed | Verdict::RejectedCorrected)
            )
        });
        self.oracle = oracle;
    }

    fn path_in(dir: &Path, id: &str) -> PathBuf {
        dir.join(format!("{id}.json"))
    }

    /// Writes the session and its oracle next to each other.
    pub fn checkpoint(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let write = |path: PathBuf, text: String| -> std::io::Result<()> {
            // write-then-rename keeps the previous checkpoint on failure
            let tmp = path.with_extension("tmp");
            std::fs::write(&tmp, text)?;
            std::fs::rename(tmp, path)
        };
        let text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        write(Self::path_in(dir, &self.id), text)?;
        write(dir.join(format!("{}.oracle.json", self.id)), self.oracle.to_json())
    }

    /// Sessions checkpointed in `dir`; unreadable files are skipped.
    pub fn load_all(dir: &Path) -> Vec<Session> {
        let Ok(entries) = std::fs::read_dir(dir) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for e in entries.flatten() {
            let p = e.path();
            let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
            if !name.ends_with(".json") || name.ends_with(".oracle.json") {
                continue;
            }
            match std::fs::read_to_string(&p).map(|t| serde_json::from_str::<Session>(&t)) {
                Ok(Ok(s)) => out.push(s),
                _ => tracing::warn!(path = %p.display(), "skipping unreadable session checkpoint"),
            }
        }
        out
    }
}

/// Replaces the history older than node `at` with `older`, whose start
/// node becomes the origin of `at` through an edge carrying `changes`.
///
/// Nodes reachable from the graph's start only through `at`'s old incoming
/// edges are dropped. Nodes of `older` already present (same commit and
/// signature) are reused.
pub fn splice(doc: &mut GraphDocument, at: usize, older: &GraphDocument, changes: Vec<Change>) {
    doc.edges.retain(|e| e.to != at);
    let mut keep: HashSet<usize> = HashSet::from([doc.start]);
    let mut stack = vec![doc.start];
    while let Some(n) = stack.pop() {
        for e in doc.edges.iter().filter(|e| e.to == n) {
            if let Some(f) = e.from {
                if keep.insert(f) {
                    stack.push(f);
                }
            }
        }
    }
    keep.insert(at);
    let mut remap: Vec<Option<usize>> = vec![None; doc.nodes.len()];
    let mut nodes = Vec::new();
    for (i, n) in doc.nodes.drain(..).enumerate() {
        if keep.contains(&i) {
            remap[i] = Some(nodes.len());
            nodes.push(n);
        }
    }
    let mut edges: Vec<EdgeDoc> = doc
        .edges
        .drain(..)
        .filter_map(|e| {
            Some(EdgeDoc {
                from: match e.from {
                    Some(f) => Some(remap[f]?),
                    None => None,
                },
                to: remap[e.to]?,
                changes: e.changes,
            })
        })
        .collect();
    let older_map: Vec<usize> = older
        .nodes
        .iter()
        .map(|n| {
            match nodes
                .iter()
                .position(|x| x.commit_id == n.commit_id && x.signature == n.signature)
            {
                Some(i) => i,
                None => {
                    nodes.push(n.clone());
                    nodes.len() - 1
                }
            }
        })
        .collect();
    let mut add = |from: Option<usize>, to: usize, changes: Vec<Change>| {
        match edges.iter_mut().find(|e| e.from == from && e.to == to) {
            Some(e) => {
                for c in changes {
                    if !e.changes.contains(&c) {
                        e.changes.push(c);
                    }
                }
            }
            None => edges.push(EdgeDoc { from, to, changes }),
        }
    };
    for e in &older.edges {
        add(e.from.map(|f| older_map[f]), older_map[e.to], e.changes.clone());
    }
    let at = remap[at].expect("spliced node is kept");
    if let Some(&origin) = older_map.get(older.start) {
        add(Some(origin), at, changes);
    }
    doc.start = remap[doc.start].expect("start is kept");
    doc.nodes = nodes;
    doc.edges = edges;
}
