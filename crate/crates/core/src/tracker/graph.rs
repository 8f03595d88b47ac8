use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::gitio::CommitRef;
use crate::srcmodel::{BlockIdentifier, StatementKind};

/// Kind of change attached to a history edge.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ChangeKind {
    Introduced,
    BodyChange,
    ExpressionChange,
    CatchBlockChange,
    CatchBlockAdded,
    CatchBlockRemoved,
    FinallyBlockChange,
    FinallyBlockAdded,
    FinallyBlockRemoved,
    BlockSplit,
    BlockMerge,
    ReplaceLoopWithPipeline,
    ReplacePipelineWithLoop,
    /// Payload names the migration, e.g. `if-to-while`.
    BlockTypeMigration(String),
}

impl ChangeKind {
    pub fn tag(&self) -> String {
        let s = match self {
            ChangeKind::Introduced => "introduced",
            ChangeKind::BodyChange => "body-change",
            ChangeKind::ExpressionChange => "expression-change",
            ChangeKind::CatchBlockChange => "catch-block-change",
            ChangeKind::CatchBlockAdded => "catch-block-added",
            ChangeKind::CatchBlockRemoved => "catch-block-removed",
            ChangeKind::FinallyBlockChange => "finally-block-change",
            ChangeKind::FinallyBlockAdded => "finally-block-added",
            ChangeKind::FinallyBlockRemoved => "finally-block-removed",
            ChangeKind::BlockSplit => "block-split",
            ChangeKind::BlockMerge => "block-merge",
            ChangeKind::ReplaceLoopWithPipeline => "replace-loop-with-pipeline",
            ChangeKind::ReplacePipelineWithLoop => "replace-pipeline-with-loop",
            ChangeKind::BlockTypeMigration(k) => return format!("block-type-migration({k})"),
        };
        s.to_string()
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        let k = match tag {
            "introduced" => ChangeKind::Introduced,
            "body-change" => ChangeKind::BodyChange,
            "expression-change" => ChangeKind::ExpressionChange,
            "catch-block-change" => ChangeKind::CatchBlockChange,
            "catch-block-added" => ChangeKind::CatchBlockAdded,
            "catch-block-removed" => ChangeKind::CatchBlockRemoved,
            "finally-block-change" => ChangeKind::FinallyBlockChange,
            "finally-block-added" => ChangeKind::FinallyBlockAdded,
            "finally-block-removed" => ChangeKind::FinallyBlockRemoved,
            "block-split" => ChangeKind::BlockSplit,
            "block-merge" => ChangeKind::BlockMerge,
            "replace-loop-with-pipeline" => ChangeKind::ReplaceLoopWithPipeline,
            "replace-pipeline-with-loop" => ChangeKind::ReplacePipelineWithLoop,
            other => {
                let inner = other
                    .strip_prefix("block-type-migration(")?
                    .strip_suffix(')')?;
                ChangeKind::BlockTypeMigration(inner.to_string())
            }
        };
        Some(k)
    }

    pub fn is_try_only(&self) -> bool {
        matches!(
            self,
            ChangeKind::CatchBlockChange
                | ChangeKind::CatchBlockAdded
                | ChangeKind::CatchBlockRemoved
                | ChangeKind::FinallyBlockChange
                | ChangeKind::FinallyBlockAdded
                | ChangeKind::FinallyBlockRemoved
        )
    }
}

impl fmt::Display for ChangeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag())
    }
}

impl Serialize for ChangeKind {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.tag())
    }
}

impl<'de> Deserialize<'de> for ChangeKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        ChangeKind::from_tag(&s).ok_or_else(|| serde::de::Error::custom(format!("unknown change type `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Change {
    #[serde(rename = "type")]
    pub kind: ChangeKind,
    pub description: String,
}

impl Change {
    pub fn new(kind: ChangeKind, description: impl Into<String>) -> Self {
        Change {
            kind,
            description: description.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistoryNode {
    pub element: BlockIdentifier,
    pub commit: CommitRef,
    pub file: String,
    pub start_line: usize,
    pub end_line: usize,
    /// True when the tracked element is a stream-pipeline statement.
    pub pipeline: bool,
    pub diagnostics: Vec<String>,
    pub evolution_hook: Option<String>,
}

impl HistoryNode {
    /// Block type as shown to users.
    pub fn block_type(&self) -> String {
        if self.pipeline {
            "pipeline".to_string()
        } else {
            self.element.block_type.as_str().to_string()
        }
    }

    pub fn kind(&self) -> StatementKind {
        self.element.block_type
    }
}

/// Edge from an older node (or nothing, for introductions) to a newer one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HistoryEdge {
    pub from: Option<usize>,
    pub to: usize,
    pub changes: Vec<Change>,
}

/// The change history of one block. Node 0 is not necessarily the start;
/// see [`ChangeHistoryGraph::start`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChangeHistoryGraph {
    pub start: usize,
    pub nodes: Vec<HistoryNode>,
    pub edges: Vec<HistoryEdge>,
}

impl ChangeHistoryGraph {
    pub fn start_node(&self) -> Option<&HistoryNode> {
        self.nodes.get(self.start)
    }

    /// Index of the node with this commit and signature, inserting it if new.
    pub fn intern(&mut self, node: HistoryNode) -> usize {
        let sig = node.element.signature();
        if let Some(i) = self
            .nodes
            .iter()
            .position(|n| n.commit.id == node.commit.id && n.element.signature() == sig)
        {
            return i;
        }
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    pub fn add_edge(&mut self, from: Option<usize>, to: usize, changes: Vec<Change>) {
        if let Some(e) = self.edges.iter_mut().find(|e| e.from == from && e.to == to) {
            for c in changes {
                if !e.changes.contains(&c) {
                    e.changes.push(c);
                }
            }
            return;
        }
        self.edges.push(HistoryEdge { from, to, changes });
    }

    pub fn incoming(&self, node: usize) -> impl Iterator<Item = &HistoryEdge> {
        self.edges.iter().filter(move |e| e.to == node)
    }

    /// Commits that carry at least one change, newest first by graph order.
    pub fn change_commits(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        for e in &self.edges {
            let c = self.nodes[e.to].commit.id.as_str();
            if !e.changes.is_empty() && !seen.contains(&c) {
                seen.push(c);
            }
        }
        seen
    }

    /// All (commit, change) pairs.
    pub fn change_pairs(&self) -> Vec<(String, ChangeKind)> {
        let mut out = Vec::new();
        for e in &self.edges {
            for c in &e.changes {
                let pair = (self.nodes[e.to].commit.id.clone(), c.kind.clone());
                if !out.contains(&pair) {
                    out.push(pair);
                }
            }
        }
        out
    }

    /// Nodes sorted newest first (by authored date, then insertion order).
    pub fn chronological(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.nodes.len()).collect();
        idx.sort_by(|&a, &b| {
            self.nodes[b]
                .commit
                .authored_at
                .cmp(&self.nodes[a].commit.authored_at)
                .then(a.cmp(&b))
        });
        idx
    }

    /// Number of parents (older nodes) per node.
    pub fn in_degrees(&self) -> HashMap<usize, usize> {
        let mut m = HashMap::new();
        for e in &self.edges {
            if e.from.is_some() {
                *m.entry(e.to).or_default() += 1;
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tags_round_trip() {
        let all = [
            ChangeKind::Introduced,
            ChangeKind::BodyChange,
            ChangeKind::ExpressionChange,
            ChangeKind::CatchBlockChange,
            ChangeKind::CatchBlockAdded,
            ChangeKind::CatchBlockRemoved,
            ChangeKind::FinallyBlockChange,
            ChangeKind::FinallyBlockAdded,
            ChangeKind::FinallyBlockRemoved,
            ChangeKind::BlockSplit,
            ChangeKind::BlockMerge,
            ChangeKind::ReplaceLoopWithPipeline,
            ChangeKind::ReplacePipelineWithLoop,
            ChangeKind::BlockTypeMigration("if-to-while".into()),
        ];
        for k in all {
            assert_eq!(ChangeKind::from_tag(&k.tag()), Some(k.clone()));
            let json = serde_json::to_string(&k).unwrap();
            assert_eq!(serde_json::from_str::<ChangeKind>(&json).unwrap(), k);
        }
        assert_eq!(ChangeKind::from_tag("rename"), None);
    }
}
