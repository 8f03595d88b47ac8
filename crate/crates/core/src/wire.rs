//! The JSON shape of a change history, shared by every consumer.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::tracker::{Change, ChangeHistoryGraph};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct NodeDoc {
    pub commit_id: String,
    pub author: String,
    /// RFC 3339 author date.
    pub date: String,
    pub block_type: String,
    pub file: String,
    pub start_line: usize,
    pub end_line: usize,
    /// Block identity without the commit.
    pub signature: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evolution_hook: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDoc {
    /// `None` for the introducing edge.
    pub from: Option<usize>,
    pub to: usize,
    pub changes: Vec<Change>,
}

/// Serialized change history. Edge endpoints index into `nodes`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub start: usize,
    pub nodes: Vec<NodeDoc>,
    pub edges: Vec<EdgeDoc>,
}

impl From<&ChangeHistoryGraph> for GraphDocument {
    fn from(g: &ChangeHistoryGraph) -> Self {
        GraphDocument {
            start: g.start,
            nodes: g
                .nodes
                .iter()
                .map(|n| NodeDoc {
                    commit_id: n.commit.id.clone(),
                    author: n.commit.author.clone(),
                    date: n.commit.authored_at.to_rfc3339(),
                    block_type: n.block_type(),
                    file: n.file.clone(),
                    start_line: n.start_line,
                    end_line: n.end_line,
                    signature: n.element.signature(),
                    diagnostics: n.diagnostics.clone(),
                    evolution_hook: n.evolution_hook.clone(),
                })
                .collect(),
            edges: g
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    from: e.from,
                    to: e.to,
                    changes: e.changes.clone(),
                })
                .collect(),
        }
    }
}

impl GraphDocument {
    pub fn start_node(&self) -> Option<&NodeDoc> {
        self.nodes.get(self.start)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph documents always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// The one serializer used by the CLI and the HTTP service.
pub fn to_json(graph: &ChangeHistoryGraph) -> String {
    GraphDocument::from(graph).to_json()
}
