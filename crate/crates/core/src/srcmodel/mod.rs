//! Parsed Java source: types, methods and statement trees.

mod identifier;
mod parse;
pub mod tokens;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

pub use identifier::{block_identifier, BlockIdentifier, ContainerChain, NodePath};
pub use parse::{essential_text, parse_file, parse_snippet};
pub use tokens::{content_hash, Token, TokenCategory};

use crate::error::{Error, ParseError, Result};
use crate::gitio::Repository;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StatementKind {
    If,
    For,
    EnhancedFor,
    While,
    DoWhile,
    Try,
    Catch,
    Finally,
    Switch,
    Synchronized,
    Block,
    Leaf,
}

impl StatementKind {
    pub const TRACKABLE: [StatementKind; 10] = [
        StatementKind::If,
        StatementKind::For,
        StatementKind::EnhancedFor,
        StatementKind::While,
        StatementKind::DoWhile,
        StatementKind::Try,
        StatementKind::Catch,
        StatementKind::Finally,
        StatementKind::Switch,
        StatementKind::Synchronized,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StatementKind::If => "if",
            StatementKind::For => "for",
            StatementKind::EnhancedFor => "enhanced-for",
            StatementKind::While => "while",
            StatementKind::DoWhile => "do-while",
            StatementKind::Try => "try",
            StatementKind::Catch => "catch",
            StatementKind::Finally => "finally",
            StatementKind::Switch => "switch",
            StatementKind::Synchronized => "synchronized",
            StatementKind::Block => "block",
            StatementKind::Leaf => "statement",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        let k = match s {
            "if" => StatementKind::If,
            "for" => StatementKind::For,
            "enhanced-for" | "enhanced_for" | "foreach" => StatementKind::EnhancedFor,
            "while" => StatementKind::While,
            "do-while" | "do_while" | "do" => StatementKind::DoWhile,
            "try" => StatementKind::Try,
            "catch" => StatementKind::Catch,
            "finally" => StatementKind::Finally,
            "switch" => StatementKind::Switch,
            "synchronized" => StatementKind::Synchronized,
            "block" => StatementKind::Block,
            "statement" | "pipeline" => StatementKind::Leaf,
            _ => return None,
        };
        Some(k)
    }

    pub fn is_composite(self) -> bool {
        self != StatementKind::Leaf
    }

    pub fn is_loop(self) -> bool {
        matches!(
            self,
            StatementKind::For
                | StatementKind::EnhancedFor
                | StatementKind::While
                | StatementKind::DoWhile
        )
    }

    pub fn is_trackable(self) -> bool {
        Self::TRACKABLE.contains(&self)
    }
}

impl fmt::Display for StatementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One statement (or structural clause) of a method body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatementNode {
    pub kind: StatementKind,
    /// Normalized header expressions (condition, for-header parts, resources, ...).
    pub expressions: Vec<String>,
    pub children: Vec<StatementNode>,
    pub start_line: usize,
    pub end_line: usize,
    /// Normalized text of the whole statement.
    pub text: String,
    pub text_hash: u64,
    /// Tokens of leaf statements; empty for composites.
    pub tokens: Vec<Token>,
    /// Set on the node holding an `else` branch of its parent `if`.
    pub is_else: bool,
}

impl StatementNode {
    pub fn is_leaf(&self) -> bool {
        self.kind == StatementKind::Leaf
    }

    /// Children that form the block body proper (a try's catch and
    /// finally clauses are excluded).
    pub fn body_children(&self) -> impl Iterator<Item = &StatementNode> {
        let is_try = self.kind == StatementKind::Try;
        self.children.iter().filter(move |c| {
            !(is_try && matches!(c.kind, StatementKind::Catch | StatementKind::Finally))
        })
    }

    /// Normalized body text; a leaf's body is its own text.
    pub fn body_text(&self) -> String {
        if self.is_leaf() {
            return self.text.clone();
        }
        let parts: Vec<&str> = self.body_children().map(|c| c.text.as_str()).collect();
        parts.join(" ")
    }

    pub fn body_hash(&self) -> u64 {
        content_hash(&self.body_text())
    }

    /// Number of nodes in this subtree, itself included.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(StatementNode::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.children.iter().map(StatementNode::height).max().unwrap_or(0)
    }

    pub fn node_at(&self, path: &[usize]) -> Option<&StatementNode> {
        let mut cur = self;
        for &i in path {
            cur = cur.children.get(i)?;
        }
        Some(cur)
    }

    /// Preorder walk over descendants (not self) with their paths.
    pub fn descendants(&self) -> Vec<(NodePath, &StatementNode)> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        fn rec<'a>(
            n: &'a StatementNode,
            path: &mut Vec<usize>,
            out: &mut Vec<(NodePath, &'a StatementNode)>,
        ) {
            for (i, c) in n.children.iter().enumerate() {
                path.push(i);
                out.push((NodePath(path.clone()), c));
                rec(c, path, out);
                path.pop();
            }
        }
        rec(self, &mut path, &mut out);
        out
    }

    /// True for leaf statements expressed as a stream pipeline.
    pub fn is_pipeline(&self) -> bool {
        self.is_leaf()
            && (self.text.contains(". stream ( )")
                || self.text.contains(". forEach (")
                || self.text.contains(". parallelStream ( )"))
    }
}

/// Identity of a type declaration within a commit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TypeKey {
    pub source_folder: String,
    pub package: String,
    /// Enclosing type names, outermost first.
    pub nesting_chain: Vec<String>,
    pub name: String,
}

impl TypeKey {
    /// Dot-joined qualified name, without the source folder.
    pub fn qualified_name(&self) -> String {
        let mut parts: Vec<&str> = Vec::new();
        if !self.package.is_empty() {
            parts.push(&self.package);
        }
        parts.extend(self.nesting_chain.iter().map(String::as_str));
        parts.push(&self.name);
        parts.join(".")
    }

    /// Identity across commits ignores the source folder.
    pub fn identity(&self) -> (String, Vec<String>, String) {
        (
            self.package.clone(),
            self.nesting_chain.clone(),
            self.name.clone(),
        )
    }
}

impl fmt::Display for TypeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.qualified_name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MethodSignature {
    pub name: String,
    pub parameter_types: Vec<String>,
    /// `None` for constructors.
    pub return_type: Option<String>,
}

impl fmt::Display for MethodSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name, self.parameter_types.join(", "))?;
        if let Some(r) = &self.return_type {
            write!(f, ": {r}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDeclarationInfo {
    pub signature: MethodSignature,
    pub container: TypeKey,
    pub path: String,
    /// Body root (kind `Block`). Abstract methods have an empty body.
    pub body: StatementNode,
    pub has_body: bool,
    pub body_hash: u64,
    pub start_line: usize,
    pub end_line: usize,
}

impl MethodDeclarationInfo {
    pub fn name(&self) -> &str {
        &self.signature.name
    }

    pub fn is_constructor(&self) -> bool {
        self.signature.return_type.is_none()
    }

    pub fn node_at(&self, path: &NodePath) -> Option<&StatementNode> {
        if path.0.is_empty() {
            return None;
        }
        self.body.node_at(&path.0)
    }

    /// `pkg.Outer.Inner::name(params)`.
    pub fn qualified_signature(&self) -> String {
        format!("{}::{}", self.container, self.signature)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TypeKind {
    Class,
    Interface,
    Enum,
    Record,
    Annotation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDeclarationInfo {
    pub key: TypeKey,
    pub kind: TypeKind,
    pub path: String,
    /// Simple name of the declared superclass, if any.
    pub superclass: Option<String>,
    pub methods: Vec<MethodDeclarationInfo>,
    pub start_line: usize,
    pub end_line: usize,
}

/// Parsed files of one commit. May be partial: only the files some
/// detection step needed.
#[derive(Debug, Clone, Default)]
pub struct SourceModel {
    pub commit: String,
    pub files: BTreeMap<String, Arc<Vec<TypeDeclarationInfo>>>,
}

impl SourceModel {
    pub fn new(commit: impl Into<String>) -> Self {
        SourceModel {
            commit: commit.into(),
            files: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, path: impl Into<String>, types: Arc<Vec<TypeDeclarationInfo>>) {
        self.files.insert(path.into(), types);
    }

    pub fn types(&self) -> impl Iterator<Item = &TypeDeclarationInfo> {
        self.files.values().flat_map(|v| v.iter())
    }

    pub fn methods(&self) -> impl Iterator<Item = &MethodDeclarationInfo> {
        self.types().flat_map(|t| t.methods.iter())
    }

    pub fn types_in(&self, path: &str) -> &[TypeDeclarationInfo] {
        self.files.get(path).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn find_type(&self, key: &TypeKey) -> Option<&TypeDeclarationInfo> {
        self.types().find(|t| &t.key == key)
    }

    pub fn find_method(&self, key: &TypeKey, sig: &MethodSignature) -> Option<&MethodDeclarationInfo> {
        self.find_type(key)?
            .methods
            .iter()
            .find(|m| &m.signature == sig)
    }
}

/// Finds the block of `kind` whose first line is `line`.
pub fn locate_block<'a>(
    types: &'a [TypeDeclarationInfo],
    path: &str,
    kind: StatementKind,
    line: usize,
) -> Result<(&'a MethodDeclarationInfo, NodePath)> {
    for t in types {
        for m in &t.methods {
            if line < m.start_line || line > m.end_line {
                continue;
            }
            for (p, n) in m.body.descendants() {
                if n.kind == kind && n.start_line == line {
                    return Ok((m, p));
                }
            }
        }
    }
    Err(Error::CodeElementNotFound {
        path: path.to_string(),
        kind: kind.as_str().to_string(),
        line,
    })
}

/// Kind of the first trackable block starting on `line`, if any.
pub fn block_kind_at(types: &[TypeDeclarationInfo], line: usize) -> Option<StatementKind> {
    types
        .iter()
        .flat_map(|t| t.methods.iter())
        .filter(|m| m.start_line <= line && line <= m.end_line)
        .flat_map(|m| m.body.descendants())
        .find(|(_, n)| n.start_line == line && n.kind.is_trackable())
        .map(|(_, n)| n.kind)
}

/// Words a user may select to designate a block of `kind`.
fn keywords(kind: StatementKind) -> &'static [&'static str] {
    match kind {
        StatementKind::If => &["if"],
        StatementKind::For | StatementKind::EnhancedFor => &["for"],
        StatementKind::While => &["while"],
        StatementKind::DoWhile => &["do", "while"],
        StatementKind::Try => &["try"],
        StatementKind::Catch => &["catch"],
        StatementKind::Finally => &["finally"],
        StatementKind::Switch => &["switch"],
        StatementKind::Synchronized => &["synchronized"],
        StatementKind::Block | StatementKind::Leaf => &[],
    }
}

/// Reported type of the block a user points at, `None` when nothing
/// trackable starts on `line` or `selection` does not name it.
///
/// A selection must be a keyword of the block (`if`, `catch`, ...); for a
/// stream pipeline any identifier of the statement is accepted. An empty
/// selection only checks the line.
pub fn element_type_at(types: &[TypeDeclarationInfo], line: usize, selection: Option<&str>) -> Option<&'static str> {
    let sel = selection.map(str::trim).filter(|s| !s.is_empty());
    if let Some(s) = sel {
        if !s.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '$') {
            return None;
        }
    }
    let candidates = types
        .iter()
        .flat_map(|t| t.methods.iter())
        .filter(|m| m.start_line <= line && line <= m.end_line)
        .flat_map(|m| m.body.descendants())
        .filter(|(_, n)| n.start_line == line)
        .map(|(_, n)| n);
    for n in candidates {
        if n.is_pipeline() {
            let ok = sel.is_none_or(|s| n.tokens.iter().any(|t| t.text == s));
            if ok {
                return Some("pipeline");
            }
        } else if n.kind.is_trackable() && sel.is_none_or(|s| keywords(n.kind).contains(&s)) {
            return Some(n.kind.as_str());
        }
    }
    None
}

pub type ParsedFile = Arc<Vec<TypeDeclarationInfo>>;

/// Memoized parses of `(commit, path)` blobs.
pub struct ModelCache<'r> {
    repo: &'r Repository,
    parsed: Mutex<HashMap<(String, String), Option<Result<ParsedFile, ParseError>>>>,
}

impl<'r> ModelCache<'r> {
    pub fn new(repo: &'r Repository) -> Self {
        ModelCache {
            repo,
            parsed: Mutex::new(HashMap::new()),
        }
    }

    pub fn repo(&self) -> &'r Repository {
        self.repo
    }

    /// `Ok(None)` when the file does not exist at `commit`; a parse failure
    /// is reported as `Ok(Some(Err(..)))` so callers can decide how to
    /// degrade.
    pub fn load(&self, commit: &str, path: &str) -> Result<Option<Result<ParsedFile, ParseError>>> {
        let key = (commit.to_string(), path.to_string());
        if let Some(hit) = self.parsed.lock().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let parsed = self
            .repo
            .read_file(commit, path)?
            .map(|text| parse_file(path, &text).map(Arc::new));
        self.parsed
            .lock()
            .expect("cache lock")
            .insert(key, parsed.clone());
        Ok(parsed)
    }

    /// Parsed file or an error; missing files are `Ok(None)`.
    pub fn types(&self, commit: &str, path: &str) -> Result<Option<ParsedFile>> {
        match self.load(commit, path)? {
            None => Ok(None),
            Some(Ok(t)) => Ok(Some(t)),
            Some(Err(e)) => Err(Error::Parse(e)),
        }
    }
}
