//! Walks a file's history backwards and follows one block through every
//! commit that touched it.

mod classify;
mod graph;

use std::slice;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

pub use classify::classify_changes;
pub use graph::{Change, ChangeHistoryGraph, ChangeKind, HistoryEdge, HistoryNode};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::gitio::{CommitRef, Repository};
use crate::refdetect::{
    augment_models, detect_body_refactorings, detect_class_level, detect_inter_file, detect_intra_file,
    match_files, AugmentTarget, BodyRefactoringKind, ClassPairingKind, MethodPairing, PairingKind,
};
use crate::srcmodel::{
    block_identifier, locate_block, MethodDeclarationInfo, MethodSignature, ModelCache, NodePath, ParsedFile,
    StatementKind, TypeDeclarationInfo, TypeKey,
};
use crate::stmtmap::{map_bodies, MappingSet};

/// Which step resolved a commit pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Step {
    /// The commit has no parent.
    Root,
    UnchangedMethod,
    SameSignature,
    SameFile,
    OtherFile,
}

impl Step {
    pub fn category(self) -> Category {
        match self {
            Step::Root | Step::UnchangedMethod => Category::NoChange,
            Step::SameSignature | Step::SameFile => Category::Change,
            Step::OtherFile => Category::Move,
        }
    }
}

/// Coarse cost bucket of a resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    NoChange,
    Change,
    Move,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub commit: String,
    pub step: Step,
    pub category: Category,
    /// `unchanged`, `changed`, `fork`, `introduced` or `root`.
    pub outcome: String,
    #[serde(with = "duration_micros")]
    pub elapsed: Duration,
}

mod duration_micros {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_micros() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        Ok(Duration::from_micros(u64::deserialize(d)?))
    }
}

/// One entry per processed commit, in processing order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SessionLog {
    pub entries: Vec<LogEntry>,
}

/// Where the tracked block sits in some version of the code.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Location {
    path: String,
    container: TypeKey,
    signature: MethodSignature,
    node: NodePath,
}

impl Location {
    fn of(method: &MethodDeclarationInfo, node: NodePath) -> Self {
        Location {
            path: method.path.clone(),
            container: method.container.clone(),
            signature: method.signature.clone(),
            node,
        }
    }

    fn find<'a>(&self, types: &'a [TypeDeclarationInfo]) -> Option<&'a MethodDeclarationInfo> {
        types
            .iter()
            .filter(|t| t.key.identity() == self.container.identity())
            .flat_map(|t| t.methods.iter())
            .find(|m| m.signature == self.signature)
    }
}

enum Outcome {
    Continue {
        at: Location,
        changes: Vec<Change>,
        hook: Option<&'static str>,
    },
    Fork {
        lefts: Vec<(Location, Vec<Change>)>,
    },
    Introduced(String),
}

struct Cursor {
    commit: CommitRef,
    at: Location,
    /// Newer node still waiting for its older endpoint, with the changes
    /// that happened at its commit.
    pending: Option<(usize, Vec<Change>)>,
    diagnostics: Vec<String>,
}

/// Fluent entry point:
/// `BlockTracker::builder().repository(&repo).file("A.java").kind(If).line(12).build()?.track()`.
#[derive(Debug, Clone)]
pub struct BlockTracker<'r> {
    repo: &'r Repository,
    file: String,
    kind: StatementKind,
    line: usize,
    start: String,
    config: Config,
}

#[derive(Debug, Clone, Default)]
pub struct BlockTrackerBuilder<'r> {
    repo: Option<&'r Repository>,
    file: Option<String>,
    kind: Option<StatementKind>,
    line: Option<usize>,
    start: Option<String>,
    config: Option<Config>,
}

impl<'r> BlockTrackerBuilder<'r> {
    pub fn repository(mut self, repo: &'r Repository) -> Self {
        self.repo = Some(repo);
        self
    }

    pub fn file(mut self, path: impl Into<String>) -> Self {
        self.file = Some(path.into());
        self
    }

    pub fn kind(mut self, kind: StatementKind) -> Self {
        self.kind = Some(kind);
        self
    }

    pub fn line(mut self, line: usize) -> Self {
        self.line = Some(line);
        self
    }

    /// Defaults to `HEAD`.
    pub fn start_commit(mut self, rev: impl Into<String>) -> Self {
        self.start = Some(rev.into());
        self
    }

    pub fn config(mut self, config: Config) -> Self {
        self.config = Some(config);
        self
    }

    pub fn build(self) -> Result<BlockTracker<'r>> {
        let missing = |what: &str| Error::Invalid(format!("tracker needs a {what}"));
        let config = self.config.unwrap_or_default();
        config.validate()?;
        Ok(BlockTracker {
            repo: self.repo.ok_or_else(|| missing("repository"))?,
            file: self.file.ok_or_else(|| missing("file path"))?,
            kind: self.kind.ok_or_else(|| missing("block kind"))?,
            line: self.line.ok_or_else(|| missing("start line"))?,
            start: self.start.unwrap_or_else(|| "HEAD".into()),
            config,
        })
    }
}

/// Shorthand for a default-configured tracker run.
pub fn track(
    repo: &Repository,
    file: &str,
    kind: StatementKind,
    line: usize,
    start: &str,
) -> Result<ChangeHistoryGraph> {
    BlockTracker::builder()
        .repository(repo)
        .file(file)
        .kind(kind)
        .line(line)
        .start_commit(start)
        .build()?
        .track()
}

/// A block addressed by where it starts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockAt {
    pub commit: String,
    pub file: String,
    pub kind: StatementKind,
    pub line: usize,
}

/// Changes between two versions of a block chosen by the caller, e.g. a
/// reviewer correcting which older block a newer one came from.
///
/// The enclosing method bodies are mapped first so that the classification
/// matches the tracker's; if the mapping pairs the blocks differently only
/// header and body texts are compared.
pub fn compare_blocks(repo: &Repository, older: &BlockAt, newer: &BlockAt, cfg: &Config) -> Result<Vec<Change>> {
    let cache = ModelCache::new(repo);
    let load = |b: &BlockAt| -> Result<ParsedFile> {
        let id = repo.resolve(&b.commit)?.id;
        cache.types(&id, &b.file)?.ok_or_else(|| Error::UnknownPath {
            path: b.file.clone(),
            commit: id,
        })
    };
    let (lt, rt) = (load(older)?, load(newer)?);
    let (lm, lp) = locate_block(&lt, &older.file, older.kind, older.line)?;
    let (rm, rp) = locate_block(&rt, &newer.file, newer.kind, newer.line)?;
    let mapping = map_bodies(lm, rm, &cfg.map_config())?;
    if let Some(sm) = mapping.for_right(&rp).filter(|sm| sm.left == lp) {
        return Ok(classify_changes(&lm.body, &lp, &rm.body, &rp, sm, &mapping));
    }
    let (Some(l), Some(r)) = (lm.node_at(&lp), rm.node_at(&rp)) else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    if l.expressions != r.expressions {
        out.push(Change::new(ChangeKind::ExpressionChange, format!("{} block header changed", r.kind)));
    }
    if l.body_text() != r.body_text() {
        out.push(Change::new(ChangeKind::BodyChange, format!("{} block body changed", r.kind)));
    }
    Ok(out)
}

impl<'r> BlockTracker<'r> {
    pub fn builder() -> BlockTrackerBuilder<'r> {
        BlockTrackerBuilder::default()
    }

    pub fn track(&self) -> Result<ChangeHistoryGraph> {
        self.track_with_log().map(|(g, _)| g)
    }

    /// Like [`track`](Self::track), also returning how each commit was
    /// resolved.
    pub fn track_with_log(&self) -> Result<(ChangeHistoryGraph, SessionLog)> {
        let start = self.repo.resolve(&self.start)?;
        let run = Run {
            repo: self.repo,
            cache: ModelCache::new(self.repo),
            cfg: &self.config,
            graph: ChangeHistoryGraph::default(),
            log: SessionLog::default(),
            started: false,
        };
        let types = run.cache.types(&start.id, &self.file)?.ok_or_else(|| Error::UnknownPath {
            path: self.file.clone(),
            commit: start.id.clone(),
        })?;
        let (method, node) = locate_block(&types, &self.file, self.kind, self.line)?;
        let cursor = Cursor {
            commit: start,
            at: Location::of(method, node),
            pending: None,
            diagnostics: Vec::new(),
        };
        run.drive(cursor)
    }
}

struct Run<'r, 'c> {
    repo: &'r Repository,
    cache: ModelCache<'r>,
    cfg: &'c Config,
    graph: ChangeHistoryGraph,
    log: SessionLog,
    started: bool,
}

fn same_method(a: &MethodDeclarationInfo, b: &MethodDeclarationInfo) -> bool {
    a.container.identity() == b.container.identity() && a.signature == b.signature && a.path == b.path
}

fn hook_for(kind: PairingKind) -> Option<&'static str> {
    match kind {
        PairingKind::Extracted | PairingKind::ExtractedAndMoved => Some("extracted"),
        PairingKind::Split => Some("split"),
        _ => None,
    }
}

/// Where the block at `right` came from according to one method pairing.
/// Several lefts mean the block was merged from several blocks.
fn resolve_in(
    left: &MethodDeclarationInfo,
    right: &MethodDeclarationInfo,
    mapping: &MappingSet,
    at: &NodePath,
) -> Option<Vec<(Location, Vec<Change>)>> {
    let node = right.node_at(at)?;
    let loc = |p: &NodePath| Location::of(left, p.clone());
    for rf in detect_body_refactorings(&left.body, &right.body, mapping) {
        if !rf.touches_right(at) {
            continue;
        }
        let one = |kind: ChangeKind, text: String| Some(vec![(loc(&rf.lefts[0]), vec![Change::new(kind, text)])]);
        match rf.kind {
            BodyRefactoringKind::ReplaceLoopWithPipeline => {
                return one(
                    ChangeKind::ReplaceLoopWithPipeline,
                    format!("loop replaced with pipeline at line {}", node.start_line),
                )
            }
            BodyRefactoringKind::ReplacePipelineWithLoop => {
                return one(
                    ChangeKind::ReplacePipelineWithLoop,
                    format!("pipeline replaced with {} loop at line {}", node.kind, node.start_line),
                )
            }
            BodyRefactoringKind::SplitConditional | BodyRefactoringKind::SplitCatch => {
                return one(ChangeKind::BlockSplit, format!("{} block split", node.kind))
            }
            BodyRefactoringKind::MergeConditional | BodyRefactoringKind::MergeCatch => {
                let text = format!("{} blocks merged into one", node.kind);
                return Some(
                    rf.lefts
                        .iter()
                        .map(|l| (loc(l), vec![Change::new(ChangeKind::BlockMerge, text.clone())]))
                        .collect(),
                );
            }
            BodyRefactoringKind::InvertCondition => {}
        }
    }
    let sm = mapping.for_right(at)?;
    let changes = classify_changes(&left.body, &sm.left, &right.body, at, sm, mapping);
    Some(vec![(loc(&sm.left), changes)])
}

/// Folds the hits of several pairings into one outcome.
fn combine(hits: Vec<(PairingKind, Vec<(Location, Vec<Change>)>)>, kind: StatementKind) -> Option<Outcome> {
    let sources = hits.len();
    let mut lefts: Vec<(Location, Vec<Change>, PairingKind)> = hits
        .into_iter()
        .flat_map(|(k, ls)| ls.into_iter().map(move |(l, c)| (l, c, k)))
        .collect();
    lefts.dedup_by(|a, b| a.0 == b.0);
    match lefts.len() {
        0 => None,
        1 => {
            let (at, changes, k) = lefts.pop().expect("one element");
            Some(Outcome::Continue {
                at,
                changes,
                hook: hook_for(k),
            })
        }
        _ => {
            let text = format!("{kind} block merged from duplicated code");
            Some(Outcome::Fork {
                lefts: lefts
                    .into_iter()
                    .map(|(l, c, _)| {
                        // one pairing with a multi-mapping keeps its own tags;
                        // several pairings mean duplicate code was merged
                        let c = if sources > 1 {
                            vec![Change::new(ChangeKind::BlockMerge, text.clone())]
                        } else {
                            c
                        };
                        (l, c)
                    })
                    .collect(),
            })
        }
    }
}

impl Run<'_, '_> {
    fn drive(mut self, first: Cursor) -> Result<(ChangeHistoryGraph, SessionLog)> {
        let mut stack = vec![first];
        while let Some(c) = stack.pop() {
            if let Err(e) = self.follow(c, &mut stack) {
                return Err(Error::Aborted {
                    partial: Box::new(self.graph),
                    source: Box::new(e),
                });
            }
        }
        Ok((self.graph, self.log))
    }

    /// Creates the node for `method`'s block at `commit` and links it to
    /// the cursor's pending newer node.
    fn emit(
        &mut self,
        cursor: &mut Cursor,
        commit: &CommitRef,
        method: &MethodDeclarationInfo,
        hook: Option<&str>,
    ) -> usize {
        let node = method
            .node_at(&cursor.at.node)
            .expect("location points at a node");
        let idx = self.graph.intern(HistoryNode {
            element: block_identifier(&commit.id, method, &cursor.at.node),
            commit: commit.clone(),
            file: cursor.at.path.clone(),
            start_line: node.start_line,
            end_line: node.end_line,
            pipeline: node.is_pipeline(),
            diagnostics: std::mem::take(&mut cursor.diagnostics),
            evolution_hook: hook.map(str::to_string),
        });
        match cursor.pending.take() {
            Some((newer, changes)) => self.graph.add_edge(Some(idx), newer, changes),
            None if !self.started => {
                self.graph.start = idx;
                self.started = true;
            }
            None => {}
        }
        idx
    }

    fn record(&mut self, commit: &str, step: Step, outcome: &str, t0: Instant) {
        self.log.entries.push(LogEntry {
            commit: commit.to_string(),
            step,
            category: step.category(),
            outcome: outcome.to_string(),
            elapsed: t0.elapsed(),
        });
    }

    fn follow(&mut self, mut cursor: Cursor, stack: &mut Vec<Cursor>) -> Result<()> {
        let mut history = self.repo.file_history(&cursor.at.path, &cursor.commit)?;
        let mut i = 0;
        loop {
            let t0 = Instant::now();
            let Some(r) = history.get(i).cloned() else {
                return Err(Error::Invalid(format!(
                    "history of {} ended before {} was introduced",
                    cursor.at.path, cursor.commit.id
                )));
            };
            let types_r = self.cache.types(&r.id, &cursor.at.path)?.ok_or_else(|| Error::UnknownPath {
                path: cursor.at.path.clone(),
                commit: r.id.clone(),
            })?;
            let method_r = cursor.at.find(&types_r).ok_or_else(|| {
                Error::Invalid(format!("lost {} in {} at {}", cursor.at.signature, cursor.at.path, r.id))
            })?;
            let Some(parent) = r.first_parent().map(str::to_string) else {
                self.emit(&mut cursor, &r, method_r, None);
                self.record(&r.id, Step::Root, "root", t0);
                return Ok(());
            };

            // the parent's version of the file, skipping unparsable ones
            let mut left_rev = parent.clone();
            let mut types_p = self.cache.load(&parent, &cursor.at.path)?;
            let mut j = i + 1;
            while let Some(Err(e)) = &types_p {
                let msg = format!("{} does not parse at {}: {}", cursor.at.path, left_rev, e);
                match history.get(j) {
                    Some(older) => {
                        cursor
                            .diagnostics
                            .push(format!("{msg}; compared against {} instead", older.id));
                        left_rev = older.id.clone();
                        types_p = self.cache.load(&left_rev, &cursor.at.path)?;
                        j += 1;
                    }
                    None => {
                        cursor.diagnostics.push(msg);
                        types_p = None;
                    }
                }
            }
            // index of the commit whose version is the left side
            let next = j - 1 + usize::from(left_rev == parent);
            let types_p: Option<ParsedFile> = types_p.map(|t| t.expect("parse errors skipped above"));

            let (step, outcome) = self.resolve(&mut cursor, &r, &left_rev, method_r, &types_r, types_p.as_deref().map(Vec::as_slice))?;
            match outcome {
                Outcome::Introduced(text) => {
                    let idx = self.emit(&mut cursor, &r, method_r, None);
                    self.graph
                        .add_edge(None, idx, vec![Change::new(ChangeKind::Introduced, text)]);
                    self.record(&r.id, step, "introduced", t0);
                    return Ok(());
                }
                Outcome::Fork { lefts } => {
                    let idx = self.emit(&mut cursor, &r, method_r, None);
                    self.record(&r.id, step, "fork", t0);
                    let older = self.repo.resolve(&left_rev)?;
                    for (at, changes) in lefts.into_iter().rev() {
                        stack.push(Cursor {
                            commit: older.clone(),
                            at,
                            pending: Some((idx, changes)),
                            diagnostics: cursor.diagnostics.clone(),
                        });
                    }
                    return Ok(());
                }
                Outcome::Continue { at, changes, hook } => {
                    let hook = hook.filter(|_| self.cfg.emit_evolution_hooks);
                    if changes.is_empty() && hook.is_none() {
                        self.record(&r.id, step, "unchanged", t0);
                    } else {
                        let idx = self.emit(&mut cursor, &r, method_r, hook);
                        cursor.pending = Some((idx, changes));
                        self.record(&r.id, step, "changed", t0);
                    }
                    let moved = at.path != cursor.at.path;
                    cursor.at = at;
                    if moved || left_rev != parent {
                        cursor.commit = self.repo.resolve(&left_rev)?;
                    }
                    if moved {
                        history = self.repo.file_history(&cursor.at.path, &cursor.commit)?;
                        i = 0;
                    } else {
                        i = next;
                    }
                }
            }
        }
    }

    fn resolve(
        &mut self,
        cursor: &mut Cursor,
        r: &CommitRef,
        p: &str,
        method_r: &MethodDeclarationInfo,
        types_r: &[TypeDeclarationInfo],
        types_p: Option<&[TypeDeclarationInfo]>,
    ) -> Result<(Step, Outcome)> {
        let cfg = self.cfg;
        let kind = method_r
            .node_at(&cursor.at.node)
            .map_or(StatementKind::Block, |n| n.kind);
        if let Some(tp) = types_p {
            if let Some(method_p) = cursor.at.find(tp) {
                if method_p.body_hash == method_r.body_hash && method_p.body.text == method_r.body.text {
                    let at = Location::of(method_p, cursor.at.node.clone());
                    return Ok((
                        Step::UnchangedMethod,
                        Outcome::Continue {
                            at,
                            changes: Vec::new(),
                            hook: None,
                        },
                    ));
                }
                let mapping = map_bodies(method_p, method_r, &cfg.map_config())?;
                if let Some(lefts) = resolve_in(method_p, method_r, &mapping, &cursor.at.node) {
                    let out = combine(vec![(PairingKind::IdenticalSignature, lefts)], kind);
                    return Ok((Step::SameSignature, out.expect("non-empty")));
                }
                let pairings = match_files(tp, types_r, cfg)?;
                let extra = detect_intra_file(tp, types_r, &pairings, cfg)?;
                let hits = collect_hits(&extra, method_r, &cursor.at.node, |k| k == PairingKind::Inlined);
                if let Some(out) = combine(hits, kind) {
                    return Ok((Step::SameSignature, out));
                }
                return Ok((
                    Step::SameSignature,
                    Outcome::Introduced(format!(
                        "{kind} block added to {} at line {}",
                        method_r.signature,
                        method_r.node_at(&cursor.at.node).map_or(0, |n| n.start_line)
                    )),
                ));
            }
            let pairings = match_files(tp, types_r, cfg)?;
            let extra = detect_intra_file(tp, types_r, &pairings, cfg)?;
            let mut hits = collect_hits(&pairings, method_r, &cursor.at.node, |_| true);
            hits.extend(collect_hits(&extra, method_r, &cursor.at.node, |_| true));
            if let Some(out) = combine(hits, kind) {
                return Ok((Step::SameFile, out));
            }
        }

        // other files
        let superclass = types_r
            .iter()
            .find(|t| t.key.identity() == cursor.at.container.identity())
            .and_then(|t| t.superclass.as_deref());
        let target = AugmentTarget {
            method: method_r,
            superclass,
        };
        let aug = augment_models(&self.cache, r, p, &cursor.at.path, target, cfg)?;
        cursor.diagnostics.extend(aug.diagnostics.iter().cloned());
        let Some(method_r5) = cursor.at.find(aug.right.types_in(&cursor.at.path)) else {
            return Err(Error::Invalid(format!("{} vanished from the augmented model", cursor.at.signature)));
        };
        let mut hits = Vec::new();
        for cp in detect_class_level(&aug.left, &aug.right, cfg)? {
            if cp.right.key.identity() != cursor.at.container.identity() || cp.right.path != cursor.at.path {
                continue;
            }
            let extra = detect_intra_file(slice::from_ref(cp.left), slice::from_ref(cp.right), &cp.methods, cfg)?;
            let mut found = collect_hits(&cp.methods, method_r5, &cursor.at.node, |_| true);
            found.extend(collect_hits(&extra, method_r5, &cursor.at.node, |_| true));
            if matches!(cp.kind, ClassPairingKind::Extracted | ClassPairingKind::Split) {
                let k = if cp.kind == ClassPairingKind::Split {
                    PairingKind::Split
                } else {
                    PairingKind::Extracted
                };
                for h in &mut found {
                    if h.0.is_continuation() {
                        h.0 = k;
                    }
                }
            }
            hits.extend(found);
        }
        if hits.is_empty() {
            let inter = detect_inter_file(&aug.left, &aug.right, method_r5, cfg)?;
            hits = collect_hits(&inter, method_r5, &cursor.at.node, |_| true);
        }
        if let Some(out) = combine(hits, kind) {
            return Ok((Step::OtherFile, out));
        }
        Ok((
            Step::OtherFile,
            Outcome::Introduced(format!(
                "{kind} block introduced as part of newly added method {}",
                method_r.signature
            )),
        ))
    }
}

fn collect_hits(
    pairings: &[MethodPairing<'_>],
    method_r: &MethodDeclarationInfo,
    at: &NodePath,
    keep: impl Fn(PairingKind) -> bool,
) -> Vec<(PairingKind, Vec<(Location, Vec<Change>)>)> {
    pairings
        .iter()
        .filter(|p| keep(p.kind) && same_method(p.right, method_r))
        .filter_map(|p| resolve_in(p.left, p.right, &p.mapping, at).map(|ls| (p.kind, ls)))
        .collect()
}
