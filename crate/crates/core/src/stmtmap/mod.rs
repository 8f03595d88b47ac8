//! Statement mapping between two method bodies.

mod hungarian;
mod replace;
mod transform;

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

pub use replace::{leaf_replacements, replacement_budget, Replacement, ReplacementKind};
pub use transform::{detect_transformation, BlockTransformation, Direction, TransformKind};

use crate::error::{Error, Result};
use crate::srcmodel::{MethodDeclarationInfo, NodePath, StatementKind, StatementNode};

pub const DEFAULT_SIZE_LIMIT: usize = 20_000;

/// Components larger than this fall back to greedy assignment.
const HUNGARIAN_LIMIT: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MapConfig {
    /// Maximum combined node count of a body pair.
    pub size_limit: usize,
}

impl Default for MapConfig {
    fn default() -> Self {
        MapConfig {
            size_limit: DEFAULT_SIZE_LIMIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatementMapping {
    pub left: NodePath,
    pub right: NodePath,
    pub replacements: Vec<Replacement>,
    pub transformation: Option<BlockTransformation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MultiKind {
    /// Several left nodes became one right node.
    Merge,
    /// One left node became several right nodes.
    Split,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiMapping {
    pub kind: MultiKind,
    pub lefts: Vec<NodePath>,
    pub rights: Vec<NodePath>,
}

/// Result of mapping two bodies. Every considered node is in exactly one of
/// `mappings`, `multi` or the unmatched lists.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingSet {
    pub mappings: Vec<StatementMapping>,
    pub multi: Vec<MultiMapping>,
    pub unmatched_left: Vec<NodePath>,
    pub unmatched_right: Vec<NodePath>,
}

impl MappingSet {
    pub fn for_right(&self, r: &NodePath) -> Option<&StatementMapping> {
        self.mappings.iter().find(|m| &m.right == r)
    }

    pub fn for_left(&self, l: &NodePath) -> Option<&StatementMapping> {
        self.mappings.iter().find(|m| &m.left == l)
    }

    pub fn multi_for_right(&self, r: &NodePath) -> Option<&MultiMapping> {
        self.multi.iter().find(|g| g.rights.contains(r))
    }

    pub fn multi_for_left(&self, l: &NodePath) -> Option<&MultiMapping> {
        self.multi.iter().find(|g| g.lefts.contains(l))
    }

    /// Left nodes taking part in a plain or multi mapping.
    pub fn matched_left(&self) -> usize {
        self.mappings.len() + self.multi.iter().map(|g| g.lefts.len()).sum::<usize>()
    }

    pub fn matched_right(&self) -> usize {
        self.mappings.len() + self.multi.iter().map(|g| g.rights.len()).sum::<usize>()
    }

    pub fn replacement_count(&self) -> usize {
        self.mappings.iter().map(|m| m.replacements.len()).sum()
    }

    /// Matched nodes over the larger side.
    pub fn matched_fraction(&self) -> f64 {
        let nl = self.matched_left() + self.unmatched_left.len();
        let nr = self.matched_right() + self.unmatched_right.len();
        let denom = nl.max(nr);
        if denom == 0 {
            return 1.0;
        }
        self.matched_left().min(self.matched_right()) as f64 / denom as f64
    }
}

pub fn map_bodies(
    left: &MethodDeclarationInfo,
    right: &MethodDeclarationInfo,
    cfg: &MapConfig,
) -> Result<MappingSet> {
    map_trees(&left.body, &right.body, cfg)
}

pub fn map_trees(left: &StatementNode, right: &StatementNode, cfg: &MapConfig) -> Result<MappingSet> {
    map_masked(left, right, None, None, cfg)
}

/// Like [`map_trees`], but only nodes inside the masks take part.
pub fn map_masked(
    left: &StatementNode,
    right: &StatementNode,
    left_mask: Option<&HashSet<NodePath>>,
    right_mask: Option<&HashSet<NodePath>>,
    cfg: &MapConfig,
) -> Result<MappingSet> {
    let l = flatten(left);
    let r = flatten(right);
    let nodes = l.len() + r.len();
    if nodes > cfg.size_limit {
        return Err(Error::SizeLimit {
            nodes,
            limit: cfg.size_limit,
        });
    }
    let lok = l
        .iter()
        .map(|n| left_mask.is_none_or(|m| m.contains(&n.path)))
        .collect();
    let rok = r
        .iter()
        .map(|n| right_mask.is_none_or(|m| m.contains(&n.path)))
        .collect();
    let mut e = Engine {
        lmap: vec![None; l.len()],
        rmap: vec![None; r.len()],
        extra: HashMap::new(),
        lgroup: vec![false; l.len()],
        rgroup: vec![false; r.len()],
        groups: Vec::new(),
        lok,
        rok,
        l,
        r,
    };
    e.exact_subtrees();
    e.pipelines();
    e.replaced_leaves();
    e.composites();
    e.multi_groups();
    Ok(e.finish())
}

/// Share of `left`'s and `right`'s descendants that correspond, given `m`.
///
/// Paths are relative to the roots the mapping was computed on; empty
/// paths denote the roots themselves.
pub fn child_match_ratio(
    left_root: &StatementNode,
    left: &NodePath,
    right_root: &StatementNode,
    right: &NodePath,
    m: &MappingSet,
) -> f64 {
    let (Some(ln), Some(rn)) = (left_root.node_at(&left.0), right_root.node_at(&right.0)) else {
        return 0.0;
    };
    let within = |p: &NodePath, root: &NodePath| p.0.len() > root.0.len() && p.0.starts_with(&root.0);
    let ld: Vec<(NodePath, &StatementNode)> = ln
        .descendants()
        .into_iter()
        .map(|(p, n)| (NodePath([left.0.clone(), p.0].concat()), n))
        .collect();
    let rd: Vec<(NodePath, &StatementNode)> = rn
        .descendants()
        .into_iter()
        .map(|(p, n)| (NodePath([right.0.clone(), p.0].concat()), n))
        .collect();
    let mut count = 0;
    let mut rest_l = Vec::new();
    let mut paired_r = HashSet::new();
    for (p, n) in &ld {
        match m.for_left(p) {
            Some(mp) if within(&mp.right, right) => {
                count += 1;
                paired_r.insert(mp.right.clone());
            }
            _ => rest_l.push(n.text.as_str()),
        }
    }
    let rest_r = rd
        .iter()
        .filter(|(p, _)| !paired_r.contains(p))
        .map(|(_, n)| n.text.as_str());
    count += multiset_overlap(rest_l.into_iter(), rest_r);
    ratio(count, ld.len(), rd.len(), ln.text == rn.text)
}

fn multiset_overlap<'a>(a: impl Iterator<Item = &'a str>, b: impl Iterator<Item = &'a str>) -> usize {
    let mut bag: HashMap<&str, usize> = HashMap::new();
    for t in a {
        *bag.entry(t).or_default() += 1;
    }
    let mut n = 0;
    for t in b {
        if let Some(c) = bag.get_mut(t) {
            if *c > 0 {
                *c -= 1;
                n += 1;
            }
        }
    }
    n
}

fn ratio(matched: usize, nl: usize, nr: usize, same_text: bool) -> f64 {
    let d = nl.max(nr);
    if d == 0 {
        return if same_text { 1.0 } else { 0.0 };
    }
    matched as f64 / d as f64
}

struct FNode<'a> {
    n: &'a StatementNode,
    path: NodePath,
    parent: Option<usize>,
    /// Exclusive end of this node's subtree in preorder.
    end: usize,
    height: usize,
    /// Start line relative to the body root.
    line: i64,
}

fn flatten(root: &StatementNode) -> Vec<FNode<'_>> {
    fn rec<'a>(
        n: &'a StatementNode,
        path: &mut Vec<usize>,
        parent: Option<usize>,
        base: i64,
        out: &mut Vec<FNode<'a>>,
    ) -> usize {
        let mut h = 0;
        for (i, c) in n.children.iter().enumerate() {
            let idx = out.len();
            path.push(i);
            out.push(FNode {
                n: c,
                path: NodePath(path.clone()),
                parent,
                end: 0,
                height: 0,
                line: c.start_line as i64 - base,
            });
            let ch = rec(c, path, Some(idx), base, out);
            out[idx].end = out.len();
            out[idx].height = ch;
            path.pop();
            h = h.max(ch);
        }
        h + 1
    }
    let mut out = Vec::new();
    rec(root, &mut Vec::new(), None, root.start_line as i64, &mut out);
    out
}

#[derive(Default)]
struct Extra {
    replacements: Vec<Replacement>,
    transformation: Option<BlockTransformation>,
}

struct Engine<'a> {
    l: Vec<FNode<'a>>,
    r: Vec<FNode<'a>>,
    lok: Vec<bool>,
    rok: Vec<bool>,
    lmap: Vec<Option<usize>>,
    rmap: Vec<Option<usize>>,
    extra: HashMap<usize, Extra>,
    lgroup: Vec<bool>,
    rgroup: Vec<bool>,
    groups: Vec<(MultiKind, Vec<usize>, Vec<usize>)>,
}

fn expression_replacements(a: &[String], b: &[String]) -> Vec<Replacement> {
    let n = a.len().max(b.len());
    (0..n)
        .filter_map(|i| {
            let x = a.get(i).map(String::as_str).unwrap_or("");
            let y = b.get(i).map(String::as_str).unwrap_or("");
            (x != y).then(|| Replacement {
                before: x.to_string(),
                after: y.to_string(),
                kind: ReplacementKind::Expression,
            })
        })
        .collect()
}

impl<'a> Engine<'a> {
    fn lfree(&self, i: usize) -> bool {
        self.lok[i] && self.lmap[i].is_none() && !self.lgroup[i]
    }

    fn rfree(&self, j: usize) -> bool {
        self.rok[j] && self.rmap[j].is_none() && !self.rgroup[j]
    }

    fn map(&mut self, i: usize, j: usize, extra: Extra) {
        debug_assert!(self.lfree(i) && self.rfree(j));
        self.lmap[i] = Some(j);
        self.rmap[j] = Some(i);
        self.extra.insert(i, extra);
    }

    fn unmap_left(&mut self, i: usize) {
        if let Some(j) = self.lmap[i].take() {
            self.rmap[j] = None;
            self.extra.remove(&i);
        }
    }

    fn dist(&self, i: usize, j: usize) -> i64 {
        (self.l[i].line - self.r[j].line).abs()
    }

    /// 0 when the parents look the same, 2 when unrelated.
    fn context(&self, i: usize, j: usize) -> u8 {
        match (self.l[i].parent, self.r[j].parent) {
            (None, None) => 0,
            (Some(pi), Some(pj)) => {
                if self.lmap[pi] == Some(pj) || self.l[pi].n.text == self.r[pj].n.text {
                    0
                } else if self.l[pi].n.kind == self.r[pj].n.kind
                    && self.l[pi].n.expressions == self.r[pj].n.expressions
                {
                    1
                } else {
                    2
                }
            }
            _ => 2,
        }
    }

    fn exact_subtrees(&mut self) {
        let mut by_text: HashMap<&str, Vec<usize>> = HashMap::new();
        for (j, n) in self.r.iter().enumerate() {
            if n.n.kind.is_composite() {
                by_text.entry(n.n.text.as_str()).or_default().push(j);
            }
        }
        let mut order: Vec<usize> = (0..self.l.len()).filter(|&i| self.l[i].n.kind.is_composite()).collect();
        order.sort_by_key(|&i| (std::cmp::Reverse(self.l[i].end - i), i));
        for i in order {
            let size = self.l[i].end - i;
            if !(i..self.l[i].end).all(|k| self.lfree(k)) {
                continue;
            }
            let Some(cands) = by_text.get(self.l[i].n.text.as_str()) else {
                continue;
            };
            let best = cands
                .iter()
                .copied()
                .filter(|&j| {
                    self.r[j].end - j == size
                        && self.r[j].n.kind == self.l[i].n.kind
                        && (j..self.r[j].end).all(|k| self.rfree(k))
                })
                .min_by_key(|&j| (self.context(i, j), self.dist(i, j), j));
            if let Some(j) = best {
                for k in 0..size {
                    self.map(i + k, j + k, Extra::default());
                }
            }
        }
    }

    fn pipelines(&mut self) {
        let mut pairs = Vec::new();
        for i in 0..self.l.len() {
            if !self.lfree(i) {
                continue;
            }
            let ln = self.l[i].n;
            if !(ln.kind.is_loop() || ln.is_pipeline()) {
                continue;
            }
            for j in 0..self.r.len() {
                if !self.rfree(j) {
                    continue;
                }
                let rn = self.r[j].n;
                let shape = (ln.kind.is_loop() && rn.is_pipeline()) || (ln.is_pipeline() && rn.kind.is_loop());
                if !shape {
                    continue;
                }
                if let Some(t) = detect_transformation(ln, rn) {
                    pairs.push((self.dist(i, j), i, j, t));
                }
            }
        }
        pairs.sort_by_key(|p| (p.0, p.1, p.2));
        for (_, i, j, t) in pairs {
            if self.lfree(i) && self.rfree(j) {
                self.map(
                    i,
                    j,
                    Extra {
                        replacements: Vec::new(),
                        transformation: Some(t),
                    },
                );
            }
        }
    }

    fn replaced_leaves(&mut self) {
        let ls: Vec<usize> = (0..self.l.len())
            .filter(|&i| self.l[i].n.is_leaf() && self.lfree(i))
            .collect();
        let rs: Vec<usize> = (0..self.r.len())
            .filter(|&j| self.r[j].n.is_leaf() && self.rfree(j))
            .collect();
        // compatible pairs, keyed by (left pos, right pos)
        let mut edges: HashMap<(usize, usize), Vec<Replacement>> = HashMap::new();
        for (a, &i) in ls.iter().enumerate() {
            for (b, &j) in rs.iter().enumerate() {
                if let Some(reps) = leaf_replacements(&self.l[i].n.tokens, &self.r[j].n.tokens) {
                    edges.insert((a, b), reps);
                }
            }
        }
        if edges.is_empty() {
            return;
        }
        // connected components over the bipartite compatibility graph
        let n = ls.len() + rs.len();
        let mut uf: Vec<usize> = (0..n).collect();
        fn find(uf: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        let mut keys: Vec<(usize, usize)> = edges.keys().copied().collect();
        keys.sort();
        for &(a, b) in &keys {
            let (x, y) = (find(&mut uf, a), find(&mut uf, ls.len() + b));
            if x != y {
                uf[x] = y;
            }
        }
        let mut comps: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for &(a, b) in &keys {
            let root = find(&mut uf, a);
            let c = comps.entry(root).or_default();
            if !c.0.contains(&a) {
                c.0.push(a);
            }
            if !c.1.contains(&b) {
                c.1.push(b);
            }
        }
        for (_, (mut ca, mut cb)) in comps {
            ca.sort();
            cb.sort();
            let cost = |e: &Self, a: usize, b: usize| -> Option<i64> {
                // identical leaves cost nothing; context then distance break ties
                edges.get(&(a, b)).map(|reps| {
                    reps.len() as i64 * 1_000_000
                        + i64::from(e.context(ls[a], rs[b])) * 100_000
                        + e.dist(ls[a], rs[b]).min(99_999)
                })
            };
            let chosen: Vec<(usize, usize)> = if ca.len() + cb.len() <= HUNGARIAN_LIMIT {
                const UNMATCHED: i64 = 1_000_000_000_000;
                const FORBIDDEN: i64 = 1_000_000_000_000_000;
                let size = ca.len() + cb.len();
                let mut m = vec![vec![0i64; size]; size];
                for (x, &a) in ca.iter().enumerate() {
                    for (y, &b) in cb.iter().enumerate() {
                        m[x][y] = cost(self, a, b).unwrap_or(FORBIDDEN);
                    }
                    for y in cb.len()..size {
                        m[x][y] = UNMATCHED;
                    }
                }
                for row in m.iter_mut().skip(ca.len()) {
                    for cell in row.iter_mut().take(cb.len()) {
                        *cell = UNMATCHED;
                    }
                }
                let assign = hungarian::solve(&m);
                ca.iter()
                    .enumerate()
                    .filter_map(|(x, &a)| {
                        let y = assign[x];
                        (y < cb.len() && m[x][y] < FORBIDDEN).then(|| (a, cb[y]))
                    })
                    .collect()
            } else {
                let mut pairs: Vec<(i64, usize, usize)> = Vec::new();
                for &a in &ca {
                    for &b in &cb {
                        if let Some(c) = cost(self, a, b) {
                            pairs.push((c, a, b));
                        }
                    }
                }
                pairs.sort();
                let mut ua = HashSet::new();
                let mut ub = HashSet::new();
                pairs
                    .into_iter()
                    .filter(|&(_, a, b)| {
                        if ua.contains(&a) || ub.contains(&b) {
                            return false;
                        }
                        ua.insert(a);
                        ub.insert(b);
                        true
                    })
                    .map(|(_, a, b)| (a, b))
                    .collect()
            };
            for (a, b) in chosen {
                let reps = edges[&(a, b)].clone();
                self.map(
                    ls[a],
                    rs[b],
                    Extra {
                        replacements: reps,
                        transformation: None,
                    },
                );
            }
        }
    }

    /// Matched descendant pairs of `i` and `j`: pairs mapped to each other,
    /// plus one-to-one pairs of identical text among the rest.
    fn matched_descendants(&self, i: usize, j: usize) -> usize {
        let (le, re) = (self.l[i].end, self.r[j].end);
        let mut count = 0;
        let mut rest_l = Vec::new();
        let mut paired = HashSet::new();
        for d in i + 1..le {
            match self.lmap[d] {
                Some(rd) if rd > j && rd < re => {
                    count += 1;
                    paired.insert(rd);
                }
                _ => rest_l.push(self.l[d].n.text.as_str()),
            }
        }
        let rest_r = (j + 1..re)
            .filter(|d| !paired.contains(d))
            .map(|d| self.r[d].n.text.as_str());
        count + multiset_overlap(rest_l.into_iter(), rest_r)
    }

    fn composites(&mut self) {
        let mut levels: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..self.l.len() {
            if self.l[i].n.kind.is_composite() {
                levels.entry(self.l[i].height).or_default().push(i);
            }
        }
        let rcomp: Vec<usize> = (0..self.r.len())
            .filter(|&j| self.r[j].n.kind.is_composite())
            .collect();
        for (_, level) in levels {
            // (tier, replacements, -ratio, distance, i, j)
            let mut cands: Vec<((u8, usize, i64, i64, usize, usize), Option<BlockTransformation>)> = Vec::new();
            for &i in &level {
                if !self.lfree(i) {
                    continue;
                }
                let ln = self.l[i].n;
                for &j in &rcomp {
                    if !self.rfree(j) {
                        continue;
                    }
                    let rn = self.r[j].n;
                    let trans = if ln.kind == rn.kind && ln.kind != StatementKind::Try {
                        None
                    } else {
                        detect_transformation(ln, rn)
                    };
                    if ln.kind != rn.kind && trans.is_none() {
                        continue;
                    }
                    if ln.kind == StatementKind::Block && ln.is_else != rn.is_else {
                        continue;
                    }
                    let matched = self.matched_descendants(i, j);
                    let same_expr = ln.kind == rn.kind
                        && ln.expressions == rn.expressions
                        && ln.expressions.iter().any(|e| !e.is_empty());
                    if matched == 0 && !same_expr && trans.is_none() {
                        continue;
                    }
                    let tier = if ln.text == rn.text {
                        0
                    } else if same_expr {
                        1
                    } else {
                        2
                    };
                    let reps = expression_replacements(&ln.expressions, &rn.expressions).len();
                    let r = ratio(matched, self.l[i].end - i - 1, self.r[j].end - j - 1, ln.text == rn.text);
                    let neg_ratio = -((r * 1_000_000.0).round() as i64);
                    cands.push(((tier, reps, neg_ratio, self.dist(i, j), i, j), trans));
                }
            }
            cands.sort_by_key(|c| c.0);
            for ((_, _, _, _, i, j), trans) in cands {
                if self.lfree(i) && self.rfree(j) {
                    let reps = expression_replacements(&self.l[i].n.expressions, &self.r[j].n.expressions);
                    self.map(
                        i,
                        j,
                        Extra {
                            replacements: reps,
                            transformation: trans,
                        },
                    );
                }
            }
        }
    }

    fn is_ancestor(side: &[FNode<'_>], a: usize, b: usize) -> bool {
        a < b && b < side[a].end
    }

    fn shares_text(&self, i: usize, j: usize) -> bool {
        let lt: HashSet<&str> = (i + 1..self.l[i].end).map(|d| self.l[d].n.text.as_str()).collect();
        (j + 1..self.r[j].end).any(|d| lt.contains(self.r[d].n.text.as_str()))
    }

    fn multi_groups(&mut self) {
        // merges: many left, one right
        for j in 0..self.r.len() {
            if !self.rok[j] || self.rgroup[j] {
                continue;
            }
            let rn = self.r[j].n;
            let members: Vec<usize> = match rn.kind {
                StatementKind::If => {
                    let Some(ops) = rn.expressions.first().and_then(|c| operands(c)) else {
                        continue;
                    };
                    let cand: Vec<usize> = (0..self.l.len())
                        .filter(|&i| {
                            let ln = self.l[i].n;
                            self.lok[i]
                                && !self.lgroup[i]
                                && ln.kind == StatementKind::If
                                && (self.lmap[i].is_none() || self.lmap[i] == Some(j))
                                && ln.expressions.first().is_some_and(|c| ops.contains(c))
                        })
                        .collect();
                    cand.iter()
                        .copied()
                        .filter(|&i| {
                            self.shares_text(i, j)
                                || cand.iter().any(|&o| o != i && Self::is_ancestor(&self.l, i, o))
                        })
                        .collect()
                }
                StatementKind::Catch => {
                    let types = catch_types(rn);
                    if types.len() < 2 {
                        continue;
                    }
                    (0..self.l.len())
                        .filter(|&i| {
                            let ln = self.l[i].n;
                            self.lok[i]
                                && !self.lgroup[i]
                                && ln.kind == StatementKind::Catch
                                && (self.lmap[i].is_none() || self.lmap[i] == Some(j))
                                && catch_types(ln).iter().all(|t| types.contains(t))
                        })
                        .collect()
                }
                _ => continue,
            };
            if members.len() < 2 {
                continue;
            }
            if let Some(i0) = self.rmap[j] {
                if !members.contains(&i0) {
                    continue;
                }
            }
            for &i in &members {
                self.unmap_left(i);
                self.lgroup[i] = true;
            }
            self.rgroup[j] = true;
            self.groups.push((MultiKind::Merge, members, vec![j]));
        }
        // splits: one left, many right
        for i in 0..self.l.len() {
            if !self.lok[i] || self.lgroup[i] {
                continue;
            }
            let ln = self.l[i].n;
            let members: Vec<usize> = match ln.kind {
                StatementKind::If => {
                    let Some(ops) = ln.expressions.first().and_then(|c| operands(c)) else {
                        continue;
                    };
                    let cand: Vec<usize> = (0..self.r.len())
                        .filter(|&j| {
                            let rn = self.r[j].n;
                            self.rok[j]
                                && !self.rgroup[j]
                                && rn.kind == StatementKind::If
                                && (self.rmap[j].is_none() || self.rmap[j] == Some(i))
                                && rn.expressions.first().is_some_and(|c| ops.contains(c))
                        })
                        .collect();
                    cand.iter()
                        .copied()
                        .filter(|&j| {
                            self.shares_text(i, j)
                                || cand.iter().any(|&o| o != j && Self::is_ancestor(&self.r, j, o))
                        })
                        .collect()
                }
                StatementKind::Catch => {
                    let types = catch_types(ln);
                    if types.len() < 2 {
                        continue;
                    }
                    (0..self.r.len())
                        .filter(|&j| {
                            let rn = self.r[j].n;
                            self.rok[j]
                                && !self.rgroup[j]
                                && rn.kind == StatementKind::Catch
                                && (self.rmap[j].is_none() || self.rmap[j] == Some(i))
                                && catch_types(rn).iter().all(|t| types.contains(t))
                        })
                        .collect()
                }
                _ => continue,
            };
            if members.len() < 2 {
                continue;
            }
            if let Some(j0) = self.lmap[i] {
                if !members.contains(&j0) {
                    continue;
                }
            }
            self.unmap_left(i);
            for &j in &members {
                if let Some(i0) = self.rmap[j] {
                    self.unmap_left(i0);
                }
                self.rgroup[j] = true;
            }
            self.lgroup[i] = true;
            self.groups.push((MultiKind::Split, vec![i], members));
        }
    }

    fn finish(mut self) -> MappingSet {
        let mut out = MappingSet::default();
        for i in 0..self.l.len() {
            if let Some(j) = self.lmap[i] {
                let extra = self.extra.remove(&i).unwrap_or_default();
                out.mappings.push(StatementMapping {
                    left: self.l[i].path.clone(),
                    right: self.r[j].path.clone(),
                    replacements: extra.replacements,
                    transformation: extra.transformation,
                });
            } else if self.lok[i] && !self.lgroup[i] {
                out.unmatched_left.push(self.l[i].path.clone());
            }
        }
        for j in 0..self.r.len() {
            if self.rmap[j].is_none() && self.rok[j] && !self.rgroup[j] {
                out.unmatched_right.push(self.r[j].path.clone());
            }
        }
        for (kind, ls, rs) in &self.groups {
            out.multi.push(MultiMapping {
                kind: *kind,
                lefts: ls.iter().map(|&i| self.l[i].path.clone()).collect(),
                rights: rs.iter().map(|&j| self.r[j].path.clone()).collect(),
            });
        }
        out
    }
}

/// Top-level operands of a `&&` or `||` chain (two or more), outer
/// parentheses stripped.
pub fn operands(cond: &str) -> Option<Vec<String>> {
    for op in ["&&", "||"] {
        let mut parts = Vec::new();
        let mut cur: Vec<&str> = Vec::new();
        let mut depth = 0i32;
        for tok in cond.split(' ') {
            match tok {
                "(" => depth += 1,
                ")" => depth -= 1,
                t if t == op && depth == 0 => {
                    parts.push(strip_parens(&cur.join(" ")));
                    cur.clear();
                    continue;
                }
                _ => {}
            }
            cur.push(tok);
        }
        parts.push(strip_parens(&cur.join(" ")));
        if parts.len() >= 2 {
            return Some(parts);
        }
    }
    None
}

pub fn strip_parens(s: &str) -> String {
    let mut s = s.trim().to_string();
    while let Some(inner) = s.strip_prefix("( ").and_then(|x| x.strip_suffix(" )")) {
        // only strip when the parentheses wrap the whole operand
        let mut depth = 0i32;
        let wraps = inner.split(' ').all(|t| {
            match t {
                "(" => depth += 1,
                ")" => depth -= 1,
                _ => {}
            }
            depth >= 0
        });
        if !wraps {
            break;
        }
        s = inner.to_string();
    }
    s
}

/// Exception types handled by a catch clause.
pub fn catch_types(catch: &StatementNode) -> Vec<String> {
    let Some(param) = catch.expressions.first() else {
        return Vec::new();
    };
    let toks: Vec<&str> = param.split(' ').filter(|t| *t != "final").collect();
    let Some((_, types)) = toks.split_last() else {
        return Vec::new();
    };
    types
        .split(|t| *t == "|")
        .map(|t| t.concat())
        .filter(|t| !t.is_empty() && !t.starts_with('@'))
        .collect()
}

#[cfg(test)]
mod tests;
