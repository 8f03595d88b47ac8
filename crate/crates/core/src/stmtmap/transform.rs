use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::srcmodel::{StatementKind as K, StatementNode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransformKind {
    IfElseIfToSwitch,
    IfToWhile,
    IteratorWhileToEnhancedFor,
    ForToWhile,
    LoopToPipeline,
    ForToIf,
    TryToTryWithResources,
    TryToSynchronized,
    CatchToFinally,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Inverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockTransformation {
    pub kind: TransformKind,
    pub direction: Direction,
}

impl TransformKind {
    pub const ALL: [TransformKind; 9] = [
        TransformKind::IfElseIfToSwitch,
        TransformKind::IfToWhile,
        TransformKind::IteratorWhileToEnhancedFor,
        TransformKind::ForToWhile,
        TransformKind::LoopToPipeline,
        TransformKind::ForToIf,
        TransformKind::TryToTryWithResources,
        TransformKind::TryToSynchronized,
        TransformKind::CatchToFinally,
    ];

    fn ends(self) -> (&'static str, &'static str) {
        match self {
            TransformKind::IfElseIfToSwitch => ("if-else-if", "switch"),
            TransformKind::IfToWhile => ("if", "while"),
            TransformKind::IteratorWhileToEnhancedFor => ("iterator-while", "enhanced-for"),
            TransformKind::ForToWhile => ("for", "while"),
            TransformKind::LoopToPipeline => ("loop", "pipeline"),
            TransformKind::ForToIf => ("for", "if"),
            TransformKind::TryToTryWithResources => ("try", "try-with-resources"),
            TransformKind::TryToSynchronized => ("try", "synchronized"),
            TransformKind::CatchToFinally => ("catch", "finally"),
        }
    }
}

impl BlockTransformation {
    fn new(kind: TransformKind, forward: bool) -> Self {
        BlockTransformation {
            kind,
            direction: if forward {
                Direction::Forward
            } else {
                Direction::Inverse
            },
        }
    }

    /// E.g. `if-to-while`, or `while-to-if` for the inverse direction.
    pub fn name(&self) -> String {
        let (a, b) = self.kind.ends();
        match self.direction {
            Direction::Forward => format!("{a}-to-{b}"),
            Direction::Inverse => format!("{b}-to-{a}"),
        }
    }

    pub fn is_pipeline(&self) -> bool {
        self.kind == TransformKind::LoopToPipeline
    }
}

impl fmt::Display for BlockTransformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Recognizes a block-to-block transformation between `l` (older) and `r`.
pub fn detect_transformation(l: &StatementNode, r: &StatementNode) -> Option<BlockTransformation> {
    use TransformKind::*;
    let t = |k, fwd| Some(BlockTransformation::new(k, fwd));
    match (l.kind, r.kind) {
        (K::If, K::Switch) if ladder_matches(l, r) => t(IfElseIfToSwitch, true),
        (K::Switch, K::If) if ladder_matches(r, l) => t(IfElseIfToSwitch, false),
        (K::While, K::EnhancedFor) if iterator_matches(l, r) => t(IteratorWhileToEnhancedFor, true),
        (K::EnhancedFor, K::While) if iterator_matches(r, l) => t(IteratorWhileToEnhancedFor, false),
        (K::If, K::While) if same_condition(l, r) || shares_text(l, r) => t(IfToWhile, true),
        (K::While, K::If) if same_condition(l, r) || shares_text(l, r) => t(IfToWhile, false),
        (K::For | K::EnhancedFor, K::While) if same_condition(l, r) || shares_text(l, r) => {
            t(ForToWhile, true)
        }
        (K::While, K::For | K::EnhancedFor) if same_condition(l, r) || shares_text(l, r) => {
            t(ForToWhile, false)
        }
        (K::For | K::EnhancedFor, K::If) if same_condition(l, r) || shares_text(l, r) => t(ForToIf, true),
        (K::If, K::For | K::EnhancedFor) if same_condition(l, r) || shares_text(l, r) => t(ForToIf, false),
        (lk, K::Leaf) if lk.is_loop() && pipeline_of(l, r) => t(LoopToPipeline, true),
        (K::Leaf, rk) if rk.is_loop() && pipeline_of(r, l) => t(LoopToPipeline, false),
        (K::Try, K::Try) if l.expressions.is_empty() != r.expressions.is_empty() => {
            if shares_text(l, r) || same_handlers(l, r) {
                t(TryToTryWithResources, l.expressions.is_empty())
            } else {
                None
            }
        }
        (K::Try, K::Synchronized) if shares_text(l, r) => t(TryToSynchronized, true),
        (K::Synchronized, K::Try) if shares_text(l, r) => t(TryToSynchronized, false),
        (K::Catch, K::Finally) if shares_text(l, r) => t(CatchToFinally, true),
        (K::Finally, K::Catch) if shares_text(l, r) => t(CatchToFinally, false),
        _ => None,
    }
}

/// The loop condition: the only expression of while/if, the middle one of a
/// classic for.
fn condition(n: &StatementNode) -> Option<&str> {
    match n.kind {
        K::For => n.expressions.get(1).map(String::as_str),
        K::If | K::While | K::DoWhile => n.expressions.first().map(String::as_str),
        _ => None,
    }
    .filter(|c| !c.is_empty())
}

fn same_condition(l: &StatementNode, r: &StatementNode) -> bool {
    matches!((condition(l), condition(r)), (Some(a), Some(b)) if a == b)
}

fn leaf_texts(n: &StatementNode, out: &mut HashSet<String>) {
    for c in &n.children {
        if c.is_leaf() {
            out.insert(c.text.clone());
        }
        leaf_texts(c, out);
    }
}

fn shares_text(l: &StatementNode, r: &StatementNode) -> bool {
    let mut a = HashSet::new();
    leaf_texts(l, &mut a);
    let mut b = HashSet::new();
    leaf_texts(r, &mut b);
    !a.is_disjoint(&b)
}

fn same_handlers(l: &StatementNode, r: &StatementNode) -> bool {
    let handlers = |n: &StatementNode| -> Vec<String> {
        n.children
            .iter()
            .filter(|c| c.kind == K::Catch)
            .map(|c| c.expressions.join(" "))
            .collect()
    };
    let (a, b) = (handlers(l), handlers(r));
    !a.is_empty() && a == b
}

/// Constant compared against `var` in an equality test, if `cond` is one.
fn equality_constant<'a>(cond: &'a str, var: &str) -> Option<&'a str> {
    if let Some((lhs, rhs)) = cond.split_once(" == ") {
        if lhs == var {
            return Some(rhs);
        }
        if rhs == var {
            return Some(lhs);
        }
    }
    let eq = " . equals ( ";
    if let Some(rest) = cond.strip_prefix(var).and_then(|s| s.strip_prefix(eq)) {
        return rest.strip_suffix(" )");
    }
    if let Some((c, rest)) = cond.split_once(eq) {
        if rest == format!("{var} )") {
            return Some(c);
        }
    }
    None
}

/// True if `head` starts an if-else-if ladder testing the switch variable.
pub(crate) fn ladder_matches(head: &StatementNode, switch: &StatementNode) -> bool {
    if head.is_else {
        return false;
    }
    let Some(var) = switch.expressions.first() else {
        return false;
    };
    let mut constants = Vec::new();
    let mut cur = Some(head);
    while let Some(n) = cur {
        let Some(c) = n.expressions.first().and_then(|c| equality_constant(c, var)) else {
            break;
        };
        constants.push(c);
        cur = n
            .children
            .last()
            .filter(|c| c.is_else && c.kind == K::If);
    }
    if constants.len() < 2 {
        return false;
    }
    switch.children.iter().filter(|c| c.is_leaf()).any(|c| {
        constants.iter().any(|k| {
            c.text == format!("case {k} :") || c.text == format!("case {k} ->")
        })
    })
}

fn iterator_var(cond: &str) -> Option<&str> {
    cond.strip_suffix(" . hasNext ( )").filter(|v| !v.contains(' '))
}

/// `while (it.hasNext()) { T x = it.next(); ... }` against `for (T x : c)`.
pub(crate) fn iterator_matches(w: &StatementNode, f: &StatementNode) -> bool {
    let Some(it) = w.expressions.first().and_then(|c| iterator_var(c)) else {
        return false;
    };
    let Some(var) = f.expressions.first().and_then(|d| d.rsplit(' ').next()) else {
        return false;
    };
    let next_call = format!("{it} . next ( )");
    let declares = w.children.iter().any(|c| {
        c.is_leaf() && c.text.ends_with(&format!("{var} = {next_call} ;"))
    });
    if declares {
        return true;
    }
    let mut left = HashSet::new();
    leaf_texts(w, &mut left);
    let left: HashSet<String> = left.into_iter().map(|t| t.replace(&next_call, var)).collect();
    let mut right = HashSet::new();
    leaf_texts(f, &mut right);
    !left.is_disjoint(&right)
}

fn pipeline_receiver(leaf: &StatementNode) -> Option<&str> {
    let text = leaf.text.as_str();
    let at = [" . stream ( )", " . parallelStream ( )", " . forEach ("]
        .iter()
        .filter_map(|m| text.find(m))
        .min()?;
    text[..at].rsplit(' ').next().filter(|s| !s.is_empty())
}

/// True if `leaf` is a pipeline over a collection the loop iterates.
pub(crate) fn pipeline_of(lp: &StatementNode, leaf: &StatementNode) -> bool {
    if !leaf.is_pipeline() {
        return false;
    }
    let Some(recv) = pipeline_receiver(leaf) else {
        return false;
    };
    lp.expressions
        .iter()
        .any(|e| e.split(' ').any(|tok| tok == recv))
}
