use std::collections::HashSet;

use crate::srcmodel::{NodePath, StatementKind, StatementNode};
use crate::stmtmap::{catch_types, Direction, MappingSet, StatementMapping};

use super::graph::{Change, ChangeKind};

fn clip(s: &str) -> String {
    const MAX: usize = 80;
    if s.chars().count() <= MAX {
        return s.to_string();
    }
    let cut: String = s.chars().take(MAX).collect();
    format!("{cut} ...")
}

/// Change kinds between two matched blocks. `left_root` and `right_root`
/// are the method bodies the mapping was computed on; `left`/`right` are
/// paths of the blocks inside them.
pub fn classify_changes(
    left_root: &StatementNode,
    left: &NodePath,
    right_root: &StatementNode,
    right: &NodePath,
    sm: &StatementMapping,
    mapping: &MappingSet,
) -> Vec<Change> {
    let (Some(l), Some(r)) = (left_root.node_at(&left.0), right_root.node_at(&right.0)) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    if let Some(t) = sm.transformation {
        if t.is_pipeline() {
            let (kind, what) = match t.direction {
                Direction::Forward => (ChangeKind::ReplaceLoopWithPipeline, "loop replaced with pipeline"),
                Direction::Inverse => (ChangeKind::ReplacePipelineWithLoop, "pipeline replaced with loop"),
            };
            out.push(Change::new(kind, format!("{what} at line {}", r.start_line)));
            return out;
        }
        out.push(Change::new(
            ChangeKind::BlockTypeMigration(t.name()),
            format!("{} block changed to {} block", l.kind, r.kind),
        ));
        if essential_leaves(l, r) != essential_leaves(r, l) {
            out.push(Change::new(ChangeKind::BodyChange, format!("{} block body changed", r.kind)));
        }
        return out;
    }
    if l.is_leaf() {
        if l.text != r.text {
            out.push(Change::new(
                ChangeKind::BodyChange,
                format!("statement changed from `{}` to `{}`", clip(&l.text), clip(&r.text)),
            ));
        }
        return out;
    }
    if l.expressions != r.expressions {
        out.push(Change::new(
            ChangeKind::ExpressionChange,
            format!(
                "{} expression changed from `{}` to `{}`",
                r.kind,
                clip(&l.expressions.join("; ")),
                clip(&r.expressions.join("; "))
            ),
        ));
    }
    if l.body_text() != r.body_text() {
        out.push(Change::new(ChangeKind::BodyChange, format!("{} block body changed", r.kind)));
    }
    if l.kind == StatementKind::Try && r.kind == StatementKind::Try {
        out.extend(try_changes(l, left, r, right, mapping));
    }
    if out.is_empty() && l.text != r.text {
        out.push(Change::new(ChangeKind::BodyChange, format!("{} block changed", r.kind)));
    }
    out
}

fn collect_leaves(n: &StatementNode, out: &mut Vec<String>) {
    for c in &n.children {
        if c.is_leaf() {
            out.push(c.text.clone());
        } else {
            collect_leaves(c, out);
        }
    }
}

/// Leaf statements of `n` that carry meaning across a block migration.
/// Scaffolding a migration adds or drops (breaks, case labels, iterator
/// reads, a for-update moved into the body) is left out.
fn essential_leaves(n: &StatementNode, other: &StatementNode) -> Vec<String> {
    let mut all = Vec::new();
    // clauses of a try are not part of its body
    for c in n.body_children() {
        if c.is_leaf() {
            all.push(c.text.clone());
        } else {
            collect_leaves(c, &mut all);
        }
    }
    let moved: Vec<String> = n
        .expressions
        .iter()
        .chain(other.expressions.iter())
        .map(|e| format!("{e} ;"))
        .collect();
    let mut kept: Vec<String> = all
        .into_iter()
        .filter(|t| {
            t != "break ;"
                && !t.starts_with("case ")
                && !t.starts_with("default ")
                && !t.contains(" . next ( ) ;")
                && !moved.contains(t)
        })
        .collect();
    kept.sort();
    kept
}

fn clauses<'a>(n: &'a StatementNode, at: &NodePath, kind: StatementKind) -> Vec<(NodePath, &'a StatementNode)> {
    n.children
        .iter()
        .enumerate()
        .filter(|(_, c)| c.kind == kind)
        .map(|(i, c)| {
            let mut p = at.0.clone();
            p.push(i);
            (NodePath(p), c)
        })
        .collect()
}

fn try_changes(
    l: &StatementNode,
    lpath: &NodePath,
    r: &StatementNode,
    rpath: &NodePath,
    mapping: &MappingSet,
) -> Vec<Change> {
    let mut out = Vec::new();
    let lc = clauses(l, lpath, StatementKind::Catch);
    let rc = clauses(r, rpath, StatementKind::Catch);
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut lused = HashSet::new();
    let mut rused = HashSet::new();
    let mut pair_by = |pred: &dyn Fn(usize, usize) -> bool, pairs: &mut Vec<(usize, usize)>| {
        for i in 0..lc.len() {
            if lused.contains(&i) {
                continue;
            }
            if let Some(j) = (0..rc.len()).find(|&j| !rused.contains(&j) && pred(i, j)) {
                lused.insert(i);
                rused.insert(j);
                pairs.push((i, j));
            }
        }
    };
    pair_by(
        &|i, j| mapping.for_left(&lc[i].0).is_some_and(|m| m.right == rc[j].0),
        &mut pairs,
    );
    pair_by(&|i, j| lc[i].1.expressions == rc[j].1.expressions, &mut pairs);
    pair_by(&|i, j| catch_types(lc[i].1) == catch_types(rc[j].1), &mut pairs);
    pairs.sort();
    for (i, j) in pairs {
        if lc[i].1.text != rc[j].1.text {
            out.push(Change::new(
                ChangeKind::CatchBlockChange,
                format!("catch block `{}` changed", rc[j].1.expressions.join(" ")),
            ));
        }
    }
    for (j, (_, c)) in rc.iter().enumerate() {
        if !rused.contains(&j) {
            out.push(Change::new(
                ChangeKind::CatchBlockAdded,
                format!("catch block `{}` added", c.expressions.join(" ")),
            ));
        }
    }
    for (i, (_, c)) in lc.iter().enumerate() {
        if !lused.contains(&i) {
            out.push(Change::new(
                ChangeKind::CatchBlockRemoved,
                format!("catch block `{}` removed", c.expressions.join(" ")),
            ));
        }
    }
    let lf = l.children.iter().find(|c| c.kind == StatementKind::Finally);
    let rf = r.children.iter().find(|c| c.kind == StatementKind::Finally);
    match (lf, rf) {
        (Some(a), Some(b)) if a.text != b.text => {
            out.push(Change::new(ChangeKind::FinallyBlockChange, "finally block changed"));
        }
        (None, Some(_)) => out.push(Change::new(ChangeKind::FinallyBlockAdded, "finally block added")),
        (Some(_), None) => out.push(Change::new(ChangeKind::FinallyBlockRemoved, "finally block removed")),
        _ => {}
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::srcmodel::parse_snippet;
    use crate::stmtmap::{map_trees, MapConfig};

    fn kinds(a: &str, b: &str) -> Vec<String> {
        let l = parse_snippet(a).unwrap();
        let r = parse_snippet(b).unwrap();
        let m = map_trees(&l, &r, &MapConfig::default()).unwrap();
        let at = NodePath(vec![0]);
        let sm = m.for_right(&at).expect("top block mapped");
        classify_changes(&l, &sm.left, &r, &at, sm, &m)
            .into_iter()
            .map(|c| c.kind.tag())
            .collect()
    }

    #[test]
    fn identical_blocks_have_no_changes() {
        assert!(kinds("if (a) { b(); }", "if (a) { b(); }").is_empty());
    }

    #[test]
    fn expression_and_body() {
        assert_eq!(kinds("if (a) { b(); c(); }", "if (x) { b(); c(); }"), vec!["expression-change"]);
        assert_eq!(kinds("if (a) { b(); c(); }", "if (a) { b(); d(); }"), vec!["body-change"]);
        assert_eq!(
            kinds("while (a) { b(); c(); }", "while (a2) { b(); c(); e(); }"),
            vec!["expression-change", "body-change"]
        );
    }

    #[test]
    fn try_clauses() {
        let base = "try { a(); } catch (IOException e) { log(e); }";
        assert_eq!(
            kinds(base, "try { a(); } catch (IOException e) { log(e); } catch (RuntimeException e) { fail(e); }"),
            vec!["catch-block-added"]
        );
        assert_eq!(kinds(base, "try { a(); } catch (IOException e) { warn(e); }"), vec!["catch-block-change"]);
        assert_eq!(kinds(base, "try { a(); } catch (IOException e) { log(e); } finally { close(); }"), vec!["finally-block-added"]);
        assert_eq!(
            kinds("try { a(); } catch (IOException e) { log(e); } catch (RuntimeException e) { x(); }", base),
            vec!["catch-block-removed"]
        );
        assert_eq!(
            kinds("try { a(); } finally { close(); }", "try { a(); } finally { close(); release(); }"),
            vec!["finally-block-change"]
        );
        assert_eq!(kinds("try { a(); } finally { close(); }", "try { a(); } catch (E e) { x(); }"), vec!["catch-block-added", "finally-block-removed"]);
    }

    #[test]
    fn migrations() {
        assert_eq!(
            kinds("if (a) {\n  b();\n}", "while (a) {\n  b();\n}"),
            vec!["block-type-migration(if-to-while)"]
        );
        assert_eq!(
            kinds("for (String s : items) {\n  log(s);\n}", "items.forEach(s -> log(s));"),
            vec!["replace-loop-with-pipeline"]
        );
    }
}
