use serde::{Deserialize, Serialize};

use crate::srcmodel::{NodePath, StatementKind, StatementNode};
use crate::stmtmap::{strip_parens, Direction, MappingSet, MultiKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BodyRefactoringKind {
    ReplaceLoopWithPipeline,
    ReplacePipelineWithLoop,
    InvertCondition,
    SplitConditional,
    MergeConditional,
    SplitCatch,
    MergeCatch,
}

/// A refactoring confined to one method body, located by node paths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BodyRefactoring {
    pub kind: BodyRefactoringKind,
    pub lefts: Vec<NodePath>,
    pub rights: Vec<NodePath>,
}

impl BodyRefactoring {
    pub fn touches_right(&self, r: &NodePath) -> bool {
        self.rights.contains(r)
    }
}

/// Body-level refactorings visible in `mapping` between two bodies.
pub fn detect_body_refactorings(
    left: &StatementNode,
    right: &StatementNode,
    mapping: &MappingSet,
) -> Vec<BodyRefactoring> {
    let mut out = Vec::new();
    for m in &mapping.mappings {
        let one = |kind| BodyRefactoring {
            kind,
            lefts: vec![m.left.clone()],
            rights: vec![m.right.clone()],
        };
        if let Some(t) = m.transformation.filter(|t| t.is_pipeline()) {
            out.push(one(match t.direction {
                Direction::Forward => BodyRefactoringKind::ReplaceLoopWithPipeline,
                Direction::Inverse => BodyRefactoringKind::ReplacePipelineWithLoop,
            }));
            continue;
        }
        let (Some(l), Some(r)) = (left.node_at(&m.left.0), right.node_at(&m.right.0)) else {
            continue;
        };
        if l.kind == StatementKind::If && r.kind == StatementKind::If {
            if let (Some(a), Some(b)) = (l.expressions.first(), r.expressions.first()) {
                if is_inverted(a, b) {
                    out.push(one(BodyRefactoringKind::InvertCondition));
                }
            }
        }
    }
    for g in &mapping.multi {
        let Some(first) = left.node_at(&g.lefts[0].0) else {
            continue;
        };
        let kind = match (first.kind, g.kind) {
            (StatementKind::If, MultiKind::Split) => BodyRefactoringKind::SplitConditional,
            (StatementKind::If, MultiKind::Merge) => BodyRefactoringKind::MergeConditional,
            (StatementKind::Catch, MultiKind::Split) => BodyRefactoringKind::SplitCatch,
            (StatementKind::Catch, MultiKind::Merge) => BodyRefactoringKind::MergeCatch,
            _ => continue,
        };
        out.push(BodyRefactoring {
            kind,
            lefts: g.lefts.clone(),
            rights: g.rights.clone(),
        });
    }
    out
}

fn negation_of(s: &str) -> Option<String> {
    let s = strip_parens(s);
    let rest = s.strip_prefix("! ")?;
    let inner = strip_parens(rest);
    // `! a && b` negates only `a`
    if inner == rest.trim() && rest.split(' ').count() > 1 {
        return None;
    }
    Some(inner)
}

fn flip_comparison(s: &str) -> Option<String> {
    let toks: Vec<&str> = s.split(' ').collect();
    if toks.iter().any(|t| matches!(*t, "&&" | "||" | "?")) {
        return None;
    }
    let mut depth = 0i32;
    let mut at = None;
    for (i, t) in toks.iter().enumerate() {
        match *t {
            "(" => depth += 1,
            ")" => depth -= 1,
            "==" | "!=" | "<" | ">" | "<=" | ">=" if depth == 0 => {
                if at.is_some() {
                    return None;
                }
                at = Some(i);
            }
            _ => {}
        }
    }
    let i = at?;
    let inv = match toks[i] {
        "==" => "!=",
        "!=" => "==",
        "<" => ">=",
        ">=" => "<",
        ">" => "<=",
        _ => ">",
    };
    let mut out: Vec<&str> = toks.clone();
    out[i] = inv;
    Some(out.join(" "))
}

/// True if condition `b` is the logical negation of `a`.
pub fn is_inverted(a: &str, b: &str) -> bool {
    let a = strip_parens(a);
    let b = strip_parens(b);
    if negation_of(&a).as_deref() == Some(b.as_str()) || negation_of(&b).as_deref() == Some(a.as_str()) {
        return true;
    }
    flip_comparison(&a).as_deref() == Some(b.as_str())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::srcmodel::parse_snippet;
    use crate::stmtmap::{map_trees, MapConfig};

    fn detect(a: &str, b: &str) -> Vec<BodyRefactoringKind> {
        let l = parse_snippet(a).unwrap();
        let r = parse_snippet(b).unwrap();
        let m = map_trees(&l, &r, &MapConfig::default()).unwrap();
        detect_body_refactorings(&l, &r, &m).into_iter().map(|x| x.kind).collect()
    }

    #[test]
    fn inversions() {
        assert!(is_inverted("a", "! a"));
        assert!(is_inverted("x > 0", "! ( x > 0 )"));
        assert!(is_inverted("x > 0", "x <= 0"));
        assert!(is_inverted("! ( a && b )", "a && b"));
        assert!(!is_inverted("a && b", "! a && b"));
        assert!(!is_inverted("a == b && c", "a != b && c"));
        assert!(!is_inverted("a", "b"));
    }

    #[test]
    fn kinds() {
        assert_eq!(
            detect("if (x > 0) {\n  a();\n} else {\n  b();\n}", "if (x <= 0) {\n  b();\n} else {\n  a();\n}"),
            vec![BodyRefactoringKind::InvertCondition]
        );
        assert_eq!(
            detect("if (a && b) {\n  x();\n}", "if (a) {\n  if (b) {\n    x();\n  }\n}"),
            vec![BodyRefactoringKind::SplitConditional]
        );
        assert_eq!(
            detect("for (String s : items) {\n  log(s);\n}", "items.forEach(s -> log(s));"),
            vec![BodyRefactoringKind::ReplaceLoopWithPipeline]
        );
        assert_eq!(
            detect(
                "try { a(); } catch (IOException e) { log(e); } catch (SQLException e) { log(e); }",
                "try { a(); } catch (IOException | SQLException e) { log(e); }"
            ),
            vec![BodyRefactoringKind::MergeCatch]
        );
    }
}
