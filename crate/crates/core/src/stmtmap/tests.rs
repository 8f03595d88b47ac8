use super::*;
use crate::srcmodel::parse_snippet;

fn map(a: &str, b: &str) -> (StatementNode, StatementNode, MappingSet) {
    let l = parse_snippet(a).unwrap();
    let r = parse_snippet(b).unwrap();
    let m = map_trees(&l, &r, &MapConfig::default()).unwrap();
    (l, r, m)
}

fn p(v: &[usize]) -> NodePath {
    NodePath(v.to_vec())
}

fn assert_conserved(l: &StatementNode, r: &StatementNode, m: &MappingSet) {
    assert_eq!(m.matched_left() + m.unmatched_left.len(), l.size() - 1);
    assert_eq!(m.matched_right() + m.unmatched_right.len(), r.size() - 1);
    let mut seen = HashSet::new();
    for x in m
        .mappings
        .iter()
        .map(|x| &x.left)
        .chain(m.multi.iter().flat_map(|g| g.lefts.iter()))
        .chain(m.unmatched_left.iter())
    {
        assert!(seen.insert(x.clone()), "left {x:?} listed twice");
    }
}

#[test]
fn identity() {
    let src = "int a = 1;\nif (a > 0) {\n  for (int i = 0; i < a; i++) { x(i); }\n} else {\n  y();\n}\ntry { z(); } catch (E e) { w(); }";
    let (l, r, m) = map(src, src);
    assert!(m.unmatched_left.is_empty() && m.unmatched_right.is_empty());
    assert_eq!(m.replacement_count(), 0);
    for x in &m.mappings {
        assert_eq!(x.left, x.right);
    }
    assert_conserved(&l, &r, &m);
}

#[test]
fn single_rename() {
    let (l, r, m) = map("int x = 1;\nfoo(x);\nbar();", "int y = 1;\nfoo(y);\nbar();");
    assert_eq!(m.mappings.len(), 3);
    assert_eq!(m.replacement_count(), 2);
    assert_eq!(m.for_left(&p(&[2])).unwrap().replacements.len(), 0);
    assert_conserved(&l, &r, &m);
}

#[test]
fn expression_change_keeps_block() {
    let (_, _, m) = map("if (a) { x(); y(); }", "if (b) { x(); y(); }");
    let top = m.for_left(&p(&[0])).unwrap();
    assert_eq!(top.right, p(&[0]));
    assert_eq!(top.replacements[0].kind, ReplacementKind::Expression);
}

#[test]
fn identical_expression_exception() {
    let (_, _, m) = map("if (flag) { a(); }", "if (flag) { completely.different(1, 2, 3); }");
    assert!(m.for_left(&p(&[0])).is_some());
}

#[test]
fn unmatched_when_no_evidence() {
    // zero child pairs, different conditions
    let (_, _, m) = map(
        "if (allow) {\n  a = compute(x);\n  b.add(a);\n  log(b);\n}",
        "if (allow && cls != null) {\n  reqd = !isUnchecked(cls);\n}",
    );
    assert!(m.unmatched_left.contains(&p(&[0])));
    assert!(m.unmatched_right.contains(&p(&[0])));
}

#[test]
fn ranking_prefers_child_match_ratio() {
    let left = "if (!(v == null)) {\n  return d;\n}";
    let right = "if (v != null) {\n  s1();\n  if (w) {\n    return d;\n  }\n  s2();\n}";
    let (l, r, m) = map(left, right);
    assert_eq!(m.for_left(&p(&[0])).unwrap().right, p(&[0, 1]));
    let inner = child_match_ratio(&l, &p(&[0]), &r, &p(&[0, 1]), &m);
    let outer = child_match_ratio(&l, &p(&[0]), &r, &p(&[0]), &m);
    assert!((inner - 1.0).abs() < 1e-9);
    assert!((outer - 0.25).abs() < 1e-9);
}

#[test]
fn ratio_edge_cases() {
    let (l, r, m) = map("if (a) { x(); }", "if (a) { x(); }");
    assert_eq!(child_match_ratio(&l, &p(&[0]), &r, &p(&[0]), &m), 1.0);
    let (l, r, m) = map("if (a) { x = compute(b, c); }", "if (a) { return; }");
    assert_eq!(child_match_ratio(&l, &p(&[0]), &r, &p(&[0]), &m), 0.0);
    let (l, r, m) = map("if (a) { }", "if (a) { }");
    assert_eq!(child_match_ratio(&l, &p(&[0]), &r, &p(&[0]), &m), 1.0);
}

#[test]
fn split_conditional_and() {
    let (l, r, m) = map("if (a && b) {\n  x();\n}", "if (a) {\n  if (b) {\n    x();\n  }\n}");
    let g = m.multi_for_left(&p(&[0])).unwrap();
    assert_eq!(g.kind, MultiKind::Split);
    assert_eq!(g.rights, vec![p(&[0]), p(&[0, 0])]);
    assert_conserved(&l, &r, &m);
}

#[test]
fn merge_conditional_or() {
    let (l, r, m) = map(
        "if (a) {\n  fail();\n}\nif (b) {\n  fail();\n}",
        "if (a || b) {\n  fail();\n}",
    );
    let g = m.multi_for_right(&p(&[0])).unwrap();
    assert_eq!(g.kind, MultiKind::Merge);
    assert_eq!(g.lefts, vec![p(&[0]), p(&[1])]);
    assert_conserved(&l, &r, &m);
}

#[test]
fn merge_catch() {
    let (l, r, m) = map(
        "try { a(); } catch (IOException e) { log(e); } catch (SQLException e) { log(e); }",
        "try { a(); } catch (IOException | SQLException e) { log(e); }",
    );
    let g = m.multi_for_right(&p(&[0, 1])).unwrap();
    assert_eq!(g.lefts, vec![p(&[0, 1]), p(&[0, 2])]);
    assert!(m.for_left(&p(&[0])).is_some());
    assert_conserved(&l, &r, &m);
}

#[test]
fn transformations_are_attached() {
    let (_, _, m) = map(
        "for (String s : items) {\n  log(s);\n}",
        "items.forEach(s -> log(s));",
    );
    let t = m.for_left(&p(&[0])).unwrap().transformation.unwrap();
    assert_eq!(t.kind, TransformKind::LoopToPipeline);
    let (_, _, m) = map(
        "if (k == 1) {\n  a();\n} else if (k == 2) {\n  b();\n}",
        "switch (k) {\n  case 1:\n    a();\n    break;\n  case 2:\n    b();\n    break;\n}",
    );
    let top = m.for_left(&p(&[0])).unwrap();
    assert_eq!(top.right, p(&[0]));
    assert_eq!(top.transformation.unwrap().kind, TransformKind::IfElseIfToSwitch);
}

#[test]
fn moved_statements_keep_identity() {
    let (_, _, m) = map(
        "a();\nif (c) {\n  b();\n}\nd();",
        "if (c) {\n  b();\n  a();\n}\nd();",
    );
    assert_eq!(m.for_left(&p(&[0])).unwrap().right, p(&[0, 1]));
    assert_eq!(m.for_left(&p(&[1])).unwrap().right, p(&[0]));
}

#[test]
fn duplicate_leaves_prefer_context() {
    let (_, _, m) = map(
        "if (a) {\n  break;\n}\nwhile (b) {\n  break;\n}",
        "while (b) {\n  break;\n}\nif (a) {\n  go();\n  break;\n}",
    );
    assert_eq!(m.for_left(&p(&[0, 0])).unwrap().right, p(&[1, 1]));
    assert_eq!(m.for_left(&p(&[1, 0])).unwrap().right, p(&[0, 0]));
}

#[test]
fn masks_restrict_participants() {
    let l = parse_snippet("a();\nb();").unwrap();
    let r = parse_snippet("a();\nb();").unwrap();
    let mask: HashSet<NodePath> = [p(&[1])].into_iter().collect();
    let m = map_masked(&l, &r, Some(&mask), None, &MapConfig::default()).unwrap();
    assert_eq!(m.mappings.len(), 1);
    assert_eq!(m.unmatched_left.len(), 0);
    assert_eq!(m.unmatched_right, vec![p(&[0])]);
}

#[test]
fn size_limit() {
    let l = parse_snippet("a();\nb();").unwrap();
    let err = map_trees(&l, &l, &MapConfig { size_limit: 3 }).unwrap_err();
    assert!(matches!(err, Error::SizeLimit { nodes: 4, limit: 3 }));
}

#[test]
fn operand_splitting() {
    assert_eq!(operands("a && ( b || c )").unwrap(), vec!["a", "b || c"]);
    assert_eq!(operands("x || y").unwrap(), vec!["x", "y"]);
    assert!(operands("f ( a && b )").is_none());
    assert_eq!(strip_parens("( a ) && ( b )"), "( a ) && ( b )");
}

#[test]
fn catch_type_lists() {
    let t = parse_snippet("try { } catch (final IOException | java.sql.SQLException e) { }").unwrap();
    assert_eq!(catch_types(&t.children[0].children[0]), vec!["IOException", "java.sql.SQLException"]);
}
