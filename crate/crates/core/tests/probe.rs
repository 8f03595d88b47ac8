use blocktrace::srcmodel::{element_type_at, parse_file};
use blocktrace::testkit::RepoScript;
use blocktrace::tracker::{compare_blocks, BlockAt};
use blocktrace::{ChangeKind, Config, StatementKind};

const SRC: &str = "package app;

class Probe {
    void run(List<Integer> xs, int n) {
        if (n > 0 && n < 9) {
            go(n);
        } else if (n < 0) {
            stop();
        }
        try {
            read();
        } catch (IOException e) {
            warn(e);
        } finally {
            close();
        }
        xs.stream().filter(x -> x > n).forEach(this::emit);
        do {
            n--;
        } while (n > 5);
        int k = n + 1;
    }
}
";

fn line(needle: &str) -> usize {
    SRC.lines().position(|l| l.contains(needle)).unwrap() + 1
}

#[test]
fn element_types_by_line_and_selection() {
    let types = parse_file("Probe.java", SRC).unwrap();
    let at = |n: &str, sel: Option<&str>| element_type_at(&types, line(n), sel);
    assert_eq!(at("if (n > 0", None), Some("if"));
    assert_eq!(at("if (n > 0", Some("if")), Some("if"));
    assert_eq!(at("} else if", Some("if")), Some("if"));
    assert_eq!(at("try {", Some("try")), Some("try"));
    assert_eq!(at("catch (IOException", Some("catch")), Some("catch"));
    assert_eq!(at("finally", Some("finally")), Some("finally"));
    assert_eq!(at("xs.stream()", Some("filter")), Some("pipeline"));
    assert_eq!(at("do {", Some("do")), Some("do-while"));
}

#[test]
fn operators_and_plain_statements_are_invalid() {
    let types = parse_file("Probe.java", SRC).unwrap();
    let at = |n: &str, sel: Option<&str>| element_type_at(&types, line(n), sel);
    assert_eq!(at("if (n > 0", Some("&&")), None);
    assert_eq!(at("if (n > 0", Some(">")), None);
    assert_eq!(at("if (n > 0", Some("while")), None);
    assert_eq!(at("int k", None), None);
    assert_eq!(at("go(n);", Some("go")), None);
    assert_eq!(at("class Probe", None), None);
}

#[test]
fn compare_blocks_across_files() {
    let a = "src/A.java";
    let b = "src/B.java";
    let mut s = RepoScript::new();
    let c0 = s.commit("a", |w| {
        w.write(a, "package p;\nclass A {\n    void f(boolean ready) {\n        if (ready) {\n            go();\n        }\n    }\n}\n");
    });
    let c1 = s.commit("b", |w| {
        w.write(b, "package p;\nclass B {\n    void g(boolean ready) {\n        if (ready) {\n            go();\n            stop();\n        }\n    }\n}\n");
    });
    let dir = tempfile::tempdir().unwrap();
    let built = s.build(dir.path()).unwrap();
    let repo = built.repository().unwrap();
    let at = |c: usize, file: &str| BlockAt {
        commit: built.id(c).to_string(),
        file: file.to_string(),
        kind: StatementKind::If,
        line: 4,
    };
    let changes = compare_blocks(&repo, &at(c0, a), &at(c1, b), &Config::default()).unwrap();
    let kinds: Vec<ChangeKind> = changes.iter().map(|c| c.kind.clone()).collect();
    assert_eq!(kinds, vec![ChangeKind::BodyChange]);
    let same = compare_blocks(&repo, &at(c0, a), &at(c1, a), &Config::default()).unwrap();
    assert!(same.is_empty());
    let missing = BlockAt { line: 5, ..at(c0, a) };
    assert!(matches!(
        compare_blocks(&repo, &missing, &at(c1, b), &Config::default()),
        Err(blocktrace::Error::CodeElementNotFound { .. })
    ));
}
