#![allow(dead_code)]

use blocktrace::testkit::{RepoScript, ScriptedRepo};

pub const SVC: &str = "src/main/java/app/Svc.java";
pub const COPY: &str = "src/main/java/app/Copy.java";
pub const BROKEN: &str = "src/main/java/app/Broken.java";

pub fn svc(cond: &str, body: &str) -> String {
    format!(
        "package app;\n\npublic class Svc {{\n\n    public void run(int n) {{\n        prepare();\n        if ({cond}) {{\n            {body}\n        }}\n        finish();\n    }}\n}}\n"
    )
}

/// Line of the tracked `if` in [`svc`] sources.
pub const IF_LINE: usize = 7;
/// Line of the `if` in [`COPY`].
pub const COPY_IF_LINE: usize = 6;

/// A small history: the `if` in `Svc.run` is introduced, then edited
/// twice; a second class later receives a modified copy of it, and a file
/// that does not parse is added last.
pub struct Fixture {
    pub _dir: tempfile::TempDir,
    pub repo: ScriptedRepo,
    pub intro: usize,
    pub cond: usize,
    pub body: usize,
    pub copy: usize,
}

pub fn fixture() -> Fixture {
    let mut s = RepoScript::new();
    s.commit("readme", |b| {
        b.write("README.md", "demo\n");
    });
    let intro = s.commit("svc", |b| {
        b.write(SVC, svc("n > 0", "send(n);"));
    });
    let cond = s.commit("cond", |b| {
        b.write(SVC, svc("n > 1", "send(n);"));
    });
    let body = s.commit("body", |b| {
        b.write(SVC, svc("n > 1", "send(n, true);"));
    });
    let copy = s.commit("copy", |b| {
        b.write(
            COPY,
            "package app;\n\nclass Copy {\n\n    void go(int n) {\n        if (n > 1) {\n            send(n, true);\n            audit(n);\n        }\n    }\n}\n",
        );
    });
    s.commit("broken", |b| {
        b.write(BROKEN, "package app;\n\nclass Broken {\n    void f( {\n        if (x) {\n    }\n");
    });
    let dir = tempfile::tempdir().expect("tempdir");
    let repo = s.build(dir.path()).expect("fixture builds");
    Fixture {
        _dir: dir,
        repo,
        intro,
        cond,
        body,
        copy,
    }
}

impl Fixture {
    pub fn path(&self) -> String {
        self.repo.repository().expect("opens").root().display().to_string()
    }

    pub fn id(&self, i: usize) -> String {
        self.repo.id(i).to_string()
    }
}
