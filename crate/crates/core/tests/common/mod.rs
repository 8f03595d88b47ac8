#![allow(dead_code)]

pub mod random;
pub mod scenarios;

use std::time::{Duration, Instant};

use blocktrace::evalkit::{score, ExpectedChange, Level, OracleEntry, ScoreReport, ORACLE_SCHEMA_VERSION};
use blocktrace::testkit::{RepoScript, ScriptedRepo};
use blocktrace::tracker::SessionLog;
use blocktrace::{BlockTracker, Config, GraphDocument, StatementKind};

/// Java source for one compilation unit.
pub fn java(pkg: &str, decl: &str, members: &[&str]) -> String {
    format!(
        "package {pkg};\n\nimport java.util.*;\nimport java.io.*;\n\n{decl} {{\n\n{}\n}}\n",
        members.join("\n\n")
    )
}

/// 1-based line of the first occurrence of `needle`.
pub fn line_of(text: &str, needle: &str) -> usize {
    text.lines()
        .position(|l| l.contains(needle))
        .unwrap_or_else(|| panic!("`{needle}` not found in\n{text}"))
        + 1
}

/// A scripted history plus the truth about one block at its last commit.
pub struct Scenario {
    pub name: String,
    pub script: RepoScript,
    pub file: String,
    /// Block type as reported, e.g. `if` or `pipeline`.
    pub kind: String,
    /// Text on the block's first line at the last commit.
    pub needle: String,
    /// Newest first: commit index and change tags.
    pub expected: Vec<(usize, Vec<String>)>,
    /// The oldest entry is the repository's first commit.
    pub root: bool,
}

pub struct Outcome {
    pub repo: ScriptedRepo,
    pub doc: GraphDocument,
    pub log: SessionLog,
    pub oracle: OracleEntry,
    pub commit: ScoreReport,
    pub change: ScoreReport,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn index_of(&self, id: &str) -> usize {
        self.repo.commits.iter().position(|c| c == id).expect("known commit")
    }

    /// Human readable dump of the tracked graph.
    pub fn describe(&self) -> String {
        let mut s = String::new();
        for (i, n) in self.doc.nodes.iter().enumerate() {
            s.push_str(&format!(
                "  node {i}: c{} {} {}:{}-{} {}\n",
                self.index_of(&n.commit_id),
                n.block_type,
                n.file,
                n.start_line,
                n.end_line,
                n.diagnostics.join("; ")
            ));
        }
        for e in &self.doc.edges {
            let tags: Vec<String> = e.changes.iter().map(|c| c.kind.tag()).collect();
            s.push_str(&format!("  edge {:?} -> {}: {:?}\n", e.from, e.to, tags));
        }
        for l in &self.log.entries {
            s.push_str(&format!(
                "  log c{} {:?} {}\n",
                self.index_of(&l.commit),
                l.step,
                l.outcome
            ));
        }
        s
    }

    pub fn perfect(&self) -> bool {
        self.commit.is_perfect() && self.change.is_perfect()
    }
}

impl Scenario {
    pub fn new(name: &str, file: &str, kind: &str, needle: &str) -> Self {
        Scenario {
            name: name.to_string(),
            script: RepoScript::new(),
            file: file.to_string(),
            kind: kind.to_string(),
            needle: needle.to_string(),
            expected: Vec::new(),
            root: false,
        }
    }

    pub fn expect(mut self, commit: usize, tags: &[&str]) -> Self {
        self.expected.push((commit, tags.iter().map(|t| t.to_string()).collect()));
        self
    }

    pub fn line(&self) -> usize {
        let text = self.script.file(&self.file).expect("tracked file exists at head");
        line_of(text, &self.needle)
    }

    pub fn oracle(&self, repo: &ScriptedRepo) -> OracleEntry {
        let n = self.expected.len();
        OracleEntry {
            schema_version: ORACLE_SCHEMA_VERSION,
            repository: self.name.clone(),
            file: self.file.clone(),
            block_kind: self.kind.clone(),
            block_key: self.needle.clone(),
            expected: self
                .expected
                .iter()
                .enumerate()
                .map(|(i, (c, tags))| ExpectedChange {
                    commit_id: repo.id(*c).to_string(),
                    change_types: tags.clone(),
                    before: None,
                    after: None,
                    existed_since_first_commit: self.root && i + 1 == n,
                })
                .collect(),
        }
    }

    pub fn run(&self) -> Outcome {
        self.run_with(Config::default())
    }

    pub fn run_with(&self, cfg: Config) -> Outcome {
        let dir = tempfile::tempdir().expect("tempdir");
        let built = self.script.build(dir.path()).expect("scripted repo builds");
        let repo = built.repository().expect("repo opens");
        let kind = StatementKind::parse(&self.kind).expect("known kind");
        let tracker = BlockTracker::builder()
            .repository(&repo)
            .file(self.file.clone())
            .kind(kind)
            .line(self.line())
            .config(cfg)
            .build()
            .expect("tracker builds");
        let t0 = Instant::now();
        let (graph, log) = tracker
            .track_with_log()
            .unwrap_or_else(|e| panic!("{}: tracking failed: {e}", self.name));
        let elapsed = t0.elapsed();
        let doc = GraphDocument::from(&graph);
        let oracle = self.oracle(&built);
        oracle.validate().expect("scenario oracle is valid");
        let commit = score(&doc, &oracle, Level::Commit).expect("kinds agree");
        let change = score(&doc, &oracle, Level::Change).expect("kinds agree");
        // keep the checkout alive only as long as needed
        drop(tracker);
        drop(repo);
        let out = Outcome {
            repo: built,
            doc,
            log,
            oracle,
            commit,
            change,
            elapsed,
        };
        drop(dir);
        out
    }

    /// Runs and panics with a graph dump unless both levels are perfect.
    pub fn check(&self) -> Outcome {
        let out = self.run();
        assert!(
            out.perfect(),
            "{}: commit {:?} change {:?}\nexpected {:?}\n{}",
            self.name,
            out.commit,
            out.change,
            self.expected,
            out.describe()
        );
        out
    }
}

/// A scenario's repository built once for repeated tracking.
pub struct Built {
    _dir: tempfile::TempDir,
    pub repo: ScriptedRepo,
}

impl Scenario {
    pub fn build(&self) -> Built {
        let dir = tempfile::tempdir().expect("tempdir");
        let repo = self.script.build(dir.path()).expect("scripted repo builds");
        Built { _dir: dir, repo }
    }

    /// Tracks the block in an already built repository.
    pub fn track_in(&self, built: &Built, cfg: Config) -> (GraphDocument, Duration) {
        let repo = built.repo.repository().expect("repo opens");
        let tracker = BlockTracker::builder()
            .repository(&repo)
            .file(self.file.clone())
            .kind(StatementKind::parse(&self.kind).expect("known kind"))
            .line(self.line())
            .config(cfg)
            .build()
            .expect("tracker builds");
        let t0 = Instant::now();
        let g = tracker.track().unwrap_or_else(|e| panic!("{}: {e}", self.name));
        (GraphDocument::from(&g), t0.elapsed())
    }
}
