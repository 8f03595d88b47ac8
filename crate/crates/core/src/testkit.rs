//! Scripted git repositories for tests, fixtures and benchmarks.
//!
//! A [`RepoScript`] records a linear sequence of commits and materializes
//! them with a single `git fast-import` run, so building a few hundred
//! commits stays fast and byte-for-byte deterministic.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use crate::error::{Error, Result};
use crate::gitio::{Repository, GIT_ENV};

const EPOCH: i64 = 1_577_836_800; // 2020-01-01T00:00:00Z

#[derive(Debug, Clone)]
enum Op {
    Write(String, String),
    Delete(String),
}

#[derive(Debug, Clone)]
struct ScriptCommit {
    message: String,
    author: String,
    ops: Vec<Op>,
    touched: BTreeSet<String>,
}

/// Accumulates commits; see [`RepoScript::build`].
#[derive(Debug, Clone, Default)]
pub struct RepoScript {
    commits: Vec<ScriptCommit>,
    tree: BTreeMap<String, String>,
}

/// Mutations applied by one scripted commit.
pub struct CommitBuilder<'a> {
    tree: &'a mut BTreeMap<String, String>,
    ops: Vec<Op>,
    touched: BTreeSet<String>,
    author: Option<String>,
}

impl CommitBuilder<'_> {
    pub fn write(&mut self, path: &str, content: impl Into<String>) -> &mut Self {
        let content = content.into();
        if self.tree.get(path) != Some(&content) {
            self.touched.insert(path.to_string());
        }
        self.tree.insert(path.to_string(), content.clone());
        self.ops.push(Op::Write(path.to_string(), content));
        self
    }

    pub fn delete(&mut self, path: &str) -> &mut Self {
        assert!(self.tree.remove(path).is_some(), "delete of missing {path}");
        self.touched.insert(path.to_string());
        self.ops.push(Op::Delete(path.to_string()));
        self
    }

    pub fn rename(&mut self, from: &str, to: &str) -> &mut Self {
        let content = self.read(from);
        self.delete(from);
        self.write(to, content)
    }

    /// Replaces exactly one occurrence of `from` in `path`.
    pub fn replace(&mut self, path: &str, from: &str, to: &str) -> &mut Self {
        let content = self.read(path);
        assert_eq!(
            content.matches(from).count(),
            1,
            "`{from}` must occur exactly once in {path}"
        );
        self.write(path, content.replacen(from, to, 1))
    }

    pub fn read(&self, path: &str) -> String {
        self.tree
            .get(path)
            .unwrap_or_else(|| panic!("no file {path} in scripted tree"))
            .clone()
    }

    pub fn author(&mut self, name: &str) -> &mut Self {
        self.author = Some(name.to_string());
        self
    }
}

impl RepoScript {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a commit and returns its index (0-based).
    pub fn commit(&mut self, message: &str, edit: impl FnOnce(&mut CommitBuilder<'_>)) -> usize {
        let mut builder = CommitBuilder {
            tree: &mut self.tree,
            ops: Vec::new(),
            touched: BTreeSet::new(),
            author: None,
        };
        edit(&mut builder);
        let CommitBuilder {
            ops,
            touched,
            author,
            ..
        } = builder;
        self.commits.push(ScriptCommit {
            message: message.to_string(),
            author: author.unwrap_or_else(|| "Scripted Author".to_string()),
            ops,
            touched,
        });
        self.commits.len() - 1
    }

    pub fn len(&self) -> usize {
        self.commits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.commits.is_empty()
    }

    /// Indices of commits whose diff touched `path`.
    pub fn touching(&self, path: &str) -> Vec<usize> {
        self.commits
            .iter()
            .enumerate()
            .filter(|(_, c)| c.touched.contains(path))
            .map(|(i, _)| i)
            .collect()
    }

    /// Current content of `path` after the last recorded commit.
    pub fn file(&self, path: &str) -> Option<&str> {
        self.tree.get(path).map(String::as_str)
    }

    pub fn build(&self, dir: impl AsRef<Path>) -> Result<ScriptedRepo> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let git = std::env::var_os(GIT_ENV).unwrap_or_else(|| "git".into());
        let status = Command::new(&git)
            .args(["init", "--quiet", "--initial-branch=main"])
            .current_dir(dir)
            .status()?;
        if !status.success() {
            return Err(Error::Git {
                args: "init".into(),
                stderr: format!("exit {status}"),
            });
        }

        let marks = dir.join(".git").join("scripted-marks");
        let mut child = Command::new(&git)
            .arg("fast-import")
            .arg("--quiet")
            .arg(format!("--export-marks={}", marks.display()))
            .current_dir(dir)
            .stdin(Stdio::piped())
            .stdout(Stdio::null())
            .stderr(Stdio::piped())
            .spawn()?;
        {
            let mut stdin = std::io::BufWriter::new(child.stdin.take().expect("piped stdin"));
            for (i, commit) in self.commits.iter().enumerate() {
                let mark = i + 1;
                let ts = EPOCH + 3600 * i as i64;
                let email = commit.author.to_lowercase().replace(' ', ".");
                writeln!(stdin, "commit refs/heads/main")?;
                writeln!(stdin, "mark :{mark}")?;
                writeln!(stdin, "author {} <{email}@example.com> {ts} +0000", commit.author)?;
                writeln!(stdin, "committer {} <{email}@example.com> {ts} +0000", commit.author)?;
                writeln!(stdin, "data {}", commit.message.len())?;
                writeln!(stdin, "{}", commit.message)?;
                if i > 0 {
                    writeln!(stdin, "from :{}", mark - 1)?;
                }
                for op in &commit.ops {
                    match op {
                        Op::Write(path, content) => {
                            writeln!(stdin, "M 100644 inline {path}")?;
                            writeln!(stdin, "data {}", content.len())?;
                            writeln!(stdin, "{content}")?;
                        }
                        Op::Delete(path) => writeln!(stdin, "D {path}")?,
                    }
                }
                writeln!(stdin)?;
            }
            stdin.flush()?;
        }
        let out = child.wait_with_output()?;
        if !out.status.success() {
            return Err(Error::Git {
                args: "fast-import".into(),
                stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
            });
        }

        let mut ids = vec![String::new(); self.commits.len()];
        if !self.commits.is_empty() {
            for line in std::fs::read_to_string(&marks)?.lines() {
                let (mark, id) = line
                    .trim_start_matches(':')
                    .split_once(' ')
                    .ok_or_else(|| Error::Invalid(format!("bad mark line {line}")))?;
                let idx: usize = mark
                    .parse()
                    .map_err(|_| Error::Invalid(format!("bad mark {mark}")))?;
                ids[idx - 1] = id.to_string();
            }
            Command::new(&git)
                .args(["reset", "--hard", "--quiet"])
                .current_dir(dir)
                .status()?;
        }
        Ok(ScriptedRepo {
            path: dir.to_path_buf(),
            commits: ids,
        })
    }
}

/// A materialized [`RepoScript`].
#[derive(Debug, Clone)]
pub struct ScriptedRepo {
    pub path: PathBuf,
    pub commits: Vec<String>,
}

impl ScriptedRepo {
    pub fn repository(&self) -> Result<Repository> {
        Repository::open(&self.path)
    }

    pub fn id(&self, index: usize) -> &str {
        &self.commits[index]
    }

    pub fn head(&self) -> &str {
        self.commits.last().expect("empty scripted repo")
    }
}

/// A long history for timing: one tracked file among busy neighbours.
#[derive(Debug, Clone)]
pub struct SyntheticHistory {
    pub script: RepoScript,
    /// Path of the tracked file.
    pub file: String,
    /// 1-based line of the tracked `if` at the last commit.
    pub line: usize,
    /// Commits that touched the tracked file.
    pub touching: Vec<usize>,
}

/// Builds `total` commits of which `touching` modify the tracked file.
/// Touching commits rotate between editing the tracked block, the rest of
/// its method, and a neighbouring method.
pub fn synthetic_history(total: usize, touching: usize) -> SyntheticHistory {
    assert!(touching >= 1 && touching <= total, "need 1 <= touching <= total");
    let file = "src/main/java/app/Busy.java";
    let filler: String = (0..20)
        .map(|i| format!("    public int filler{i}(int x) {{\n        int y = x * {i};\n        return y + {i};\n    }}\n\n"))
        .collect();
    let initial = format!(
        "package app;\n\npublic class Busy {{\n\n    public void run(int n) {{\n        prepare(0);\n        if (n > 0) {{\n            log(n);\n            send(n, 0);\n        }}\n        finish();\n    }}\n\n    public int helper() {{\n        return 0;\n    }}\n\n{filler}}}\n"
    );
    let mut script = RepoScript::new();
    // touching commits spread evenly, the first one creates the file
    let every = total as f64 / touching as f64;
    let marks: BTreeSet<usize> = (0..touching).map(|k| (k as f64 * every) as usize).collect();
    let (mut block, mut method, mut other) = (0usize, 0usize, 0usize);
    for i in 0..total {
        if i == 0 {
            script.commit("create", |b| {
                b.write(file, initial.clone());
            });
            continue;
        }
        if marks.contains(&i) {
            match i % 3 {
                0 => {
                    block += 1;
                    let (old, new) = (format!("send(n, {});", block - 1), format!("send(n, {block});"));
                    script.commit("edit block", |b| {
                        b.replace(file, &old, &new);
                    });
                }
                1 => {
                    method += 1;
                    let (old, new) = (format!("prepare({});", method - 1), format!("prepare({method});"));
                    script.commit("edit method", |b| {
                        b.replace(file, &old, &new);
                    });
                }
                _ => {
                    other += 1;
                    let (old, new) = (format!("return {};", other - 1), format!("return {other};"));
                    script.commit("edit helper", |b| {
                        b.replace(file, &old, &new);
                    });
                }
            }
        } else {
            let path = format!("src/main/java/app/Noise{}.java", i % 7);
            script.commit("noise", |b| {
                b.write(&path, format!("package app;\n\nclass Noise{} {{\n    int v = {i};\n}}\n", i % 7));
            });
        }
    }
    let text = script.file(file).expect("tracked file exists");
    let line = text
        .lines()
        .position(|l| l.contains("if (n > 0)"))
        .expect("tracked block present")
        + 1;
    let touching = script.touching(file);
    SyntheticHistory {
        script,
        file: file.to_string(),
        line,
        touching,
    }
}
