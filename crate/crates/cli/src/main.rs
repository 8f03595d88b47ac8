use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use blocktrace::evalkit::{
    gitlog_baseline, score_commits, score_with, time_session, BaselineRequest, Level, OracleEntry, RangeRestart,
    ScoreOptions, ScoreReport,
};
use blocktrace::srcmodel::{element_type_at, parse_file};
use blocktrace::{wire, BlockTracker, Config, Error, GraphDocument, Repository};
use blocktrace_cli::repos::RepoPool;
use blocktrace_cli::server::{serve, AppState};
use blocktrace_cli::{block_kind, exit_code, run_track, TrackRequest};

#[derive(Parser)]
#[command(name = "blocktrace", version, about = "Commit history of Java code blocks, refactoring aware")]
struct Cli {
    /// TOML file overriding tracker settings.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct BlockArgs {
    #[arg(long)]
    repo: PathBuf,
    #[arg(long, default_value = "HEAD")]
    commit: String,
    /// Path of the Java file inside the repository.
    #[arg(long)]
    file: String,
    /// Block type, e.g. if, for, enhanced-for, catch, pipeline.
    #[arg(long = "type")]
    kind: String,
    /// 1-based line the block starts on.
    #[arg(long)]
    line: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Commit,
    Change,
    Both,
}

#[derive(Subcommand)]
enum Command {
    /// Track one block and print its history graph as JSON.
    Track(BlockArgs),
    /// Print the block type at a location, or `invalid`.
    ElementType {
        #[arg(long)]
        repo: PathBuf,
        #[arg(long, default_value = "HEAD")]
        commit: String,
        #[arg(long)]
        file: String,
        #[arg(long)]
        line: usize,
        /// Selected word, e.g. `if`.
        #[arg(long)]
        selection: Option<String>,
    },
    /// Score histories against oracles. Repeat the flags for several pairs.
    Score {
        #[arg(long, required = true)]
        history: Vec<PathBuf>,
        #[arg(long, required = true)]
        oracle: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "both")]
        level: LevelArg,
        /// Only follow the first parent at forks, as a line-range tool would.
        #[arg(long)]
        baseline_fair: bool,
    },
    /// Run a line-range baseline.
    Baseline {
        #[command(subcommand)]
        tool: BaselineTool,
    },
    /// Track one block and report where the time went.
    Time(BlockArgs),
    /// Serve the HTTP API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Where remote repositories are cloned.
        #[arg(long, default_value = "workspace")]
        workspace: PathBuf,
        /// Where review sessions are checkpointed.
        #[arg(long)]
        sessions: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum BaselineTool {
    /// `git log -L` over the block's line range.
    GitLog {
        #[arg(long)]
        repo: PathBuf,
        #[arg(long, default_value = "HEAD")]
        commit: String,
        #[arg(long)]
        file: String,
        #[arg(long)]
        start: usize,
        #[arg(long)]
        end: usize,
        /// Commit that introduced the block; older reports are dropped.
        #[arg(long)]
        introduced: Option<String>,
        /// Range to resume from after a reformatting commit: COMMIT:START:END[:FILE].
        #[arg(long = "restart", value_parser = parse_restart)]
        restarts: Vec<RangeRestart>,
        /// Score the reported commits against this oracle.
        #[arg(long)]
        oracle: Option<PathBuf>,
    },
}

fn parse_restart(s: &str) -> Result<RangeRestart, String> {
    let parts: Vec<&str> = s.splitn(4, ':').collect();
    if parts.len() < 3 {
        return Err("expected COMMIT:START:END[:FILE]".into());
    }
    let num = |p: &str| p.parse::<usize>().map_err(|e| format!("bad line `{p}`: {e}"));
    Ok(RangeRestart {
        commit: parts[0].to_string(),
        start_line: num(parts[1])?,
        end_line: num(parts[2])?,
        file: parts.get(3).map(|f| f.to_string()),
    })
}

fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    // no trailing newline: stdout must equal the HTTP body byte for byte
    let _ = out.write_all(text.as_bytes());
    let _ = out.flush();
}

fn read(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(Error::from)
}

fn levels(l: LevelArg) -> Vec<Level> {
    match l {
        LevelArg::Commit => vec![Level::Commit],
        LevelArg::Change => vec![Level::Change],
        LevelArg::Both => vec![Level::Commit, Level::Change],
    }
}

fn score(histories: &[PathBuf], oracles: &[PathBuf], level: LevelArg, fair: bool) -> Result<(), Error> {
    if histories.len() != oracles.len() {
        return Err(Error::Invalid("give one --oracle per --history".into()));
    }
    let opts = ScoreOptions { baseline_fair: fair };
    let levels = levels(level);
    let mut rows = Vec::new();
    for (h, o) in histories.iter().zip(oracles) {
        let doc = GraphDocument::from_json(&read(h)?)?;
        let oracle = OracleEntry::from_json(&read(o)?)?;
        let reports = levels
            .iter()
            .map(|l| score_with(&doc, &oracle, *l, opts))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push((h, reports));
    }
    if rows.len() == 1 && levels.len() == 1 {
        println!("{}", serde_json::to_string_pretty(&rows[0].1[0])?);
        return Ok(());
    }
    let aggregate: Vec<ScoreReport> = levels
        .iter()
        .enumerate()
        .map(|(i, l)| ScoreReport::aggregate(*l, rows.iter().map(|r| &r.1[i])))
        .collect();
    let doc = json!({
        "reports": rows.iter().map(|(h, r)| json!({ "history": h, "scores": r })).collect::<Vec<_>>(),
        "aggregate": aggregate,
    });
    println!("{}", serde_json::to_string_pretty(&doc)?);
    eprintln!("{:<8} {:>6} {:>6} {:>6} {:>10} {:>10}", "level", "tp", "fp", "fn", "precision", "recall");
    for a in &aggregate {
        let name = match a.level {
            Level::Commit => "commit",
            Level::Change => "change",
        };
        eprintln!(
            "{:<8} {:>6} {:>6} {:>6} {:>9.2}% {:>9.2}%",
            name,
            a.tp,
            a.fp,
            a.fn_,
            a.precision * 100.0,
            a.recall * 100.0
        );
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    let config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Track(a) => {
            let repo = Repository::open(&a.repo)?;
            let req = TrackRequest {
                repo_path: Some(a.repo.display().to_string()),
                clone_url: None,
                commit: a.commit,
                file_path: a.file,
                block_type: a.kind,
                line: a.line,
            };
            match run_track(&repo, &req, &config) {
                Ok(g) => emit(&wire::to_json(&g)),
                Err(Error::Aborted { partial, source }) => {
                    emit(&wire::to_json(&partial));
                    return Err(Error::Aborted { partial, source });
                }
                Err(e) => return Err(e),
            }
        }
        Command::ElementType {
            repo,
            commit,
            file,
            line,
            selection,
        } => {
            let repo = Repository::open(&repo)?;
            let c = repo.resolve(&commit)?;
            let text = repo.read_file(&c.id, &file)?.ok_or_else(|| Error::UnknownPath {
                path: file.clone(),
                commit: c.id.clone(),
            })?;
            let types = parse_file(&file, &text)?;
            println!("{}", element_type_at(&types, line, selection.as_deref()).unwrap_or("invalid"));
        }
        Command::Score {
            history,
            oracle,
            level,
            baseline_fair,
        } => score(&history, &oracle, level, baseline_fair)?,
        Command::Baseline {
            tool:
                BaselineTool::GitLog {
                    repo,
                    commit,
                    file,
                    start,
                    end,
                    introduced,
                    restarts,
                    oracle,
                },
        } => {
            let repo = Repository::open(&repo)?;
            let req = BaselineRequest {
                file,
                start_line: start,
                end_line: end,
                start_commit: commit,
                introduced,
                restarts,
            };
            let commits = gitlog_baseline(&repo, &req)?;
            let mut out = json!({ "commits": commits });
            if let Some(o) = oracle {
                let oracle = OracleEntry::from_json(&read(&o)?)?;
                out["score"] = serde_json::to_value(score_commits(&commits, &oracle))?;
            }
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::Time(a) => {
            let repo = Repository::open(&a.repo)?;
            let tracker = BlockTracker::builder()
                .repository(&repo)
                .file(a.file)
                .kind(block_kind(&a.kind)?)
                .line(a.line)
                .start_commit(a.commit)
                .config(config)
                .build()?;
            println!("{}", serde_json::to_string_pretty(&time_session(&tracker)?)?);
        }
        Command::Serve {
            port,
            host,
            workspace,
            sessions,
        } => {
            let state = Arc::new(AppState::new(RepoPool::new(workspace), config, sessions));
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(serve(state, (host, port).into()))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "warn,blocktrace_cli=info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    // exit code 2 is reserved for a missing code element
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
