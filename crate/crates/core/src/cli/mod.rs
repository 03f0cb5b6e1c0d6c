//! The `workbench` command line: problem files, task dispatch, reports and
//! the built-in gallery.
//!
//! Exit codes: 0 all tasks pass, 1 usage, 2 parse, 3 semantic (including
//! checker errors at run time), 4 some check failed.

pub mod dsl;
pub mod gallery;
pub mod output;
pub mod resolve;
pub mod tasks;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::im::Probes;
use crate::kernel::{eval_expr, parse_expr_free, KernelError};

use tasks::Status;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_SEMANTIC: i32 = 3;
pub const EXIT_FAIL: i32 = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("line {line}: {msg}")]
    Semantic { line: usize, msg: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Parse { .. } => EXIT_PARSE,
            CliError::Semantic { .. } => EXIT_SEMANTIC,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ProbeSet {
    /// Frames plus coordinate-scaled frames.
    Extra,
    /// Frames only.
    Frames,
}

#[derive(Debug, Parser)]
#[command(name = "workbench", version, about = "Exact checks for Lie algebroids and IM tensors")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Run the tasks of a problem file (`gallery:NAME` runs a built-in one).
    Run {
        file: String,
        /// Also write a JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Only run tasks with this command name or full id.
        #[arg(long)]
        task: Option<String>,
        #[arg(long, value_enum, default_value = "extra")]
        probes: ProbeSet,
    },
    /// Print a gallery entry (`list` for the names).
    Gallery {
        name: String,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Parse and normalize one expression.
    Check { expr: String },
}

pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_PASS,
                _ => EXIT_USAGE,
            };
        }
    };
    let res = match cli.cmd {
        Cmd::Run { file, json, task, probes } => {
            let p = match probes {
                ProbeSet::Extra => Probes::Scaled,
                ProbeSet::Frames => Probes::Frames,
            };
            run(&file, json.as_deref(), task.as_deref(), p)
        }
        Cmd::Gallery { name, emit } => show_gallery(&name, emit.as_deref()),
        Cmd::Check { expr } => check_expr(&expr),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn read_source(file: &str) -> Result<String, CliError> {
    if let Some(name) = file.strip_prefix("gallery:") {
        return gallery::source(name).map(str::to_string).ok_or_else(|| CliError::Usage(gallery::unknown(name)));
    }
    std::fs::read_to_string(file).map_err(|e| CliError::Usage(format!("cannot read {file}: {e}")))
}

/// Parses, resolves and plans every task, then runs them concurrently.
pub fn run_source(src: &str, only: Option<&str>, probes: Probes) -> Result<Vec<tasks::TaskOutcome>, CliError> {
    let pf = dsl::parse(src)?;
    let model = resolve::Model::build(&pf)?;
    let selected: Vec<&dsl::TaskLine> =
        pf.tasks.iter().filter(|t| only.is_none_or(|n| t.command == n || t.id() == n)).collect();
    if let Some(n) = only {
        if selected.is_empty() {
            return Err(CliError::Usage(format!("no task matches `{n}`")));
        }
    }
    let jobs = selected.iter().map(|t| tasks::plan(t, &model)).collect::<Result<Vec<_>, _>>()?;
    Ok(std::thread::scope(|s| {
        let handles: Vec<_> =
            selected.iter().zip(&jobs).map(|(t, j)| s.spawn(move || tasks::run_task(t, j, probes))).collect();
        handles.into_iter().map(|h| h.join().expect("task thread panicked")).collect()
    }))
}

fn run(file: &str, json: Option<&std::path::Path>, only: Option<&str>, probes: Probes) -> Result<i32, CliError> {
    let src = read_source(file)?;
    let outcomes = run_source(&src, only, probes)?;
    print!("{}", output::text(&outcomes));
    if let Some(path) = json {
        std::fs::write(path, output::json(file, &outcomes) + "\n")
            .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(match output::overall(&outcomes) {
        Status::Pass => EXIT_PASS,
        Status::Fail => EXIT_FAIL,
        Status::Error => EXIT_SEMANTIC,
    })
}

fn show_gallery(name: &str, emit: Option<&std::path::Path>) -> Result<i32, CliError> {
    if name == "list" {
        for (n, about, _) in gallery::ENTRIES {
            println!("{n:<26} {about}");
        }
        return Ok(EXIT_PASS);
    }
    let src = gallery::source(name).ok_or_else(|| CliError::Usage(gallery::unknown(name)))?;
    match emit {
        Some(path) => std::fs::write(path, src).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{src}"),
    }
    Ok(EXIT_PASS)
}

fn check_expr(text: &str) -> Result<i32, CliError> {
    let e = parse_expr_free(text).map_err(|e| match e {
        KernelError::Syntax { line, col, msg } => CliError::Parse { line, col, msg },
        other => CliError::Parse { line: 1, col: 1, msg: other.to_string() },
    })?;
    let v = eval_expr(&e).map_err(|e| CliError::Semantic { line: 1, msg: e.to_string() })?;
    println!("{v}");
    Ok(EXIT_PASS)
}
