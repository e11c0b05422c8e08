//! Command-line front end for `katokit`: norms of stored fields, named
//! verification suites with JSON/CSV reports, and report summaries.
//!
//! Exit codes: 0 when every check is PASS or INCONCLUSIVE, 1 when any check
//! FAILs, 2 for usage, configuration and input errors.

pub mod compute;
pub mod config;
pub mod report;
pub mod suites;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use katokit::Verdict;
use serde::Serialize;

use crate::config::SuiteConfig;
use crate::report::Report;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("io: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] katokit::Error),
}

#[derive(Debug, Parser)]
#[command(name = "katokit", version, about = "Uniformly local Sobolev norms and operator checks on periodic grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a norm of a stored FLD1 field.
    Compute {
        /// h-norm, kato-norm, sw-norm or schatten.
        kind: String,
        #[arg(long)]
        field: PathBuf,
        /// Sobolev order: one value for all blocks or a comma-separated list.
        #[arg(long)]
        order: Option<String>,
        /// Exponent p, a number >= 1 or `inf`.
        #[arg(long)]
        p: Option<String>,
        /// Quantization parameter for `schatten`.
        #[arg(long)]
        tau: Option<f64>,
        /// Window support as fractions of the period, `lo,hi`.
        #[arg(long)]
        window: Option<String>,
        /// Print JSON instead of the bare value.
        #[arg(long)]
        json: bool,
    },
    /// Run a suite (or `all`) and write its reports.
    Verify {
        suite: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarize a report, or extract its CSV data.
    Report {
        path: PathBuf,
        #[arg(long)]
        csv: bool,
    },
}

/// Entry point for the binary.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}

pub fn run_with<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "{e}");
            return 2;
        }
    };
    match pool.install(|| dispatch(cli.command, out)) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "katokit: {e}");
            2
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("KATOKIT_THREADS") {
        let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| CliError::Config(format!("KATOKIT_THREADS must be a positive integer, got {v:?}")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Config(e.to_string()))
}

fn io(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn dispatch(cmd: Command, out: &mut (dyn Write + Send)) -> Result<i32, CliError> {
    match cmd {
        Command::Compute { kind, field, order, p, tau, window, json } => {
            let c = compute::compute(&kind, &field, &compute::ComputeArgs { order, p, tau, window })?;
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&c).expect("serializable")).map_err(io)?;
            } else {
                writeln!(out, "{:.12}", c.value).map_err(io)?;
            }
            Ok(0)
        }
        Command::Verify { suite, config, out: dir } => {
            let cfg = match &config {
                Some(p) => SuiteConfig::load(p)?,
                None => SuiteConfig::default(),
            };
            let dir = dir
                .or_else(|| cfg.out.as_ref().map(PathBuf::from))
                .ok_or_else(|| CliError::Usage("verify needs --out or an `out` entry in the config".into()))?;
            let reports = verify(&suite, &cfg, &dir)?;
            for r in &reports {
                write!(out, "{}", r.summary()).map_err(io)?;
            }
            Ok(exit_code(&reports))
        }
        Command::Report { path, csv } => {
            let r = Report::load(&path)?;
            if csv {
                write!(out, "{}", r.extract_csv()).map_err(io)?;
            } else {
                write!(out, "{}", r.summary()).map_err(io)?;
            }
            Ok(0)
        }
    }
}

#[derive(Serialize)]
struct IndexEntry<'a> {
    suite: &'a str,
    citation: &'a str,
    verdict: Verdict,
    cases: usize,
}

/// Runs one suite or all of them, in registry order, and writes every report
/// plus an `index.json` into `dir`.
pub fn verify(suite: &str, cfg: &SuiteConfig, dir: &Path) -> Result<Vec<Report>, CliError> {
    cfg.validate()?;
    let chosen: Vec<&suites::Suite> = if suite == "all" {
        suites::SUITES.iter().collect()
    } else {
        let known: Vec<&str> = suites::SUITES.iter().map(|s| s.id).collect();
        vec![suites::find(suite).ok_or_else(|| CliError::Usage(format!("unknown suite {suite:?}; known: all, {}", known.join(", "))))?]
    };
    let mut reports = Vec::new();
    for s in chosen {
        let r = s.run(cfg)?;
        r.write(dir)?;
        reports.push(r);
    }
    let index: Vec<IndexEntry> = reports
        .iter()
        .map(|r| IndexEntry { suite: &r.suite, citation: &r.citation, verdict: r.verdict, cases: r.cases.len() })
        .collect();
    let mut body = serde_json::to_string_pretty(&index).expect("serializable");
    body.push('\n');
    std::fs::write(dir.join("index.json"), body).map_err(io)?;
    Ok(reports)
}

pub fn exit_code(reports: &[Report]) -> i32 {
    i32::from(reports.iter().any(|r| r.verdict == Verdict::Fail))
}
