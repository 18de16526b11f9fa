mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "needfinder", version, about = "Mine daily information needs of a region from search logs")]
struct Cli {
    /// JSON file with parameters; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic scenario (pings, searches, truth, page views).
    Generate(GenerateArgs),
    /// Flag, aggregate and k-anonymize raw logs into daily counts.
    Prepare(PrepareArgs),
    /// Derive spatial stopwords from a baseline window.
    Stopwords(StopwordsArgs),
    /// Score one day and write its need report.
    Score(ScoreArgs),
    /// Evaluate reports against ground truth and the page-view baseline.
    Eval(EvalArgs),
    /// Render a report as a text table.
    Report(ReportArgs),
    /// Run every stage on a bundled scenario.
    Demo(DemoArgs),
}

#[derive(Debug, Args, Serialize)]
struct GenerateArgs {
    /// Scenario config JSON (defaults to the bundled demo scenario).
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct PrepareArgs {
    #[arg(long)]
    pings: Option<PathBuf>,
    #[arg(long)]
    searches: Option<PathBuf>,
    #[arg(long)]
    region: Option<PathBuf>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long = "window-min")]
    window_min: Option<i64>,
    /// Reporting timezone offset, e.g. +09:00.
    #[arg(long, allow_hyphen_values = true)]
    tz: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct StopwordsArgs {
    #[arg(long)]
    counts: Option<PathBuf>,
    #[arg(long = "baseline-start")]
    baseline_start: Option<NaiveDate>,
    #[arg(long = "baseline-end")]
    baseline_end: Option<NaiveDate>,
    /// Event day; the baseline must end before it. Without explicit baseline
    /// bounds, the 28 days before it are used.
    #[arg(long = "event-day")]
    event_day: Option<NaiveDate>,
    #[arg(long = "top-m")]
    top_m: Option<usize>,
    #[arg(long)]
    floor: Option<f64>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct ScoreArgs {
    #[arg(long)]
    counts: Option<PathBuf>,
    #[arg(long)]
    date: Option<NaiveDate>,
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[arg(long)]
    top: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct EvalArgs {
    #[arg(long)]
    reports: Option<PathBuf>,
    #[arg(long)]
    truth: Option<PathBuf>,
    #[arg(long)]
    pv: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct ReportArgs {
    report: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct DemoArgs {
    /// Scenario config JSON (defaults to the bundled demo scenario).
    #[arg(long)]
    scenario: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long = "window-min")]
    window_min: Option<i64>,
    #[arg(long)]
    top: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long = "top-m")]
    top_m: Option<usize>,
    #[arg(long)]
    floor: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(needfinder_core::Error),
    Untrainable(NaiveDate),
}

impl From<needfinder_core::Error> for CliError {
    fn from(e: needfinder_core::Error) -> Self {
        CliError::Core(e)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = cli.config.as_deref();
    match cli.command {
        Command::Generate(a) => commands::generate(config::resolve("generate", &a, cfg)?),
        Command::Prepare(a) => commands::prepare(config::resolve("prepare", &a, cfg)?),
        Command::Stopwords(a) => commands::stopwords(config::resolve("stopwords", &a, cfg)?),
        Command::Score(a) => commands::score(config::resolve("score", &a, cfg)?),
        Command::Eval(a) => commands::eval(config::resolve("eval", &a, cfg)?),
        Command::Report(a) => commands::report(config::resolve("report", &a, cfg)?),
        Command::Demo(a) => commands::demo(config::resolve("demo", &a, cfg)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}\n\nRun `needfinder --help` for usage.");
            ExitCode::from(1)
        }
        Err(CliError::Untrainable(date)) => {
            eprintln!("needfinder: day {date} is untrainable; report written with status \"untrainable\"");
            ExitCode::from(2)
        }
        Err(CliError::Core(e)) => {
            eprintln!("needfinder: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
