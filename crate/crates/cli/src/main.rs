//! `taboo`: command-line entry point for the detection, correction,
//! evaluation and review pipelines.
//!
//! Exit codes: 0 success, 1 input error (including usage), 2 internal
//! error. Results go to stdout; logs go to stderr.

mod commands;
mod config;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::{Classify, CliResult};

const LONG_VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    " (commit ",
    env!("TABOO_GIT_COMMIT"),
    ", ",
    env!("TABOO_TARGET"),
    ", ",
    env!("TABOO_PROFILE"),
    ", ",
    env!("TABOO_FEATURES"),
    ")"
);

#[derive(Debug, Parser)]
#[command(name = "taboo", version = LONG_VERSION, arg_required_else_help = true)]
#[command(about = "Find and correct taboo words hallucinated in ASR transcripts")]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Write the effective configuration here before running.
    #[arg(long, global = true, value_name = "FILE")]
    save_config: Option<PathBuf>,
    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Merge wordlists and drop words frequent in a general-audience corpus.
    BuildLexicon(commands::lexicon::Args),
    /// Mutual agreement between two transcripts of one video.
    Agree(commands::agree::Args),
    /// Mutual agreement for every pair in a manifest, with a CDF.
    AgreeBatch(commands::agree::BatchArgs),
    /// Flag lexicon words in transcripts and report on them.
    Detect(commands::detect::Args),
    /// Candidate replacements for one word.
    Candidates(commands::candidates::Args),
    /// Rank replacements for every flagged word in a snippet file.
    Correct(commands::correct::Args),
    /// P@K of a backend on a benchmark.
    Eval(commands::eval::Args),
    /// Run the review service.
    Serve(commands::serve::Args),
    /// Summaries of a review journal or an evaluation result.
    Report(commands::report::Args),
}

fn run(cli: Cli) -> CliResult<()> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p).input()?,
        None => RunConfig::default(),
    };
    match &cli.command {
        Command::BuildLexicon(a) => a.apply(&mut cfg),
        Command::Agree(a) => a.apply(&mut cfg),
        Command::AgreeBatch(a) => a.apply(&mut cfg),
        Command::Detect(a) => a.apply(&mut cfg),
        Command::Candidates(a) => a.apply(&mut cfg),
        Command::Correct(a) => a.apply(&mut cfg),
        Command::Eval(a) => a.apply(&mut cfg),
        Command::Serve(a) => a.apply(&mut cfg),
        Command::Report(_) => {}
    }
    cfg.validate().input()?;
    if let Some(p) = &cli.save_config {
        cfg.save(p).internal()?;
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::BuildLexicon(a) => commands::lexicon::run(&a, &cfg, &mut out),
        Command::Agree(a) => commands::agree::run(&a, &cfg, &mut out),
        Command::AgreeBatch(a) => commands::agree::run_batch(&a, &cfg, &mut out),
        Command::Detect(a) => commands::detect::run(&a, &cfg, &mut out),
        Command::Candidates(a) => commands::candidates::run(&a, &cfg, &mut out),
        Command::Correct(a) => commands::correct::run(&a, &cfg, &mut out),
        Command::Eval(a) => commands::eval::run(&a, &cfg, &mut out),
        Command::Serve(a) => commands::serve::run(&a, &cfg, &mut out),
        Command::Report(a) => commands::report::run(&a, &mut out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("taboo: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}
