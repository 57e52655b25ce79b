use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;
use taboo_core::agreement::{
    agreement_batch, default_grid, ma_cdf, mutual_agreement, window_agreement, AgreementError,
};
use taboo_core::detection::build_benchmark_rows;
use taboo_core::transcripts::{Format, Source};
use taboo_core::{normalize, AgreementReport, Strategy};

use crate::config::RunConfig;
use crate::error::{input_error, Classify, CliResult};
use crate::io;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// First transcript, taken as the AWS side.
    #[arg(long, value_name = "FILE")]
    a: PathBuf,
    /// Second transcript, taken as the YouTube side.
    #[arg(long, value_name = "FILE")]
    b: PathBuf,
    /// Format of `--a`; `.json` files default to the generic dialect.
    #[arg(long)]
    format_a: Option<Format>,
    #[arg(long)]
    format_b: Option<Format>,
    #[arg(long)]
    video_id: Option<String>,
    /// Also report agreement in a window around this word.
    #[arg(long, value_name = "WORD")]
    center: Option<String>,
    /// Window half-width in tokens.
    #[arg(long)]
    window: Option<usize>,
}

impl Args {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(w) = self.window {
            cfg.thresholds.window = w;
        }
    }
}

#[derive(Serialize)]
struct WindowOut {
    center: String,
    window: usize,
    ma: f64,
}

#[derive(Serialize)]
struct AgreeOut {
    #[serde(flatten)]
    report: AgreementReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    windowed: Option<WindowOut>,
}

pub fn run(args: &Args, cfg: &RunConfig, out: &mut impl Write) -> CliResult<()> {
    let id = args.video_id.clone().unwrap_or_else(|| io::stem(&args.a));
    let a = io::load_transcript(&args.a, args.format_a, Some(&id), Source::Aws)?;
    let b = io::load_transcript(&args.b, args.format_b, Some(&id), Source::Youtube)?;
    let report = mutual_agreement(&a, &b).input()?;
    let windowed = match &args.center {
        Some(word) => {
            let center = normalize(word);
            let ma = window_agreement(&a, &b, &center, cfg.thresholds.window).input()?;
            Some(WindowOut { center, window: cfg.thresholds.window, ma })
        }
        None => None,
    };
    io::write_json(out, &AgreeOut { report, windowed })
}

#[derive(Debug, clap::Args)]
pub struct BatchArgs {
    /// CSV with columns video_id,path_a,path_b; paths relative to it.
    #[arg(long, value_name = "FILE")]
    manifest: PathBuf,
    #[arg(long)]
    format_a: Option<Format>,
    #[arg(long)]
    format_b: Option<Format>,
    /// Lexicon for benchmark-row extraction.
    #[arg(long, value_name = "FILE")]
    lexicon: Option<PathBuf>,
    /// Write benchmark rows (JSON lines) here; needs a lexicon.
    #[arg(long, value_name = "FILE")]
    rows_out: Option<PathBuf>,
    #[arg(long)]
    window: Option<usize>,
    /// Minimum windowed agreement for a benchmark row.
    #[arg(long)]
    agreement: Option<f64>,
}

impl BatchArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if self.lexicon.is_some() {
            cfg.paths.lexicon.clone_from(&self.lexicon);
        }
        if let Some(w) = self.window {
            cfg.thresholds.window = w;
        }
        if let Some(x) = self.agreement {
            cfg.thresholds.agreement = x;
        }
    }
}

/// One CSV line: either a per-video report or a CDF point.
#[derive(Serialize)]
struct BatchRow<'a> {
    kind: &'static str,
    video_id: &'a str,
    ma: Option<f64>,
    vocab_union_size: Option<usize>,
    threshold: Option<f64>,
    fraction: Option<f64>,
}

pub fn run_batch(args: &BatchArgs, cfg: &RunConfig, out: &mut impl Write) -> CliResult<()> {
    let rows: Vec<io::PairRow> = io::read_csv(&args.manifest)?;
    let mut pairs = Vec::with_capacity(rows.len());
    for r in &rows {
        let a = io::load_transcript(
            &io::resolve(&args.manifest, &r.path_a),
            args.format_a,
            Some(&r.video_id),
            Source::Aws,
        )?;
        let b = io::load_transcript(
            &io::resolve(&args.manifest, &r.path_b),
            args.format_b,
            Some(&r.video_id),
            Source::Youtube,
        )?;
        pairs.push((a, b));
    }
    let mut reports = Vec::new();
    for (res, row) in agreement_batch(&pairs, Strategy::default()).into_iter().zip(&rows) {
        match res {
            Ok(r) => reports.push(r),
            Err(AgreementError::Undefined) => log::warn!("{}: both transcripts are empty; skipped", row.video_id),
            Err(e) => return Err(input_error(format!("{}: {e}", row.video_id))),
        }
    }
    let cdf = ma_cdf(&reports, &default_grid()).input()?;

    let mut w = csv::Writer::from_writer(&mut *out);
    for r in &reports {
        w.serialize(BatchRow {
            kind: "report",
            video_id: &r.video_id,
            ma: Some(r.ma),
            vocab_union_size: Some(r.vocab_union_size),
            threshold: None,
            fraction: None,
        })
        .internal()?;
    }
    for (t, f) in cdf {
        w.serialize(BatchRow {
            kind: "cdf",
            video_id: "",
            ma: None,
            vocab_union_size: None,
            threshold: Some(t),
            fraction: Some(f),
        })
        .internal()?;
    }
    w.flush().internal()?;
    drop(w);

    if let Some(dst) = &args.rows_out {
        let lex = io::load_lexicon_file(crate::commands::need(&cfg.paths.lexicon, "--lexicon for --rows-out")?)?;
        let mut bench = Vec::new();
        for (a, b) in &pairs {
            bench.extend(build_benchmark_rows((a, b), &lex, cfg.thresholds.window, cfg.thresholds.agreement).input()?);
        }
        log::info!("{} benchmark rows from {} videos", bench.len(), pairs.len());
        let mut f = std::io::BufWriter::new(std::fs::File::create(dst).internal()?);
        io::write_jsonl(&mut f, &bench)?;
        f.flush().internal()?;
    }
    Ok(())
}
