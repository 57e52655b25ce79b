use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;

use taboo_core::candidates::CandidateIndex;
use taboo_core::evaluation::{evaluate, load_benchmark, EvalConfig, EvalError, ItemOutcome};
use taboo_core::lexicon::{LexiconWord, WordlistSource};
use taboo_core::{BenchmarkItem, CandidateMode, EvalResult, Severity, Strategy, TabooLexicon};

use crate::config::{BackendKind, RunConfig};
use crate::error::{Classify, CliResult, Failure};
use crate::io;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Benchmark, one JSON item per line.
    #[arg(long, value_name = "FILE")]
    bench: Option<PathBuf>,
    #[arg(long, value_enum)]
    backend: Option<BackendKind>,
    #[arg(long, value_name = "PATH")]
    corpus: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    preset: Option<PathBuf>,
    #[arg(long)]
    endpoint: Option<String>,
    /// Candidate vocabulary; defaults to the backend's.
    #[arg(long, value_name = "FILE")]
    vocab: Option<PathBuf>,
    /// Lexicon for the taboo top-1 rate; defaults to the benchmark's
    /// hallucinated words.
    #[arg(long, value_name = "FILE")]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    mode: Option<CandidateMode>,
    #[arg(long)]
    radius: Option<usize>,
    #[arg(long)]
    order: Option<usize>,
    /// Cut-offs for P@K, comma-separated.
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    /// Per-item CSV table.
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
}

impl Args {
    pub fn apply(&self, cfg: &mut RunConfig) {
        let p = &mut cfg.paths;
        for (dst, src) in [
            (&mut p.bench, &self.bench),
            (&mut p.corpus, &self.corpus),
            (&mut p.preset, &self.preset),
            (&mut p.vocab, &self.vocab),
            (&mut p.lexicon, &self.lexicon),
        ] {
            if src.is_some() {
                dst.clone_from(src);
            }
        }
        super::correct::apply_backend(cfg, self.backend, &self.endpoint);
        if let Some(m) = self.mode {
            cfg.eval.mode = m;
        }
        if let Some(r) = self.radius {
            cfg.thresholds.radius = r;
        }
        if let Some(o) = self.order {
            cfg.thresholds.order = o;
        }
        if !self.k.is_empty() {
            cfg.eval.ks.clone_from(&self.k);
        }
    }
}

fn hallucinated_lexicon(items: &[BenchmarkItem]) -> CliResult<TabooLexicon> {
    let words: BTreeSet<&str> = items.iter().map(|i| i.hallucinated.as_str()).collect();
    TabooLexicon::from_words(
        words.into_iter().map(|w| LexiconWord {
            surface: w.to_string(),
            sources: BTreeSet::from([WordlistSource::H2]),
            severity: Severity::Standard,
        }),
        "benchmark hallucinated words",
    )
    .input()
}

fn classify(e: EvalError) -> Failure {
    match e {
        EvalError::AllFailed(_) | EvalError::Backend(_) => Failure::Internal(e.into()),
        _ => Failure::Input(e.into()),
    }
}

fn write_csv(path: &PathBuf, result: &EvalResult) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).internal()?;
    w.write_record([
        "id",
        "source",
        "hallucinated",
        "ground_truth",
        "status",
        "rank",
        "c_star",
        "n_candidates",
        "n_oov",
    ])
    .internal()?;
    for r in &result.per_item {
        let (status, rank) = match &r.outcome {
            ItemOutcome::Ranked { rank } => ("ranked", rank.to_string()),
            ItemOutcome::CandidateMiss => ("candidate_miss", String::new()),
            ItemOutcome::Error { .. } => ("error", String::new()),
        };
        w.write_record([
            r.id.as_str(),
            r.source.as_str(),
            &r.hallucinated,
            &r.ground_truth,
            status,
            &rank,
            r.c_star.as_deref().unwrap_or(""),
            &r.n_candidates.to_string(),
            &r.n_oov.to_string(),
        ])
        .internal()?;
    }
    w.flush().internal()
}

pub fn run(args: &Args, cfg: &RunConfig, out: &mut impl Write) -> CliResult<()> {
    let items = load_benchmark(super::need(&cfg.paths.bench, "--bench")?).map_err(classify)?;
    let lexicon = match &cfg.paths.lexicon {
        Some(p) => io::load_lexicon_file(p)?,
        None => hallucinated_lexicon(&items)?,
    };
    let backend = super::build_backend(cfg)?;
    let index = CandidateIndex::new(super::candidate_vocab(cfg, &backend)?);
    let config = EvalConfig { mode: cfg.eval.mode, radius: cfg.thresholds.radius, ks: cfg.eval.ks.clone() };
    let result =
        evaluate(&items, backend.scorer.as_ref(), &index, &lexicon, &config, Strategy::default()).map_err(classify)?;

    let p_at: Vec<String> = result.p_at.iter().map(|(k, p)| format!("P@{k}={p:.3}")).collect();
    eprintln!(
        "{} scored={}/{} miss={:.3} taboo_top1={:.3} errors={}",
        p_at.join(" "),
        result.n_scored,
        result.n_total,
        result.candidate_miss_rate,
        result.taboo_top1_rate,
        result.n_errors
    );
    if let Some(path) = &args.csv {
        write_csv(path, &result)?;
    }
    io::write_json(out, &result)
}
