use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;
use taboo_core::candidates::CandidateIndex;
use taboo_core::cloze::Correction;
use taboo_core::transcripts::{Source, Transcript};
use taboo_core::{correct, detect, extract_snippet, CandidateMode, Snippet, Strategy};
use taboo_review::IngestRecord;

use crate::config::{BackendKind, RunConfig};
use crate::error::{Classify, CliResult};
use crate::io;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Snippets: `.jsonl` of snippet objects, or plain text with one
    /// snippet per line whose lexicon words are corrected.
    #[arg(long = "in", visible_alias = "snippet", value_name = "FILE")]
    input: PathBuf,
    /// Needed for plain-text input.
    #[arg(long, value_name = "FILE")]
    lexicon: Option<PathBuf>,
    #[arg(long, value_enum)]
    backend: Option<BackendKind>,
    /// Training text for the ngram backend.
    #[arg(long, value_name = "PATH")]
    corpus: Option<PathBuf>,
    /// Score file for the preset backend.
    #[arg(long, value_name = "FILE")]
    preset: Option<PathBuf>,
    /// URL of the http backend.
    #[arg(long)]
    endpoint: Option<String>,
    /// Candidate vocabulary; defaults to the backend's.
    #[arg(long, value_name = "FILE")]
    vocab: Option<PathBuf>,
    #[arg(long)]
    mode: Option<CandidateMode>,
    #[arg(long)]
    radius: Option<usize>,
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    window: Option<usize>,
    /// Also write review-queue records (JSON lines) here.
    #[arg(long, value_name = "FILE")]
    review_out: Option<PathBuf>,
}

impl Args {
    pub fn apply(&self, cfg: &mut RunConfig) {
        let p = &mut cfg.paths;
        for (dst, src) in [
            (&mut p.lexicon, &self.lexicon),
            (&mut p.corpus, &self.corpus),
            (&mut p.preset, &self.preset),
            (&mut p.vocab, &self.vocab),
        ] {
            if src.is_some() {
                dst.clone_from(src);
            }
        }
        apply_backend(cfg, self.backend, &self.endpoint);
        if let Some(m) = self.mode {
            cfg.eval.mode = m;
        }
        if let Some(r) = self.radius {
            cfg.thresholds.radius = r;
        }
        if let Some(o) = self.order {
            cfg.thresholds.order = o;
        }
        if let Some(w) = self.window {
            cfg.thresholds.window = w;
        }
    }
}

pub fn apply_backend(cfg: &mut RunConfig, kind: Option<BackendKind>, endpoint: &Option<String>) {
    if let Some(k) = kind {
        cfg.backend.kind = k;
    }
    if endpoint.is_some() {
        cfg.backend.endpoint.clone_from(endpoint);
    }
}

#[derive(Serialize)]
struct Row<'a> {
    video_id: &'a str,
    token_index: usize,
    flagged: &'a str,
    snippet: String,
    #[serde(flatten)]
    correction: &'a Correction,
}

fn load_snippets(args: &Args, cfg: &RunConfig) -> CliResult<Vec<Snippet>> {
    let is_jsonl = args.input.extension().is_some_and(|e| e.eq_ignore_ascii_case("jsonl"));
    if is_jsonl {
        return io::read_jsonl(&args.input);
    }
    let lex = io::load_lexicon_file(super::need(&cfg.paths.lexicon, "--lexicon for plain-text input")?)?;
    let text = std::fs::read_to_string(&args.input)
        .map_err(anyhow::Error::from)
        .map_err(|e| e.context(format!("cannot read {}", args.input.display())))
        .input()?;
    let stem = io::stem(&args.input);
    let mut snippets = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let words: Vec<&str> = line.split_whitespace().collect();
        let t = Transcript::from_words(format!("{stem}:{}", i + 1), Source::Other, &words);
        for flag in detect(&t, &lex) {
            snippets.push(extract_snippet(&t, &flag, cfg.thresholds.window).input()?);
        }
    }
    Ok(snippets)
}

pub fn run(args: &Args, cfg: &RunConfig, out: &mut impl Write) -> CliResult<()> {
    let snippets = load_snippets(args, cfg)?;
    if snippets.is_empty() {
        log::warn!("no flagged words in {}", args.input.display());
    }
    let backend = super::build_backend(cfg)?;
    let index = CandidateIndex::new(super::candidate_vocab(cfg, &backend)?);
    let (mode, radius) = (cfg.eval.mode, cfg.thresholds.radius);
    let results = Strategy::default().map(&snippets, |s| -> CliResult<Correction> {
        let set = index.candidates(s.flagged_word(), mode, radius).input()?;
        correct(backend.scorer.as_ref(), s, &set).map_err(super::score_failure)
    });
    let corrections = results.into_iter().collect::<CliResult<Vec<_>>>()?;

    for (s, c) in snippets.iter().zip(&corrections) {
        let row = Row {
            video_id: &s.origin.video_id,
            token_index: s.origin.token_index,
            flagged: s.flagged_word(),
            snippet: s.tokens.join(" "),
            correction: c,
        };
        io::write_jsonl(out, [row])?;
    }
    if let Some(dst) = &args.review_out {
        let records: Vec<IngestRecord> =
            snippets.into_iter().zip(&corrections).map(|(s, c)| IngestRecord::from_correction(s, c)).collect();
        let mut f = std::io::BufWriter::new(std::fs::File::create(dst).internal()?);
        io::write_jsonl(&mut f, &records)?;
        f.flush().internal()?;
    }
    Ok(())
}
