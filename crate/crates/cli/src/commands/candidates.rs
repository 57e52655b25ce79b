use std::io::Write;
use std::path::PathBuf;

use taboo_core::candidates::generate_candidates;
use taboo_core::{normalize, CandidateMode};

use crate::config::RunConfig;
use crate::error::{Classify, CliResult};
use crate::io;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// The flagged word.
    word: String,
    #[arg(long, value_name = "FILE")]
    vocab: Option<PathBuf>,
    #[arg(long)]
    mode: Option<CandidateMode>,
    #[arg(long)]
    radius: Option<usize>,
}

impl Args {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if self.vocab.is_some() {
            cfg.paths.vocab.clone_from(&self.vocab);
        }
        if let Some(m) = self.mode {
            cfg.eval.mode = m;
        }
        if let Some(r) = self.radius {
            cfg.thresholds.radius = r;
        }
    }
}

/// Prints the candidate words as a JSON array, nearest first.
pub fn run(args: &Args, cfg: &RunConfig, out: &mut impl Write) -> CliResult<()> {
    let vocab = io::load_vocab(super::need(&cfg.paths.vocab, "--vocab")?)?;
    let set = generate_candidates(&normalize(&args.word), &vocab, cfg.eval.mode, cfg.thresholds.radius).input()?;
    serde_json::to_writer(&mut *out, &set.words).internal()?;
    out.write_all(b"\n").internal()
}
