use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use taboo_core::lexicon::{
    build_lexicon, bundled, corpus_frequency, format_lexicon, load_wordlist, parse_wordlist, FrequencyTable,
    WordlistSource,
};

use crate::config::RunConfig;
use crate::error::{Classify, CliResult};
use crate::io;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// General offensive-word list; omitted means empty.
    #[arg(long, value_name = "FILE")]
    h1: Option<PathBuf>,
    /// Children's-usage list; defaults to the bundled one.
    #[arg(long, value_name = "FILE")]
    h2: Option<PathBuf>,
    /// Highly inappropriate words; defaults to the bundled list.
    #[arg(long, value_name = "FILE")]
    highly: Option<PathBuf>,
    /// Words never flagged; defaults to the bundled list.
    #[arg(long, value_name = "FILE")]
    exclusions: Option<PathBuf>,
    /// General-audience subtitles for the frequency filter.
    #[arg(long, value_name = "PATH")]
    corpus: Option<PathBuf>,
    /// Corpus count at which a word is dropped.
    #[arg(long)]
    threshold: Option<u64>,
    /// Lexicon file to write; stdout if omitted.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

impl Args {
    pub fn apply(&self, cfg: &mut RunConfig) {
        let p = &mut cfg.paths;
        for (dst, src) in [
            (&mut p.h1, &self.h1),
            (&mut p.h2, &self.h2),
            (&mut p.highly, &self.highly),
            (&mut p.exclusions, &self.exclusions),
            (&mut p.corpus, &self.corpus),
        ] {
            if src.is_some() {
                dst.clone_from(src);
            }
        }
        if let Some(t) = self.threshold {
            cfg.thresholds.frequency = t;
        }
    }
}

fn list(path: Option<&Path>, source: WordlistSource, fallback: &str) -> CliResult<BTreeSet<String>> {
    match path {
        Some(p) => load_wordlist(p, source).input(),
        None => Ok(parse_wordlist(fallback, source)),
    }
}

pub fn run(args: &Args, cfg: &RunConfig, out: &mut impl Write) -> CliResult<()> {
    let p = &cfg.paths;
    let h1 = match &p.h1 {
        Some(path) => load_wordlist(path, WordlistSource::H1).input()?,
        None => {
            log::warn!("no H1 list given; building from H2 only");
            BTreeSet::new()
        }
    };
    let h2 = list(p.h2.as_deref(), WordlistSource::H2, bundled::H2_CHILDREN)?;
    let exclusions = list(p.exclusions.as_deref(), WordlistSource::H2, bundled::EXCLUSIONS)?;
    let mut highly = list(p.highly.as_deref(), WordlistSource::H2, bundled::HIGHLY_INAPPROPRIATE)?;
    highly.retain(|w| {
        let known = h1.contains(w) || h2.contains(w);
        if !known {
            log::warn!("highly inappropriate word {w:?} is in neither source list; ignoring it");
        }
        known
    });
    let freq = match &p.corpus {
        Some(path) => corpus_frequency(&io::load_corpus(path)?).input()?,
        None => {
            log::warn!("no corpus given; skipping the frequency filter");
            FrequencyTable::default()
        }
    };
    let lexicon = build_lexicon(&h1, &h2, &freq, cfg.thresholds.frequency, &exclusions, &highly).input()?;
    log::info!("lexicon has {} words, {} highly inappropriate", lexicon.len(), lexicon.highly_inappropriate().count());
    let text = format_lexicon(&lexicon);
    match &args.out {
        Some(path) => std::fs::write(path, text).internal(),
        None => out.write_all(text.as_bytes()).internal(),
    }
}
