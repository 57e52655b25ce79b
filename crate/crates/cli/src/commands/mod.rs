pub mod agree;
pub mod candidates;
pub mod correct;
pub mod detect;
pub mod eval;
pub mod lexicon;
pub mod report;
pub mod serve;

use anyhow::anyhow;
use taboo_core::candidates::Vocabulary;
use taboo_core::cloze::{HttpScorer, HttpScorerConfig, NgramModel, PresetScorer, ScoreError, UNK};
use taboo_core::ScorerBackend;

use crate::config::{BackendKind, RunConfig};
use crate::error::{input_error, Classify, CliResult, Failure};
use crate::io;

/// A scorer plus the vocabulary it implies, if any.
pub struct Backend {
    pub scorer: Box<dyn ScorerBackend>,
    pub default_vocab: Option<Vocabulary>,
}

pub fn build_backend(cfg: &RunConfig) -> CliResult<Backend> {
    match cfg.backend.kind {
        BackendKind::Ngram => {
            let path = cfg
                .paths
                .corpus
                .as_deref()
                .ok_or_else(|| input_error("the ngram backend needs a training corpus (--corpus)"))?;
            let corpus = io::load_corpus(path)?;
            let model = NgramModel::train(corpus.documents.iter().map(|d| &d.tokens), cfg.ngram().input()?).input()?;
            let vocab = Vocabulary::new(model.vocabulary().iter().filter(|w| w.as_str() != UNK).cloned());
            log::info!("trained {} on {} documents, {} types", model.name(), corpus.documents.len(), vocab.len());
            Ok(Backend { scorer: Box::new(model), default_vocab: Some(vocab) })
        }
        BackendKind::Preset => {
            let path = cfg
                .paths
                .preset
                .as_deref()
                .ok_or_else(|| input_error("the preset backend needs a score file (--preset)"))?;
            let preset = PresetScorer::load(path).input()?;
            let vocab = Vocabulary::new(preset.vocabulary.iter().cloned());
            Ok(Backend { scorer: Box::new(preset), default_vocab: Some(vocab) })
        }
        BackendKind::Http => {
            let endpoint = cfg
                .backend
                .endpoint
                .clone()
                .ok_or_else(|| input_error("the http backend needs an endpoint (--endpoint)"))?;
            let mut c = HttpScorerConfig::new(endpoint);
            c.timeout_ms = cfg.backend.timeout_ms;
            c.retries = cfg.backend.retries;
            c.max_in_flight = cfg.backend.max_in_flight;
            Ok(Backend { scorer: Box::new(HttpScorer::new(c)), default_vocab: None })
        }
    }
}

/// `--vocab` if given, else the backend's own vocabulary.
pub fn candidate_vocab(cfg: &RunConfig, backend: &Backend) -> CliResult<Vocabulary> {
    match (&cfg.paths.vocab, &backend.default_vocab) {
        (Some(p), _) => io::load_vocab(p),
        (None, Some(v)) => Ok(v.clone()),
        (None, None) => Err(input_error("this backend needs a candidate vocabulary (--vocab)")),
    }
}

/// Scoring failures are backend faults, never input faults.
pub fn score_failure(e: ScoreError) -> Failure {
    Failure::Internal(anyhow!(e))
}

pub fn need<'a, T>(v: &'a Option<T>, what: &str) -> CliResult<&'a T> {
    v.as_ref().ok_or_else(|| input_error(format!("missing {what}")))
}
