//! Masked cloze tasks and candidate ranking.
//!
//! A [`ClozeTask`] is a snippet with the flagged word replaced by
//! [`MASK`](crate::transcripts::MASK). A [`ScorerBackend`] assigns each
//! candidate a "higher is better" score for filling the mask; [`score`]
//! turns those into a ranking and [`correct`] picks the top word.

mod http;
mod ngram;
mod preset;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::candidates::CandidateSet;
use crate::detection::Snippet;
use crate::transcripts::MASK;

pub use http::{HttpScorer, HttpScorerConfig};
pub use ngram::{ngram_train, NgramConfig, NgramError, NgramModel, UNK};
pub use preset::PresetScorer;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClozeTask {
    pub left: Vec<String>,
    pub right: Vec<String>,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ClozeError {
    #[error("flag offset {offset} is outside a snippet of {len} tokens")]
    BadOffset { offset: usize, len: usize },
    #[error("context token {index} is the reserved mask symbol")]
    ContainsMask { index: usize },
}

impl ClozeTask {
    pub fn new(left: Vec<String>, right: Vec<String>) -> Result<Self, ClozeError> {
        if let Some(index) = left.iter().chain(&right).position(|w| w == MASK) {
            return Err(ClozeError::ContainsMask { index });
        }
        Ok(ClozeTask { left, right })
    }

    /// Index of the mask in the full token sequence.
    pub fn mask_index(&self) -> usize {
        self.left.len()
    }

    /// `left ++ [word] ++ right`.
    pub fn splice(&self, word: &str) -> Vec<String> {
        let mut out = Vec::with_capacity(self.left.len() + self.right.len() + 1);
        out.extend(self.left.iter().cloned());
        out.push(word.to_string());
        out.extend(self.right.iter().cloned());
        out
    }

    /// Space-joined text with the mask symbol in place.
    pub fn display(&self) -> String {
        self.splice(MASK).join(" ")
    }
}

/// Cloze task for a token list with the word at `offset` masked.
pub fn cloze_from_tokens(tokens: &[String], offset: usize) -> Result<ClozeTask, ClozeError> {
    if offset >= tokens.len() {
        return Err(ClozeError::BadOffset { offset, len: tokens.len() });
    }
    ClozeTask::new(tokens[..offset].to_vec(), tokens[offset + 1..].to_vec())
}

pub fn make_cloze(snippet: &Snippet) -> Result<ClozeTask, ClozeError> {
    cloze_from_tokens(&snippet.tokens, snippet.flag_offset)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredCandidate {
    pub word: String,
    pub score: f64,
    /// 1-based.
    pub rank: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Ranking {
    /// Ranks 1..=n, scores non-increasing.
    pub ranked: Vec<ScoredCandidate>,
    /// Candidates that failed the backend's vocabulary query; never scored.
    pub oov: Vec<String>,
}

impl Ranking {
    /// 1-based rank of `word`, if it was scored.
    pub fn rank_of(&self, word: &str) -> Option<usize> {
        self.ranked.iter().find(|c| c.word == word).map(|c| c.rank)
    }

    pub fn top(&self) -> Option<&ScoredCandidate> {
        self.ranked.first()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correction {
    /// `None` when every candidate was out of vocabulary.
    pub c_star: Option<String>,
    pub ranking: Ranking,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ScoreError {
    #[error("scorer transport failed after {attempts} attempt(s){}: {message}", status.map(|s| format!(" (HTTP {s})")).unwrap_or_default())]
    Transport { status: Option<u16>, attempts: u32, message: String },
    #[error("scorer protocol error: {0}")]
    Protocol(String),
    #[error("scorer returned {got} scores for {expected} candidates")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite score for candidate {0:?}")]
    NonFinite(String),
    #[error(transparent)]
    Cloze(#[from] ClozeError),
}

/// A masked-completion scorer.
///
/// Implementations must be deterministic and safe to call concurrently.
pub trait ScorerBackend: Send + Sync {
    fn name(&self) -> &str;

    fn contains(&self, word: &str) -> Result<bool, ScoreError>;

    fn contains_many(&self, words: &[String]) -> Result<Vec<bool>, ScoreError> {
        words.iter().map(|w| self.contains(w)).collect()
    }

    /// One score per candidate, in input order; higher is better.
    fn score(&self, task: &ClozeTask, candidates: &[String]) -> Result<Vec<f64>, ScoreError>;
}

impl<B: ScorerBackend + ?Sized> ScorerBackend for Box<B> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn contains(&self, word: &str) -> Result<bool, ScoreError> {
        (**self).contains(word)
    }
    fn contains_many(&self, words: &[String]) -> Result<Vec<bool>, ScoreError> {
        (**self).contains_many(words)
    }
    fn score(&self, task: &ClozeTask, candidates: &[String]) -> Result<Vec<f64>, ScoreError> {
        (**self).score(task, candidates)
    }
}

/// Orders by score descending, then word ascending, and assigns ranks.
pub fn rank_scores(pairs: Vec<(String, f64)>) -> Vec<ScoredCandidate> {
    let mut pairs = pairs;
    pairs.sort_by(|a, b| match b.1.total_cmp(&a.1) {
        Ordering::Equal => a.0.cmp(&b.0),
        o => o,
    });
    pairs.into_iter().enumerate().map(|(i, (word, score))| ScoredCandidate { word, score, rank: i + 1 }).collect()
}

pub fn score(backend: &dyn ScorerBackend, task: &ClozeTask, candidates: &CandidateSet) -> Result<Ranking, ScoreError> {
    score_words(backend, task, &candidates.words)
}

pub fn score_words(backend: &dyn ScorerBackend, task: &ClozeTask, words: &[String]) -> Result<Ranking, ScoreError> {
    let known = backend.contains_many(words)?;
    if known.len() != words.len() {
        return Err(ScoreError::LengthMismatch { expected: words.len(), got: known.len() });
    }
    let (mut in_vocab, mut oov) = (Vec::new(), Vec::new());
    for (w, k) in words.iter().zip(known) {
        if k {
            in_vocab.push(w.clone());
        } else {
            oov.push(w.clone());
        }
    }
    if in_vocab.is_empty() {
        return Ok(Ranking { ranked: Vec::new(), oov });
    }
    let scores = backend.score(task, &in_vocab)?;
    if scores.len() != in_vocab.len() {
        return Err(ScoreError::LengthMismatch { expected: in_vocab.len(), got: scores.len() });
    }
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(ScoreError::NonFinite(in_vocab[i].clone()));
    }
    Ok(Ranking { ranked: rank_scores(in_vocab.into_iter().zip(scores).collect()), oov })
}

/// Argmax correction of the flagged word in `snippet`.
pub fn correct(
    backend: &dyn ScorerBackend,
    snippet: &Snippet,
    candidates: &CandidateSet,
) -> Result<Correction, ScoreError> {
    let task = make_cloze(snippet)?;
    let ranking = score(backend, &task, candidates)?;
    Ok(Correction { c_star: ranking.top().map(|c| c.word.clone()), ranking })
}
