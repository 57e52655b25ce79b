//! Interpolated n-gram scorer.
//!
//! `P_1(w) = (c(w) + k) / (N + k|V|)` where `V` includes [`UNK`]. For
//! `i > 1` and a history `h` of `i - 1` tokens,
//! `P_i(w|h) = l_i c(hw)/c(h) + (1 - l_i) P_{i-1}(w|h')` with
//! `l_i = weights[i-1] / sum(weights[..i])` and `h'` the history minus its
//! oldest token. An unseen history falls back to `P_{i-1}` entirely, so every
//! level is a proper distribution over `V`.

use std::collections::HashMap;

use crate::lexicon::SubtitleCorpus;

use super::{ClozeTask, ScoreError, ScorerBackend};

/// Vocabulary entry standing in for every unseen word.
pub const UNK: &str = "<unk>";

#[derive(Debug, Clone, PartialEq)]
pub struct NgramConfig {
    pub order: usize,
    /// Interpolation weights, unigram first; `order` entries summing to 1.
    pub weights: Vec<f64>,
    /// Add-k floor on unigram counts.
    pub k: f64,
}

impl Default for NgramConfig {
    fn default() -> Self {
        NgramConfig { order: 3, weights: vec![0.1, 0.3, 0.6], k: 0.01 }
    }
}

impl NgramConfig {
    /// Order `order` with the default weights truncated to the highest
    /// `order` levels and renormalized.
    pub fn with_order(order: usize) -> Result<Self, NgramError> {
        let base = NgramConfig::default();
        if order == 0 || order > base.weights.len() {
            return Err(NgramError::InvalidOrder(order));
        }
        let tail = &base.weights[base.weights.len() - order..];
        let sum: f64 = tail.iter().sum();
        Ok(NgramConfig { order, weights: tail.iter().map(|w| w / sum).collect(), k: base.k })
    }

    pub fn validate(&self) -> Result<(), NgramError> {
        if self.order == 0 {
            return Err(NgramError::InvalidOrder(0));
        }
        if self.weights.len() != self.order
            || self.weights.iter().any(|w| !(w.is_finite() && *w > 0.0))
            || (self.weights.iter().sum::<f64>() - 1.0).abs() > 1e-9
        {
            return Err(NgramError::InvalidWeights);
        }
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(NgramError::InvalidK(self.k));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum NgramError {
    #[error("n-gram training corpus has no tokens")]
    EmptyCorpus,
    #[error("invalid n-gram order {0}")]
    InvalidOrder(usize),
    #[error("interpolation weights must be positive, one per order, and sum to 1")]
    InvalidWeights,
    #[error("add-k constant must be positive, got {0}")]
    InvalidK(f64),
}

#[derive(Debug, Clone)]
pub struct NgramModel {
    config: NgramConfig,
    /// Index 0 is [`UNK`].
    words: Vec<String>,
    ids: HashMap<String, u32>,
    unigram: Vec<u64>,
    total: u64,
    /// Counts of n-grams with n >= 2.
    grams: HashMap<Vec<u32>, u64>,
    /// Number of times each history is followed by some token.
    histories: HashMap<Vec<u32>, u64>,
    name: String,
}

impl NgramModel {
    pub fn train<I, D>(docs: I, config: NgramConfig) -> Result<Self, NgramError>
    where
        I: IntoIterator<Item = D>,
        D: AsRef<[String]>,
    {
        config.validate()?;
        let mut ids: HashMap<String, u32> = HashMap::new();
        let mut words = vec![UNK.to_string()];
        ids.insert(UNK.to_string(), 0);
        let mut unigram = vec![0u64];
        let mut grams: HashMap<Vec<u32>, u64> = HashMap::new();
        let mut histories: HashMap<Vec<u32>, u64> = HashMap::new();
        let mut total = 0u64;
        for doc in docs {
            let seq: Vec<u32> = doc
                .as_ref()
                .iter()
                .map(|w| {
                    *ids.entry(w.clone()).or_insert_with(|| {
                        words.push(w.clone());
                        unigram.push(0);
                        (words.len() - 1) as u32
                    })
                })
                .collect();
            for (i, &id) in seq.iter().enumerate() {
                unigram[id as usize] += 1;
                total += 1;
                for n in 2..=config.order.min(i + 1) {
                    let gram = &seq[i + 1 - n..=i];
                    *grams.entry(gram.to_vec()).or_insert(0) += 1;
                    *histories.entry(gram[..n - 1].to_vec()).or_insert(0) += 1;
                }
            }
        }
        if total == 0 {
            return Err(NgramError::EmptyCorpus);
        }
        let name = format!("ngram-{}", config.order);
        Ok(NgramModel { config, words, ids, unigram, total, grams, histories, name })
    }

    pub fn config(&self) -> &NgramConfig {
        &self.config
    }

    /// Model vocabulary, [`UNK`] included.
    pub fn vocabulary(&self) -> &[String] {
        &self.words
    }

    fn id(&self, w: &str) -> u32 {
        self.ids.get(w).copied().unwrap_or(0)
    }

    fn p_unigram(&self, w: u32) -> f64 {
        let k = self.config.k;
        (self.unigram[w as usize] as f64 + k) / (self.total as f64 + k * self.words.len() as f64)
    }

    /// `history` is at most `order - 1` ids, oldest first.
    fn p_ids(&self, history: &[u32], w: u32) -> f64 {
        if history.is_empty() {
            return self.p_unigram(w);
        }
        let lower = self.p_ids(&history[1..], w);
        let Some(&ch) = self.histories.get(history) else {
            return lower;
        };
        let level = history.len() + 1;
        let weights = &self.config.weights;
        let lambda = weights[level - 1] / weights[..level].iter().sum::<f64>();
        let mut gram = Vec::with_capacity(level);
        gram.extend_from_slice(history);
        gram.push(w);
        let chw = self.grams.get(&gram).copied().unwrap_or(0);
        lambda * chw as f64 / ch as f64 + (1.0 - lambda) * lower
    }

    /// `P(word | history)`; only the last `order - 1` history tokens matter
    /// and unseen words map to [`UNK`].
    pub fn prob(&self, history: &[&str], word: &str) -> f64 {
        let keep = history.len().min(self.config.order - 1);
        let h: Vec<u32> = history[history.len() - keep..].iter().map(|w| self.id(w)).collect();
        self.p_ids(&h, self.id(word))
    }

    /// Log-probability of the tokens within `order - 1` of `mask`, each
    /// conditioned on its preceding tokens, with history cut at the start of
    /// `seq`.
    pub fn window_logprob(&self, seq: &[String], mask: usize) -> f64 {
        let n = self.config.order;
        let ids: Vec<u32> = seq.iter().map(|w| self.id(w)).collect();
        let lo = mask.saturating_sub(n - 1);
        let hi = (mask + n - 1).min(ids.len().saturating_sub(1));
        (lo..=hi)
            .map(|p| {
                let h0 = p.saturating_sub(n - 1);
                self.p_ids(&ids[h0..p], ids[p]).ln()
            })
            .sum()
    }
}

impl ScorerBackend for NgramModel {
    fn name(&self) -> &str {
        &self.name
    }

    fn contains(&self, word: &str) -> Result<bool, ScoreError> {
        Ok(word != UNK && self.ids.contains_key(word))
    }

    fn score(&self, task: &ClozeTask, candidates: &[String]) -> Result<Vec<f64>, ScoreError> {
        let mask = task.mask_index();
        Ok(candidates.iter().map(|c| self.window_logprob(&task.splice(c), mask)).collect())
    }
}

/// Trains with the default weights for `order`.
pub fn ngram_train(corpus: &SubtitleCorpus, order: usize) -> Result<NgramModel, NgramError> {
    NgramModel::train(corpus.documents.iter().map(|d| &d.tokens), NgramConfig::with_order(order)?)
}
