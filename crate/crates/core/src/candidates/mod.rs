//! Replacement candidates for a flagged word.
//!
//! A candidate set holds vocabulary words that are lexically (edit distance)
//! or phonetically (Double Metaphone) close to the flagged word, plus the
//! flagged word itself so a scorer can still prefer it.

mod levenshtein;
mod phonetic;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::par::Strategy;

pub use levenshtein::{levenshtein, levenshtein_within};
pub use phonetic::{phonetic_key, PhoneticKey};

/// Default edit-distance radius.
pub const DEFAULT_RADIUS: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CandidateMode {
    Levenshtein,
    Phonetic,
}

impl FromStr for CandidateMode {
    type Err = CandidateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lev" | "levenshtein" => Ok(CandidateMode::Levenshtein),
            "phon" | "phonetic" => Ok(CandidateMode::Phonetic),
            _ => Err(CandidateError::UnknownMode(s.to_string())),
        }
    }
}

impl fmt::Display for CandidateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CandidateMode::Levenshtein => "lev",
            CandidateMode::Phonetic => "phon",
        })
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CandidateError {
    #[error("candidate vocabulary is empty")]
    EmptyVocabulary,
    #[error("levenshtein radius must be at least 1")]
    InvalidRadius,
    #[error("unknown candidate mode {0:?} (expected lev or phon)")]
    UnknownMode(String),
}

/// Sorted, deduplicated word list.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
}

impl Vocabulary {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut words: Vec<String> = words.into_iter().map(Into::into).filter(|w| !w.is_empty()).collect();
        words.sort_unstable();
        words.dedup();
        Vocabulary { words }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.binary_search_by(|w| w.as_str().cmp(word)).is_ok()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Words kept by `keep`, e.g. a scorer's vocabulary query.
    pub fn retain(mut self, mut keep: impl FnMut(&str) -> bool) -> Self {
        self.words.retain(|w| keep(w));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub flagged: String,
    pub mode: CandidateMode,
    /// Ordered by (distance, word) or (match tier, word); no duplicates.
    pub words: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<usize>,
}

impl CandidateSet {
    /// A set holding only the flagged word.
    pub fn singleton(flagged: &str, mode: CandidateMode) -> Self {
        CandidateSet { flagged: flagged.to_string(), mode, words: vec![flagged.to_string()], radius: None }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.iter().any(|w| w == word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Phonetic match tier: 0 for equal primary codes, 1 when one word's
/// alternate code equals the other's primary.
pub fn phonetic_tier(a: &PhoneticKey, b: &PhoneticKey) -> Option<u8> {
    if a.primary.is_empty() || b.primary.is_empty() {
        return None;
    }
    if a.primary == b.primary {
        Some(0)
    } else if a.secondary.as_deref() == Some(b.primary.as_str()) || b.secondary.as_deref() == Some(a.primary.as_str()) {
        Some(1)
    } else {
        None
    }
}

fn finish(flagged: &str, mode: CandidateMode, radius: Option<usize>, mut scored: Vec<(usize, String)>) -> CandidateSet {
    if !scored.iter().any(|(_, w)| w == flagged) {
        scored.push((0, flagged.to_string()));
    }
    scored.sort_unstable();
    // keep the best key per word
    let mut seen = std::collections::HashSet::new();
    scored.retain(|(_, w)| seen.insert(w.clone()));
    CandidateSet { flagged: flagged.to_string(), mode, words: scored.into_iter().map(|(_, w)| w).collect(), radius }
}

fn check(vocab: &Vocabulary, mode: CandidateMode, radius: usize) -> Result<(), CandidateError> {
    if vocab.is_empty() {
        return Err(CandidateError::EmptyVocabulary);
    }
    if mode == CandidateMode::Levenshtein && radius == 0 {
        return Err(CandidateError::InvalidRadius);
    }
    Ok(())
}

/// Scans the whole vocabulary for words near `flagged`.
///
/// `radius` is only used in Levenshtein mode.
pub fn generate_candidates(
    flagged: &str,
    vocab: &Vocabulary,
    mode: CandidateMode,
    radius: usize,
) -> Result<CandidateSet, CandidateError> {
    generate_candidates_with(flagged, vocab, mode, radius, Strategy::default())
}

pub fn generate_candidates_with(
    flagged: &str,
    vocab: &Vocabulary,
    mode: CandidateMode,
    radius: usize,
    strategy: Strategy,
) -> Result<CandidateSet, CandidateError> {
    check(vocab, mode, radius)?;
    Ok(match mode {
        CandidateMode::Levenshtein => {
            let flagged_chars: Vec<char> = flagged.chars().collect();
            let hits = strategy.filter_map(vocab.words(), |w| {
                levenshtein::within_chars(&flagged_chars, w, radius).map(|d| (d, w.clone()))
            });
            finish(flagged, mode, Some(radius), hits)
        }
        CandidateMode::Phonetic => {
            let key = phonetic_key(flagged);
            let hits = strategy
                .filter_map(vocab.words(), |w| phonetic_tier(&key, &phonetic_key(w)).map(|t| (t as usize, w.clone())));
            finish(flagged, mode, None, hits)
        }
    })
}

/// Prebuilt lookup structure over a vocabulary: words bucketed by length and
/// by phonetic code. Immutable once built, so it can be shared across
/// threads.
#[derive(Debug, Clone)]
pub struct CandidateIndex {
    vocab: Vocabulary,
    by_len: BTreeMap<usize, Vec<u32>>,
    by_primary: HashMap<String, Vec<u32>>,
    by_secondary: HashMap<String, Vec<u32>>,
}

impl CandidateIndex {
    pub fn new(vocab: Vocabulary) -> Self {
        let mut by_len: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        let mut by_primary: HashMap<String, Vec<u32>> = HashMap::new();
        let mut by_secondary: HashMap<String, Vec<u32>> = HashMap::new();
        for (i, w) in vocab.words().iter().enumerate() {
            let id = i as u32;
            by_len.entry(w.chars().count()).or_default().push(id);
            let key = phonetic_key(w);
            if key.primary.is_empty() {
                continue;
            }
            if let Some(s) = key.secondary {
                by_secondary.entry(s).or_default().push(id);
            }
            by_primary.entry(key.primary).or_default().push(id);
        }
        CandidateIndex { vocab, by_len, by_primary, by_secondary }
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn candidates(
        &self,
        flagged: &str,
        mode: CandidateMode,
        radius: usize,
    ) -> Result<CandidateSet, CandidateError> {
        check(&self.vocab, mode, radius)?;
        let words = self.vocab.words();
        Ok(match mode {
            CandidateMode::Levenshtein => {
                let flagged_chars: Vec<char> = flagged.chars().collect();
                let n = flagged_chars.len();
                let hits = self
                    .by_len
                    .range(n.saturating_sub(radius)..=n + radius)
                    .flat_map(|(_, ids)| ids)
                    .filter_map(|&id| {
                        let w = &words[id as usize];
                        levenshtein::within_chars(&flagged_chars, w, radius).map(|d| (d, w.clone()))
                    })
                    .collect();
                finish(flagged, mode, Some(radius), hits)
            }
            CandidateMode::Phonetic => {
                let key = phonetic_key(flagged);
                let mut hits: Vec<(usize, String)> = Vec::new();
                if !key.primary.is_empty() {
                    let ids = |m: &HashMap<String, Vec<u32>>, code: &str| m.get(code).cloned().unwrap_or_default();
                    for id in ids(&self.by_primary, &key.primary) {
                        hits.push((0, words[id as usize].clone()));
                    }
                    let mut cross = ids(&self.by_secondary, &key.primary);
                    if let Some(s) = &key.secondary {
                        cross.extend(ids(&self.by_primary, s));
                    }
                    for id in cross {
                        hits.push((1, words[id as usize].clone()));
                    }
                }
                finish(flagged, mode, None, hits)
            }
        })
    }
}
