//! Mutual agreement between two transcripts of the same video.
//!
//! MA is the fraction of words in the union vocabulary whose occurrence
//! counts are identical in both transcripts. It is a bag-of-words measure:
//! word order and alignment play no part.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::par::Strategy;
use crate::transcripts::Transcript;

/// Default half-width of the window used for snippet eligibility.
pub const DEFAULT_WINDOW: usize = 25;
/// Default minimum windowed agreement for a snippet to be eligible.
pub const DEFAULT_AGREEMENT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub video_id: String,
    pub ma: f64,
    pub vocab_union_size: usize,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum AgreementError {
    #[error("mutual agreement is undefined for two empty transcripts")]
    Undefined,
    #[error("window must be at least 1")]
    InvalidWindow,
    #[error("word {0:?} occurs in neither transcript")]
    NotFound(String),
    #[error("no agreement reports")]
    Empty,
}

fn counts<'a>(words: impl Iterator<Item = &'a str>) -> HashMap<&'a str, usize> {
    let mut m = HashMap::new();
    for w in words {
        *m.entry(w).or_insert(0) += 1;
    }
    m
}

/// MA over two word sequences; returns `(ma, union size)`.
pub fn agreement_of<'a>(
    a: impl Iterator<Item = &'a str>,
    b: impl Iterator<Item = &'a str>,
) -> Result<(f64, usize), AgreementError> {
    let ca = counts(a);
    let cb = counts(b);
    let mut union = ca.len();
    let mut equal = 0usize;
    for (w, n) in &ca {
        if cb.get(w) == Some(n) {
            equal += 1;
        }
    }
    for w in cb.keys() {
        if !ca.contains_key(w) {
            union += 1;
        }
    }
    if union == 0 {
        return Err(AgreementError::Undefined);
    }
    Ok((equal as f64 / union as f64, union))
}

pub fn mutual_agreement(t1: &Transcript, t2: &Transcript) -> Result<AgreementReport, AgreementError> {
    if t1.video_id != t2.video_id {
        log::warn!("comparing transcripts of different videos: {:?} vs {:?}", t1.video_id, t2.video_id);
    }
    let (ma, vocab_union_size) = agreement_of(t1.texts(), t2.texts())?;
    Ok(AgreementReport { video_id: t1.video_id.clone(), ma, vocab_union_size })
}

/// Tokens within `window` positions of the first occurrence of `word`, or
/// the whole transcript when the word is absent.
fn window_around<'a>(t: &'a Transcript, word: &str, window: usize) -> (&'a [crate::transcripts::Token], bool) {
    match t.tokens.iter().position(|tok| tok.text == word) {
        Some(i) => {
            let lo = i.saturating_sub(window);
            let hi = (i + window + 1).min(t.len());
            (&t.tokens[lo..hi], true)
        }
        None => (&t.tokens[..], false),
    }
}

/// MA restricted to `±window` tokens around the first occurrence of
/// `center_word` in each transcript. A transcript lacking the word
/// contributes in full.
pub fn window_agreement(
    t1: &Transcript,
    t2: &Transcript,
    center_word: &str,
    window: usize,
) -> Result<f64, AgreementError> {
    if window == 0 {
        return Err(AgreementError::InvalidWindow);
    }
    let (w1, found1) = window_around(t1, center_word, window);
    let (w2, found2) = window_around(t2, center_word, window);
    if !found1 && !found2 {
        return Err(AgreementError::NotFound(center_word.to_string()));
    }
    agreement_of(w1.iter().map(|t| t.text.as_str()), w2.iter().map(|t| t.text.as_str())).map(|(ma, _)| ma)
}

/// MA for many transcript pairs.
pub fn agreement_batch(
    pairs: &[(Transcript, Transcript)],
    strategy: Strategy,
) -> Vec<Result<AgreementReport, AgreementError>> {
    strategy.map(pairs, |(a, b)| mutual_agreement(a, b))
}

/// For each threshold, the fraction of reports with `ma >= threshold`.
pub fn ma_cdf(reports: &[AgreementReport], grid: &[f64]) -> Result<Vec<(f64, f64)>, AgreementError> {
    if reports.is_empty() {
        return Err(AgreementError::Empty);
    }
    let n = reports.len() as f64;
    Ok(grid.iter().map(|&t| (t, reports.iter().filter(|r| r.ma >= t).count() as f64 / n)).collect())
}

/// Grid `0.0, 0.1, ..., 1.0`.
pub fn default_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}
