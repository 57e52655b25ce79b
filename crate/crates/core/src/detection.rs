//! Taboo-word detection, snippet extraction and flag reports.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::agreement::{window_agreement, AgreementError};
use crate::lexicon::{Severity, TabooLexicon};
use crate::par::Strategy;
use crate::transcripts::{Source, Transcript};

/// Default snippet half-width in tokens.
pub const DEFAULT_SNIPPET_WINDOW: usize = 25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlaggedOccurrence {
    pub video_id: String,
    pub source: Source,
    pub token_index: usize,
    pub word: String,
    pub severity: Severity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snippet {
    pub tokens: Vec<String>,
    pub flag_offset: usize,
    pub origin: FlaggedOccurrence,
}

impl Snippet {
    pub fn flagged_word(&self) -> &str {
        &self.tokens[self.flag_offset]
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum DetectionError {
    #[error("window must be at least 1")]
    InvalidWindow,
    #[error("bins must be at least 1")]
    InvalidBins,
    #[error("top_n must be at least 1")]
    InvalidTopN,
    #[error("stale flag: token {index} of {video_id} is not {word:?}")]
    StaleFlag { video_id: String, index: usize, word: String },
}

/// One flag per token whose text is exactly a lexicon surface, in token order.
pub fn detect(t: &Transcript, lex: &TabooLexicon) -> Vec<FlaggedOccurrence> {
    t.tokens
        .iter()
        .enumerate()
        .filter_map(|(i, tok)| {
            lex.get(&tok.text).map(|entry| FlaggedOccurrence {
                video_id: t.video_id.clone(),
                source: t.source,
                token_index: i,
                word: tok.text.clone(),
                severity: entry.severity,
                confidence: tok.confidence,
            })
        })
        .collect()
}

/// [`detect`] over many transcripts; output order follows input order.
pub fn detect_batch(transcripts: &[Transcript], lex: &TabooLexicon, strategy: Strategy) -> Vec<Vec<FlaggedOccurrence>> {
    strategy.map(transcripts, |t| detect(t, lex))
}

/// `±window` tokens around the flag, clipped at the transcript edges.
pub fn extract_snippet(t: &Transcript, flag: &FlaggedOccurrence, window: usize) -> Result<Snippet, DetectionError> {
    if window == 0 {
        return Err(DetectionError::InvalidWindow);
    }
    let i = flag.token_index;
    if t.tokens.get(i).map(|tok| tok.text.as_str()) != Some(flag.word.as_str()) {
        return Err(DetectionError::StaleFlag { video_id: t.video_id.clone(), index: i, word: flag.word.clone() });
    }
    let lo = i.saturating_sub(window);
    let hi = (i + window + 1).min(t.len());
    Ok(Snippet {
        tokens: t.tokens[lo..hi].iter().map(|tok| tok.text.clone()).collect(),
        flag_offset: i - lo,
        origin: flag.clone(),
    })
}

/// Flag counts per word, descending; ties broken lexicographically.
pub fn frequency_report(flags: &[FlaggedOccurrence], top_n: usize) -> Result<Vec<(String, usize)>, DetectionError> {
    if top_n == 0 {
        return Err(DetectionError::InvalidTopN);
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for f in flags {
        *counts.entry(&f.word).or_insert(0) += 1;
    }
    let mut rows: Vec<(String, usize)> = counts.into_iter().map(|(w, c)| (w.to_string(), c)).collect();
    rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    rows.truncate(top_n);
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceHistogram {
    pub bins: Vec<HistogramBin>,
    /// Flags without a confidence value.
    pub unscored: usize,
}

impl ConfidenceHistogram {
    pub fn total(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum::<usize>() + self.unscored
    }
}

/// Equal-width bins over `[0, 1]`; the last bin is closed on the right.
pub fn confidence_histogram(flags: &[FlaggedOccurrence], bins: usize) -> Result<ConfidenceHistogram, DetectionError> {
    if bins == 0 {
        return Err(DetectionError::InvalidBins);
    }
    let edge = |i: usize| i as f64 / bins as f64;
    let mut hist = ConfidenceHistogram {
        bins: (0..bins).map(|i| HistogramBin { lo: edge(i), hi: edge(i + 1), count: 0 }).collect(),
        unscored: 0,
    };
    for f in flags {
        match f.confidence {
            Some(c) => hist.bins[bin_index(c, bins)].count += 1,
            None => hist.unscored += 1,
        }
    }
    Ok(hist)
}

fn bin_index(c: f64, bins: usize) -> usize {
    let c = c.clamp(0.0, 1.0);
    let mut i = ((c * bins as f64).floor() as usize).min(bins - 1);
    // correct float drift so that edge(i) <= c < edge(i + 1)
    if i + 1 < bins && (i + 1) as f64 / bins as f64 <= c {
        i += 1;
    } else if i > 0 && i as f64 / bins as f64 > c {
        i -= 1;
    }
    i
}

/// Per-channel presence counts: videos with at least one flag, and videos
/// with at least one highly inappropriate flag.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelTally {
    pub videos: usize,
    pub videos_flagged: usize,
    pub videos_high: usize,
}

impl ChannelTally {
    pub fn merge(self, o: ChannelTally) -> ChannelTally {
        ChannelTally {
            videos: self.videos + o.videos,
            videos_flagged: self.videos_flagged + o.videos_flagged,
            videos_high: self.videos_high + o.videos_high,
        }
    }
}

/// Aggregates `(channel, flags of one video)` pairs. A video counts once no
/// matter how many flags it has.
pub fn channel_report<'a>(
    videos: impl IntoIterator<Item = (&'a str, &'a [FlaggedOccurrence])>,
) -> BTreeMap<String, ChannelTally> {
    let mut out: BTreeMap<String, ChannelTally> = BTreeMap::new();
    for (channel, flags) in videos {
        let tally = ChannelTally {
            videos: 1,
            videos_flagged: usize::from(!flags.is_empty()),
            videos_high: usize::from(flags.iter().any(|f| f.severity == Severity::High)),
        };
        let slot = out.entry(channel.to_string()).or_default();
        *slot = std::mem::take(slot).merge(tally);
    }
    out
}

/// A benchmark row candidate. `snippet.origin.source` records which
/// transcript produced the flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub snippet: Snippet,
    pub window_agreement: f64,
}

/// Snippets around flags in either transcript of a video whose windowed
/// agreement reaches `agreement_threshold`.
pub fn build_benchmark_rows(
    pair: (&Transcript, &Transcript),
    lex: &TabooLexicon,
    window: usize,
    agreement_threshold: f64,
) -> Result<Vec<BenchmarkRow>, DetectionError> {
    if window == 0 {
        return Err(DetectionError::InvalidWindow);
    }
    let (a, b) = pair;
    let mut rows = Vec::new();
    for t in [a, b] {
        for flag in detect(t, lex) {
            let agreement = match window_agreement(a, b, &flag.word, window) {
                Ok(x) => x,
                Err(AgreementError::InvalidWindow) => return Err(DetectionError::InvalidWindow),
                Err(e) => unreachable!("flagged word is present in its transcript: {e}"),
            };
            if agreement >= agreement_threshold {
                rows.push(BenchmarkRow { snippet: extract_snippet(t, &flag, window)?, window_agreement: agreement });
            }
        }
    }
    Ok(rows)
}
