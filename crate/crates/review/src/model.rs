use std::fmt;

use serde::{Deserialize, Serialize};
use taboo_core::cloze::{Correction, ScoredCandidate};
use taboo_core::detection::Snippet;

/// Candidates kept per item unless the queue says otherwise.
pub const DEFAULT_TOP_K: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pending,
    Decided,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pending => "pending",
            Status::Decided => "decided",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pending" => Ok(Status::Pending),
            "decided" => Ok(Status::Decided),
            _ => Err(format!("unknown status {s:?}; expected pending or decided")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// The flagged word is a hallucination; `chosen_word` is what was said.
    AcceptFix,
    /// The flagged word really is in the audio.
    PresentInAudio,
    Unsure,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::AcceptFix => "accept_fix",
            Verdict::PresentInAudio => "present_in_audio",
            Verdict::Unsure => "unsure",
        }
    }
}

/// One reviewer's judgement on one item.
///
/// `chosen_word` is present iff `verdict` is `accept_fix`, and is one of the
/// item's candidate words unless `free_text` is set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReviewDecision {
    pub item_id: String,
    pub reviewer: String,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chosen_word: Option<String>,
    #[serde(default)]
    pub free_text: bool,
    /// UTC milliseconds since the Unix epoch.
    pub timestamp_ms: u64,
}

impl ReviewDecision {
    /// Equal verdicts; reviewer and timestamp are ignored.
    pub fn same_judgement(&self, other: &ReviewDecision) -> bool {
        self.verdict == other.verdict && self.chosen_word == other.chosen_word && self.free_text == other.free_text
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReviewItem {
    pub id: String,
    pub snippet: Snippet,
    /// Sorted by rank.
    pub candidates: Vec<ScoredCandidate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub media_url: Option<String>,
    pub status: Status,
    /// The first decision; present iff `status` is decided.
    pub decision: Option<ReviewDecision>,
    /// Every accepted decision in arrival order.
    #[serde(default)]
    pub decisions: Vec<ReviewDecision>,
}

impl ReviewItem {
    pub fn has_candidate(&self, word: &str) -> bool {
        self.candidates.iter().any(|c| c.word == word)
    }
}

/// A scored snippet on its way into the queue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestRecord {
    /// Derived from the snippet origin when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub snippet: Snippet,
    pub candidates: Vec<ScoredCandidate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub media_url: Option<String>,
}

impl IngestRecord {
    pub fn from_correction(snippet: Snippet, correction: &Correction) -> Self {
        IngestRecord { id: None, snippet, candidates: correction.ranking.ranked.clone(), media_url: None }
    }

    /// `video:source:token_index` of the flagged occurrence.
    pub fn derived_id(&self) -> String {
        let o = &self.snippet.origin;
        format!("{}:{}:{}", o.video_id, o.source, o.token_index)
    }

    /// Pending item with the best `top_k` candidates.
    pub fn into_item(self, top_k: usize) -> ReviewItem {
        let id = self.id.clone().unwrap_or_else(|| self.derived_id());
        let mut candidates = self.candidates;
        candidates.sort_by_key(|c| c.rank);
        candidates.truncate(top_k);
        ReviewItem {
            id,
            snippet: self.snippet,
            candidates,
            media_url: self.media_url,
            status: Status::Pending,
            decision: None,
            decisions: Vec::new(),
        }
    }
}

/// Counts over the whole queue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub pending: usize,
    pub decided: usize,
    /// Verdict of each decided item's first decision.
    pub accept_fix: usize,
    pub present_in_audio: usize,
    pub unsure: usize,
    pub free_text_overrides: usize,
    /// Decided items carrying two decisions.
    pub double_keyed: usize,
    pub double_keyed_agreeing: usize,
    /// `double_keyed_agreeing / double_keyed`; absent when nothing was
    /// double-keyed.
    pub agreement_rate: Option<f64>,
}
