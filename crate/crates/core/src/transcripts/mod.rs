//! Canonical token streams parsed from subtitle and ASR output files.
//!
//! All parsers funnel into [`Transcript`]: an ordered list of normalized
//! [`Token`]s with optional timing and per-word confidence. Subtitle formats
//! only carry cue-level timing, so every word of a cue shares its cue times.

mod json;
mod normalize;
mod srt;
mod vtt;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use json::{parse_asr_json, to_canonical_json, JsonDialect};
pub use normalize::normalize;
pub use srt::parse_srt;
pub use vtt::parse_vtt;

/// Reserved cloze mask symbol. Input text containing it is rejected.
pub const MASK: &str = "[MASK]";

/// Which system produced a transcript.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Aws,
    Youtube,
    Other,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Aws => "aws",
            Source::Youtube => "youtube",
            Source::Other => "other",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Source {
    type Err = TranscriptError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "aws" => Ok(Source::Aws),
            "youtube" => Ok(Source::Youtube),
            "other" => Ok(Source::Other),
            _ => Err(TranscriptError::UnknownSource(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Token {
    pub text: String,
    pub raw: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_ms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
}

impl Token {
    /// Normalizes `raw`; returns `None` when nothing survives normalization.
    pub fn from_raw(raw: &str) -> Option<Token> {
        let text = normalize(raw);
        if text.is_empty() {
            return None;
        }
        Some(Token { text, raw: raw.to_string(), start_ms: None, end_ms: None, confidence: None })
    }

    pub fn with_times(mut self, start_ms: u64, end_ms: u64) -> Token {
        self.start_ms = Some(start_ms);
        self.end_ms = Some(end_ms);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub video_id: String,
    pub source: Source,
    pub tokens: Vec<Token>,
}

impl Transcript {
    /// Builds a transcript and checks the token invariants.
    pub fn new(video_id: impl Into<String>, source: Source, tokens: Vec<Token>) -> Result<Self, TranscriptError> {
        let t = Transcript { video_id: video_id.into(), source, tokens };
        t.validate()?;
        Ok(t)
    }

    /// Untimed transcript from already-split words; words that normalize to
    /// nothing are dropped.
    pub fn from_words<S: AsRef<str>>(video_id: impl Into<String>, source: Source, words: &[S]) -> Self {
        Transcript {
            video_id: video_id.into(),
            source,
            tokens: words.iter().filter_map(|w| Token::from_raw(w.as_ref())).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.text.as_str())
    }

    pub fn validate(&self) -> Result<(), TranscriptError> {
        let mut last_start = None;
        for (index, tok) in self.tokens.iter().enumerate() {
            if tok.text.is_empty() || normalize(&tok.text) != tok.text {
                return Err(TranscriptError::InvalidToken {
                    index,
                    reason: format!("text {:?} is not in normalized form", tok.text),
                });
            }
            if tok.raw.contains(MASK) || tok.text.contains(MASK) {
                return Err(TranscriptError::ReservedMask { location: format!("token {index}") });
            }
            if let Some(c) = tok.confidence {
                if !(0.0..=1.0).contains(&c) {
                    return Err(TranscriptError::ConfidenceOutOfRange {
                        path: format!("tokens[{index}].confidence"),
                        value: c.to_string(),
                    });
                }
            }
            if let (Some(s), Some(e)) = (tok.start_ms, tok.end_ms) {
                if e < s {
                    return Err(TranscriptError::InvalidToken {
                        index,
                        reason: format!("end_ms {e} precedes start_ms {s}"),
                    });
                }
            }
            if let Some(s) = tok.start_ms {
                if last_start.is_some_and(|prev| s < prev) {
                    return Err(TranscriptError::InvalidToken {
                        index,
                        reason: format!("start_ms {s} goes backwards"),
                    });
                }
                last_start = Some(s);
            }
        }
        Ok(())
    }
}

/// Multiset counts of token texts.
pub fn vocabulary_counts(t: &Transcript) -> HashMap<String, usize> {
    let mut counts = HashMap::new();
    for tok in &t.tokens {
        *counts.entry(tok.text.clone()).or_insert(0) += 1;
    }
    counts
}

/// Input formats accepted by [`parse_transcript`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Srt,
    Vtt,
    Json,
    AwsJson,
}

impl FromStr for Format {
    type Err = TranscriptError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "srt" => Ok(Format::Srt),
            "vtt" => Ok(Format::Vtt),
            "json" => Ok(Format::Json),
            "aws" | "aws-json" => Ok(Format::AwsJson),
            _ => Err(TranscriptError::UnknownFormat(s.to_string())),
        }
    }
}

impl Format {
    /// Guesses the format from a file extension.
    pub fn from_extension(path: &std::path::Path) -> Option<Format> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "srt" => Some(Format::Srt),
            "vtt" => Some(Format::Vtt),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

/// Dispatches to the parser for `format`. For canonical JSON the file's own
/// `video_id` and `source` win over the arguments.
pub fn parse_transcript(
    input: &[u8],
    format: Format,
    video_id: &str,
    source: Source,
) -> Result<Transcript, TranscriptError> {
    match format {
        Format::Srt => parse_srt(input, video_id, source),
        Format::Vtt => parse_vtt(input, video_id, source),
        Format::Json => parse_asr_json(input, JsonDialect::Canonical, video_id, source),
        Format::AwsJson => parse_asr_json(input, JsonDialect::AwsLike, video_id, source),
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum TranscriptError {
    #[error("input is not valid UTF-8")]
    InvalidUtf8,
    #[error("cue {cue}: malformed timestamp line {line:?}")]
    MalformedTimestamp { cue: usize, line: String },
    #[error("cue {cue}: missing timing line")]
    MissingTiming { cue: usize },
    #[error("cue {cue}: cue number {line:?} is not an integer")]
    BadCueNumber { cue: usize, line: String },
    #[error("cue {cue}: end time precedes start time")]
    InvertedCue { cue: usize },
    #[error("cue {cue}: starts before the previous cue")]
    OutOfOrder { cue: usize },
    #[error("missing WEBVTT header")]
    MissingHeader,
    #[error("{location}: contains the reserved mask symbol")]
    ReservedMask { location: String },
    #[error("{path}: {message}")]
    Json { path: String, message: String },
    #[error("{path}: confidence {value} outside [0, 1]")]
    ConfidenceOutOfRange { path: String, value: String },
    #[error("token {index}: {reason}")]
    InvalidToken { index: usize, reason: String },
    #[error("unknown transcript source {0:?}")]
    UnknownSource(String),
    #[error("unknown transcript format {0:?}")]
    UnknownFormat(String),
}

impl TranscriptError {
    /// Stable snake_case name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            TranscriptError::InvalidUtf8 => "invalid_utf8",
            TranscriptError::MalformedTimestamp { .. } => "malformed_timestamp",
            TranscriptError::MissingTiming { .. } => "missing_timing",
            TranscriptError::BadCueNumber { .. } => "bad_cue_number",
            TranscriptError::InvertedCue { .. } => "inverted_cue",
            TranscriptError::OutOfOrder { .. } => "out_of_order",
            TranscriptError::MissingHeader => "missing_header",
            TranscriptError::ReservedMask { .. } => "reserved_mask",
            TranscriptError::Json { .. } => "json",
            TranscriptError::ConfidenceOutOfRange { .. } => "confidence_out_of_range",
            TranscriptError::InvalidToken { .. } => "invalid_token",
            TranscriptError::UnknownSource(_) => "unknown_source",
            TranscriptError::UnknownFormat(_) => "unknown_format",
        }
    }
}

/// Strips a UTF-8 BOM and decodes.
pub(crate) fn decode_utf8(input: &[u8]) -> Result<&str, TranscriptError> {
    let input = input.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(input);
    std::str::from_utf8(input).map_err(|_| TranscriptError::InvalidUtf8)
}

/// Splits cue text into tokens sharing the cue's times.
pub(crate) fn cue_tokens(
    text: &str,
    start_ms: u64,
    end_ms: u64,
    cue: usize,
    out: &mut Vec<Token>,
) -> Result<(), TranscriptError> {
    if text.contains(MASK) {
        return Err(TranscriptError::ReservedMask { location: format!("cue {cue}") });
    }
    out.extend(text.split_whitespace().filter_map(Token::from_raw).map(|t| t.with_times(start_ms, end_ms)));
    Ok(())
}

/// Removes `<...>` markup and decodes the handful of entities subtitle
/// files use in practice.
pub(crate) fn strip_markup(line: &str) -> String {
    let mut out = String::with_capacity(line.len());
    let mut in_tag = false;
    for c in line.chars() {
        match c {
            '<' => in_tag = true,
            '>' if in_tag => in_tag = false,
            _ if !in_tag => out.push(c),
            _ => {}
        }
    }
    out.replace("&nbsp;", " ")
        .replace("&lrm;", "")
        .replace("&rlm;", "")
        .replace("&lt;", "<")
        .replace("&gt;", ">")
        .replace("&amp;", "&")
}

/// Parses `[HH:]MM:SS<sep>mmm`. Hours are required when `hours_required`.
pub(crate) fn parse_timestamp(s: &str, sep: char, hours_required: bool) -> Option<u64> {
    let (clock, millis) = s.split_once(sep)?;
    if millis.len() != 3 || !millis.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let parts: Vec<&str> = clock.split(':').collect();
    let (h, m, sec) = match parts.as_slice() {
        [h, m, s] => (*h, *m, *s),
        [m, s] if !hours_required => ("0", *m, *s),
        _ => return None,
    };
    let digits = |x: &str| !x.is_empty() && x.bytes().all(|b| b.is_ascii_digit());
    if !digits(h) || m.len() != 2 || sec.len() != 2 || !digits(m) || !digits(sec) {
        return None;
    }
    let (h, m, sec): (u64, u64, u64) = (h.parse().ok()?, m.parse().ok()?, sec.parse().ok()?);
    if m >= 60 || sec >= 60 {
        return None;
    }
    let ms: u64 = millis.parse().ok()?;
    Some(((h * 60 + m) * 60 + sec) * 1000 + ms)
}
