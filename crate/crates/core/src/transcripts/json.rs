use serde::de::DeserializeOwned;
use serde::Deserialize;

use super::{decode_utf8, Source, Token, Transcript, TranscriptError, MASK};

/// JSON transcript layouts understood by [`parse_asr_json`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JsonDialect {
    /// This crate's own serialization of [`Transcript`].
    Canonical,
    /// Transcription-job output: `results.items[]` with typed items whose
    /// `alternatives` carry `content` and `confidence`.
    AwsLike,
}

/// Parses JSON transcripts. Structural errors carry the JSON path of the
/// offending value.
///
/// For the canonical dialect the document's own `video_id` and `source` are
/// used; the arguments only apply to the AWS-like dialect, which has none.
pub fn parse_asr_json(
    input: &[u8],
    dialect: JsonDialect,
    video_id: &str,
    source: Source,
) -> Result<Transcript, TranscriptError> {
    let text = decode_utf8(input)?;
    match dialect {
        JsonDialect::Canonical => {
            let t: Transcript = from_str_with_path(text)?;
            t.validate()?;
            Ok(t)
        }
        JsonDialect::AwsLike => parse_aws(text, video_id, source),
    }
}

/// Serializes to the canonical dialect.
pub fn to_canonical_json(t: &Transcript) -> String {
    serde_json::to_string(t).expect("transcript serialization is infallible")
}

fn from_str_with_path<T: DeserializeOwned>(text: &str) -> Result<T, TranscriptError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        TranscriptError::Json {
            path: if path.is_empty() { "$".into() } else { path },
            message: e.into_inner().to_string(),
        }
    })
}

#[derive(Deserialize)]
struct AwsDoc {
    results: AwsResults,
}

#[derive(Deserialize)]
struct AwsResults {
    items: Vec<AwsItem>,
}

#[derive(Deserialize)]
struct AwsItem {
    #[serde(rename = "type")]
    kind: String,
    #[serde(default)]
    start_time: Option<NumOrString>,
    #[serde(default)]
    end_time: Option<NumOrString>,
    alternatives: Vec<AwsAlternative>,
}

#[derive(Deserialize)]
struct AwsAlternative {
    content: String,
    #[serde(default)]
    confidence: Option<NumOrString>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumOrString {
    Num(f64),
    Str(String),
}

impl NumOrString {
    fn value(&self) -> Option<f64> {
        match self {
            NumOrString::Num(x) => Some(*x),
            NumOrString::Str(s) => s.trim().parse().ok(),
        }
        .filter(|x: &f64| x.is_finite())
    }

    fn raw(&self) -> String {
        match self {
            NumOrString::Num(x) => x.to_string(),
            NumOrString::Str(s) => s.clone(),
        }
    }
}

fn parse_aws(text: &str, video_id: &str, source: Source) -> Result<Transcript, TranscriptError> {
    let doc: AwsDoc = from_str_with_path(text)?;
    let mut tokens = Vec::new();
    for (i, item) in doc.results.items.iter().enumerate() {
        match item.kind.as_str() {
            "punctuation" => continue,
            "pronunciation" => {}
            other => {
                return Err(TranscriptError::Json {
                    path: format!("results.items[{i}].type"),
                    message: format!("unknown item type {other:?}"),
                })
            }
        }
        let alt = item.alternatives.first().ok_or_else(|| TranscriptError::Json {
            path: format!("results.items[{i}].alternatives"),
            message: "no alternatives".into(),
        })?;
        if alt.content.contains(MASK) {
            return Err(TranscriptError::ReservedMask {
                location: format!("results.items[{i}].alternatives[0].content"),
            });
        }
        let confidence = match &alt.confidence {
            None => None,
            Some(c) => {
                let path = format!("results.items[{i}].alternatives[0].confidence");
                let v = c.value().ok_or_else(|| TranscriptError::Json {
                    path: path.clone(),
                    message: format!("not a number: {:?}", c.raw()),
                })?;
                if !(0.0..=1.0).contains(&v) {
                    return Err(TranscriptError::ConfidenceOutOfRange { path, value: c.raw() });
                }
                Some(v)
            }
        };
        let start_ms = seconds_to_ms(item.start_time.as_ref(), i, "start_time")?;
        let end_ms = seconds_to_ms(item.end_time.as_ref(), i, "end_time")?;
        for word in alt.content.split_whitespace() {
            if let Some(mut tok) = Token::from_raw(word) {
                tok.start_ms = start_ms;
                tok.end_ms = end_ms;
                tok.confidence = confidence;
                tokens.push(tok);
            }
        }
    }
    Transcript::new(video_id, source, tokens)
}

fn seconds_to_ms(v: Option<&NumOrString>, i: usize, field: &str) -> Result<Option<u64>, TranscriptError> {
    let Some(v) = v else { return Ok(None) };
    match v.value() {
        Some(s) if s >= 0.0 => Ok(Some((s * 1000.0).round() as u64)),
        _ => Err(TranscriptError::Json {
            path: format!("results.items[{i}].{field}"),
            message: format!("invalid seconds value {:?}", v.raw()),
        }),
    }
}
