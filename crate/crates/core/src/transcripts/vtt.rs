use super::srt::cue_blocks;
use super::{cue_tokens, decode_utf8, parse_timestamp, strip_markup, Source, Transcript, TranscriptError};

/// Parses a WebVTT file.
///
/// `NOTE`, `STYLE` and `REGION` blocks are skipped, cue identifiers and cue
/// settings are ignored, and inline tags are stripped. Overlapping or
/// unordered cues are accepted; tokens are ordered by cue start, then by cue
/// order in the file.
pub fn parse_vtt(input: &[u8], video_id: &str, source: Source) -> Result<Transcript, TranscriptError> {
    let text = decode_utf8(input)?;
    let mut blocks = cue_blocks(text).into_iter();

    let header = blocks.next().ok_or(TranscriptError::MissingHeader)?;
    let sig = header[0];
    let rest = sig.strip_prefix("WEBVTT").ok_or(TranscriptError::MissingHeader)?;
    if !(rest.is_empty() || rest.starts_with(' ') || rest.starts_with('\t')) {
        return Err(TranscriptError::MissingHeader);
    }

    let mut cues: Vec<(u64, usize, Vec<super::Token>)> = Vec::new();
    for (i, block) in blocks.enumerate() {
        let cue = i + 1;
        let first = block[0];
        if ["NOTE", "STYLE", "REGION"]
            .iter()
            .any(|kw| first == *kw || first.starts_with(&format!("{kw} ")) || first.starts_with(&format!("{kw}\t")))
        {
            continue;
        }
        let mut lines = block.iter().copied();
        let timing = if first.contains("-->") {
            lines.next();
            first
        } else {
            lines.next();
            lines.next().ok_or(TranscriptError::MissingTiming { cue })?
        };
        let (start, end) = parse_timing(timing, cue)?;
        let mut tokens = Vec::new();
        for line in lines {
            cue_tokens(&strip_markup(line), start, end, cue, &mut tokens)?;
        }
        cues.push((start, cue, tokens));
    }
    cues.sort_by_key(|(start, cue, _)| (*start, *cue));
    Ok(Transcript {
        video_id: video_id.to_string(),
        source,
        tokens: cues.into_iter().flat_map(|(_, _, t)| t).collect(),
    })
}

fn parse_timing(line: &str, cue: usize) -> Result<(u64, u64), TranscriptError> {
    let malformed = || TranscriptError::MalformedTimestamp { cue, line: line.to_string() };
    let (a, b) = line.split_once("-->").ok_or(TranscriptError::MissingTiming { cue })?;
    let b = b.split_whitespace().next().ok_or_else(malformed)?;
    let start = parse_timestamp(a.trim(), '.', false).ok_or_else(malformed)?;
    let end = parse_timestamp(b, '.', false).ok_or_else(malformed)?;
    if end < start {
        return Err(TranscriptError::InvertedCue { cue });
    }
    Ok((start, end))
}
