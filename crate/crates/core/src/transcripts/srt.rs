use super::{cue_tokens, decode_utf8, parse_timestamp, strip_markup, Source, Transcript, TranscriptError};

/// Parses a SubRip file.
///
/// Cues are separated by blank lines; each has an optional integer counter,
/// a `HH:MM:SS,mmm --> HH:MM:SS,mmm` timing line, then text. Cue numbers in
/// errors are 1-based positions in the file, not the counter values.
pub fn parse_srt(input: &[u8], video_id: &str, source: Source) -> Result<Transcript, TranscriptError> {
    let text = decode_utf8(input)?;
    let mut tokens = Vec::new();
    let mut prev_start = 0u64;

    for (i, block) in cue_blocks(text).into_iter().enumerate() {
        let cue = i + 1;
        let mut lines = block.iter().copied();
        let first = lines.next().unwrap_or_default();
        let timing = if first.contains("-->") {
            first
        } else {
            if first.trim().parse::<u64>().is_err() {
                return Err(TranscriptError::BadCueNumber { cue, line: first.to_string() });
            }
            lines.next().ok_or(TranscriptError::MissingTiming { cue })?
        };
        let (start, end) = parse_timing(timing, cue)?;
        if start < prev_start {
            return Err(TranscriptError::OutOfOrder { cue });
        }
        prev_start = start;
        for line in lines {
            cue_tokens(&strip_markup(line), start, end, cue, &mut tokens)?;
        }
    }
    Ok(Transcript { video_id: video_id.to_string(), source, tokens })
}

fn parse_timing(line: &str, cue: usize) -> Result<(u64, u64), TranscriptError> {
    let malformed = || TranscriptError::MalformedTimestamp { cue, line: line.to_string() };
    let (a, b) = line.split_once("-->").ok_or(TranscriptError::MissingTiming { cue })?;
    // some encoders append position hints after the end time
    let b = b.split_whitespace().next().ok_or_else(malformed)?;
    let start = parse_timestamp(a.trim(), ',', true).ok_or_else(malformed)?;
    let end = parse_timestamp(b, ',', true).ok_or_else(malformed)?;
    if end < start {
        return Err(TranscriptError::InvertedCue { cue });
    }
    Ok((start, end))
}

/// Groups lines into blank-line separated blocks.
pub(super) fn cue_blocks(text: &str) -> Vec<Vec<&str>> {
    let mut blocks = Vec::new();
    let mut current = Vec::new();
    for line in text.lines() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            if !current.is_empty() {
                blocks.push(std::mem::take(&mut current));
            }
        } else {
            current.push(line);
        }
    }
    if !current.is_empty() {
        blocks.push(current);
    }
    blocks
}
