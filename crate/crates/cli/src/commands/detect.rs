use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;
use taboo_core::detection::{channel_report, confidence_histogram, detect_batch, extract_snippet, frequency_report};
use taboo_core::transcripts::{Format, Source, Transcript};
use taboo_core::{FlaggedOccurrence, Strategy};

use crate::config::RunConfig;
use crate::error::{input_error, Classify, CliResult};
use crate::io;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Report {
    /// One JSON line per flagged occurrence.
    Flags,
    /// One JSON line per snippet around a flag.
    Snippets,
    /// CSV of the most frequent flagged words.
    Freq,
    /// CSV confidence histogram.
    Hist,
    /// CSV of per-channel video counts.
    Channels,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// A transcript, or a CSV manifest with columns
    /// video_id,path[,channel][,source].
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    #[arg(long, value_name = "FILE")]
    lexicon: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    /// Source of a single transcript.
    #[arg(long, default_value = "other")]
    source: Source,
    #[arg(long, value_enum, default_value = "flags")]
    report: Report,
    #[arg(long)]
    window: Option<usize>,
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    top_n: Option<usize>,
}

impl Args {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if self.lexicon.is_some() {
            cfg.paths.lexicon.clone_from(&self.lexicon);
        }
        if let Some(w) = self.window {
            cfg.thresholds.window = w;
        }
        if let Some(b) = self.bins {
            cfg.thresholds.histogram_bins = b;
        }
        if let Some(n) = self.top_n {
            cfg.thresholds.top_n = n;
        }
    }
}

fn load(args: &Args) -> CliResult<(Vec<Transcript>, Vec<String>)> {
    let is_manifest = args.input.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if !is_manifest {
        let t = io::load_transcript(&args.input, args.format, None, args.source)?;
        return Ok((vec![t], vec!["(none)".to_string()]));
    }
    let rows: Vec<io::ManifestRow> = io::read_csv(&args.input)?;
    let mut ts = Vec::with_capacity(rows.len());
    let mut channels = Vec::with_capacity(rows.len());
    for r in rows {
        let source = match r.source.as_deref() {
            None | Some("") => args.source,
            Some(s) => s.parse().map_err(|e| input_error(format!("{}: {e}", r.video_id)))?,
        };
        ts.push(io::load_transcript(&io::resolve(&args.input, &r.path), args.format, Some(&r.video_id), source)?);
        channels.push(r.channel.unwrap_or_else(|| "(none)".into()));
    }
    Ok((ts, channels))
}

#[derive(Serialize)]
struct HistRow {
    bin: String,
    lo: Option<f64>,
    hi: Option<f64>,
    count: usize,
}

pub fn run(args: &Args, cfg: &RunConfig, out: &mut impl Write) -> CliResult<()> {
    let lex = io::load_lexicon_file(super::need(&cfg.paths.lexicon, "--lexicon")?)?;
    let (transcripts, channels) = load(args)?;
    let per_video = detect_batch(&transcripts, &lex, Strategy::default());
    let all: Vec<FlaggedOccurrence> = per_video.iter().flatten().cloned().collect();
    log::info!("{} flags in {} transcripts", all.len(), transcripts.len());
    let t = &cfg.thresholds;
    match args.report {
        Report::Flags => io::write_jsonl(out, &all),
        Report::Snippets => {
            let mut snippets = Vec::with_capacity(all.len());
            for (tr, flags) in transcripts.iter().zip(&per_video) {
                for f in flags {
                    snippets.push(extract_snippet(tr, f, t.window).input()?);
                }
            }
            io::write_jsonl(out, &snippets)
        }
        Report::Freq => {
            let rows = frequency_report(&all, t.top_n).input()?;
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["word", "count"]).internal()?;
            for (word, count) in rows {
                w.write_record([word, count.to_string()]).internal()?;
            }
            w.flush().internal()
        }
        Report::Hist => {
            let h = confidence_histogram(&all, t.histogram_bins).input()?;
            let mut w = csv::Writer::from_writer(&mut *out);
            for (i, b) in h.bins.iter().enumerate() {
                w.serialize(HistRow { bin: i.to_string(), lo: Some(b.lo), hi: Some(b.hi), count: b.count })
                    .internal()?;
            }
            w.serialize(HistRow { bin: "unscored".into(), lo: None, hi: None, count: h.unscored }).internal()?;
            w.flush().internal()
        }
        Report::Channels => {
            let report = channel_report(channels.iter().map(String::as_str).zip(per_video.iter().map(Vec::as_slice)));
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["channel", "videos", "videos_flagged", "videos_high"]).internal()?;
            for (ch, tally) in report {
                w.write_record([
                    ch,
                    tally.videos.to_string(),
                    tally.videos_flagged.to_string(),
                    tally.videos_high.to_string(),
                ])
                .internal()?;
            }
            w.flush().internal()
        }
    }
}
