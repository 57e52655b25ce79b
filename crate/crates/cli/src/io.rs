//! File loaders shared by the subcommands. Every failure here is an input
//! error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};
use taboo_core::candidates::Vocabulary;
use taboo_core::lexicon::{load_lexicon, SubtitleCorpus, TabooLexicon};
use taboo_core::transcripts::{normalize, parse_transcript, Format, Source, Transcript};

use crate::error::{Classify, CliResult};

pub fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

pub fn format_for(path: &Path, explicit: Option<Format>) -> anyhow::Result<Format> {
    explicit
        .or_else(|| Format::from_extension(path))
        .ok_or_else(|| anyhow!("cannot tell the format of {}; pass --format", path.display()))
}

pub fn load_transcript(
    path: &Path,
    format: Option<Format>,
    video_id: Option<&str>,
    source: Source,
) -> CliResult<Transcript> {
    let run = || -> anyhow::Result<Transcript> {
        let format = format_for(path, format)?;
        let bytes = fs::read(path)?;
        let id = video_id.map(String::from).unwrap_or_else(|| stem(path));
        Ok(parse_transcript(&bytes, format, &id, source)?)
    };
    run().with_context(|| format!("transcript {}", path.display())).input()
}

pub fn load_lexicon_file(path: &Path) -> CliResult<TabooLexicon> {
    load_lexicon(path).input()
}

/// One word per line; `#` starts a comment line; words are normalized.
pub fn load_vocab(path: &Path) -> CliResult<Vocabulary> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read vocabulary {}", path.display())).input()?;
    Ok(Vocabulary::new(text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')).map(normalize)))
}

/// Corpus from a file or a directory of files. `.srt` and `.vtt` files
/// are one document each; other files hold one document per line.
pub fn load_corpus(path: &Path) -> CliResult<SubtitleCorpus> {
    let run = || -> anyhow::Result<SubtitleCorpus> {
        let files: Vec<PathBuf> = if path.is_dir() {
            let mut v: Vec<PathBuf> = fs::read_dir(path)?.map(|e| e.map(|e| e.path())).collect::<Result<_, _>>()?;
            v.retain(|p| p.is_file());
            v.sort();
            v
        } else {
            vec![path.to_path_buf()]
        };
        let mut corpus = SubtitleCorpus::default();
        for f in &files {
            match Format::from_extension(f) {
                Some(fmt @ (Format::Srt | Format::Vtt)) => {
                    let t = parse_transcript(&fs::read(f)?, fmt, &stem(f), Source::Other)
                        .with_context(|| format!("corpus file {}", f.display()))?;
                    corpus.push_transcript(stem(f), 0, "G", &t);
                }
                _ => {
                    let text = fs::read_to_string(f).with_context(|| format!("corpus file {}", f.display()))?;
                    for (i, line) in text.lines().enumerate() {
                        let words: Vec<&str> = line.split_whitespace().collect();
                        let t = Transcript::from_words(format!("{}:{}", stem(f), i + 1), Source::Other, &words);
                        if !t.is_empty() {
                            corpus.push_transcript(t.video_id.clone(), 0, "G", &t);
                        }
                    }
                }
            }
        }
        if corpus.documents.is_empty() {
            bail!("no documents found");
        }
        Ok(corpus)
    };
    run().with_context(|| format!("corpus {}", path.display())).input()
}

/// Row of a detection manifest.
#[derive(Debug, Clone, Deserialize)]
pub struct ManifestRow {
    pub video_id: String,
    pub path: PathBuf,
    #[serde(default)]
    pub channel: Option<String>,
    #[serde(default)]
    pub source: Option<String>,
}

/// Row of an agreement manifest.
#[derive(Debug, Clone, Deserialize)]
pub struct PairRow {
    pub video_id: String,
    pub path_a: PathBuf,
    pub path_b: PathBuf,
}

/// Reads a headed CSV. Relative paths in rows are taken relative to the
/// manifest's directory by [`resolve`].
pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<Vec<T>> {
    let run = || -> anyhow::Result<Vec<T>> {
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
        let mut rows = Vec::new();
        for (i, rec) in r.deserialize().enumerate() {
            rows.push(rec.with_context(|| format!("row {}", i + 1))?);
        }
        Ok(rows)
    };
    run().with_context(|| format!("manifest {}", path.display())).input()
}

pub fn resolve(manifest: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        manifest.parent().unwrap_or(Path::new(".")).join(p)
    }
}

/// Parses each non-blank line as JSON.
pub fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<Vec<T>> {
    let run = || -> anyhow::Result<Vec<T>> {
        let text = fs::read_to_string(path)?;
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| serde_json::from_str(l).with_context(|| format!("line {}", i + 1)))
            .collect()
    };
    run().with_context(|| format!("{}", path.display())).input()
}

pub fn write_jsonl<T: Serialize>(out: &mut impl Write, rows: impl IntoIterator<Item = T>) -> CliResult<()> {
    for r in rows {
        serde_json::to_writer(&mut *out, &r).internal()?;
        out.write_all(b"\n").internal()?;
    }
    Ok(())
}

pub fn write_json<T: Serialize>(out: &mut impl Write, value: &T) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, value).internal()?;
    out.write_all(b"\n").internal()
}
