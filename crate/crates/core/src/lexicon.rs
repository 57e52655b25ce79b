//! Taboo lexicon construction.
//!
//! The lexicon merges two source wordlists, then drops every word that occurs
//! at least `threshold` times in a corpus of subtitles rated safe for
//! children (such words evidently have harmless everyday uses) along with a
//! curated exclusion list of nationality and religion words. A shortlist of
//! unambiguous words is marked [`Severity::High`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::par::Strategy;
use crate::transcripts::Transcript;

/// Default minimum corpus frequency at which a word is considered safe.
pub const DEFAULT_THRESHOLD: u64 = 5;

/// Which source wordlist a lexicon word came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WordlistSource {
    /// General-purpose offensive-word list.
    H1,
    /// Words observed in children's own usage.
    H2,
}

impl fmt::Display for WordlistSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WordlistSource::H1 => "H1",
            WordlistSource::H2 => "H2",
        })
    }
}

impl FromStr for WordlistSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "H1" => Ok(WordlistSource::H1),
            "H2" => Ok(WordlistSource::H2),
            _ => Err(format!("unknown source {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Standard,
    #[serde(rename = "highly_inappropriate")]
    High,
}

impl Severity {
    /// Token used in the lexicon file.
    pub fn file_token(self) -> &'static str {
        match self {
            Severity::Standard => "standard",
            Severity::High => "high",
        }
    }
}

impl FromStr for Severity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(Severity::Standard),
            "high" => Ok(Severity::High),
            _ => Err(format!("severity {s:?} is not one of standard|high")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexiconWord {
    pub surface: String,
    pub sources: BTreeSet<WordlistSource>,
    pub severity: Severity,
}

impl LexiconWord {
    fn check(&self) -> Result<(), String> {
        if !valid_surface(&self.surface) {
            return Err(format!("invalid surface {:?}", self.surface));
        }
        if self.sources.is_empty() {
            return Err(format!("{:?} has no source", self.surface));
        }
        Ok(())
    }
}

fn valid_surface(s: &str) -> bool {
    !s.is_empty() && !s.starts_with('#') && !s.chars().any(char::is_whitespace) && s.to_lowercase() == s
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TabooLexicon {
    entries: BTreeMap<String, LexiconWord>,
    /// Free-text build metadata: threshold, corpus and exclusion-list ids.
    pub provenance: String,
}

impl TabooLexicon {
    pub fn from_words(
        words: impl IntoIterator<Item = LexiconWord>,
        provenance: impl Into<String>,
    ) -> Result<Self, LexiconError> {
        let mut entries = BTreeMap::new();
        for w in words {
            w.check().map_err(LexiconError::Invalid)?;
            if entries.contains_key(&w.surface) {
                return Err(LexiconError::Invalid(format!("duplicate surface {:?}", w.surface)));
            }
            entries.insert(w.surface.clone(), w);
        }
        Ok(TabooLexicon { entries, provenance: provenance.into() })
    }

    pub fn get(&self, word: &str) -> Option<&LexiconWord> {
        self.entries.get(word)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(word)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in lexicographic order of surface.
    pub fn iter(&self) -> impl Iterator<Item = &LexiconWord> {
        self.entries.values()
    }

    pub fn surfaces(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn highly_inappropriate(&self) -> impl Iterator<Item = &LexiconWord> {
        self.iter().filter(|w| w.severity == Severity::High)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusDocument {
    pub title: String,
    pub year: i32,
    pub rating: String,
    pub tokens: Vec<String>,
}

/// Subtitles of films rated for general audiences.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubtitleCorpus {
    pub documents: Vec<CorpusDocument>,
}

impl SubtitleCorpus {
    /// Adds a parsed subtitle file; timing is discarded.
    pub fn push_transcript(&mut self, title: impl Into<String>, year: i32, rating: impl Into<String>, t: &Transcript) {
        self.documents.push(CorpusDocument {
            title: title.into(),
            year,
            rating: rating.into(),
            tokens: t.texts().map(str::to_string).collect(),
        });
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FrequencyTable {
    pub counts: HashMap<String, u64>,
}

impl FrequencyTable {
    pub fn get(&self, word: &str) -> u64 {
        self.counts.get(word).copied().unwrap_or(0)
    }

    pub fn merge(mut self, other: FrequencyTable) -> FrequencyTable {
        let (mut big, small) = if self.counts.len() >= other.counts.len() {
            (std::mem::take(&mut self.counts), other.counts)
        } else {
            (other.counts, std::mem::take(&mut self.counts))
        };
        for (w, c) in small {
            *big.entry(w).or_insert(0) += c;
        }
        FrequencyTable { counts: big }
    }

    /// Highest-count words among `among`, descending, ties lexicographic.
    pub fn top<'a>(&self, among: impl IntoIterator<Item = &'a str>, n: usize) -> Vec<(String, u64)> {
        let mut rows: Vec<(String, u64)> =
            among.into_iter().filter_map(|w| self.counts.get(w).map(|c| (w.to_string(), *c))).collect();
        rows.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        rows.dedup();
        rows.truncate(n);
        rows
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: no valid entries", path.display())]
    EmptyWordlist { path: PathBuf },
    #[error("corpus has no documents")]
    EmptyCorpus,
    #[error("threshold must be at least 1, got {0}")]
    InvalidThreshold(u64),
    #[error("highly-inappropriate word {0:?} is not in the merged wordlists")]
    Inconsistent(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

fn read(path: &Path) -> Result<String, LexiconError> {
    fs::read_to_string(path).map_err(|source| LexiconError::Io { path: path.to_path_buf(), source })
}

/// Reads a one-word-per-line list. Blank lines and `#` comments are skipped,
/// words are trimmed and lowercased, and multi-word entries are dropped.
pub fn load_wordlist(path: &Path, source: WordlistSource) -> Result<BTreeSet<String>, LexiconError> {
    let words = parse_wordlist(&read(path)?, source);
    if words.is_empty() {
        return Err(LexiconError::EmptyWordlist { path: path.to_path_buf() });
    }
    Ok(words)
}

pub fn parse_wordlist(text: &str, source: WordlistSource) -> BTreeSet<String> {
    let mut words = BTreeSet::new();
    for (n, line) in text.lines().enumerate() {
        let entry = line.trim();
        if entry.is_empty() || entry.starts_with('#') {
            continue;
        }
        if entry.chars().any(char::is_whitespace) {
            log::warn!("{source} wordlist line {}: dropping multi-word entry {entry:?}", n + 1);
            continue;
        }
        words.insert(entry.to_lowercase());
    }
    words
}

/// Total occurrences of each word over all documents.
pub fn corpus_frequency(corpus: &SubtitleCorpus) -> Result<FrequencyTable, LexiconError> {
    corpus_frequency_with(corpus, Strategy::default())
}

pub fn corpus_frequency_with(corpus: &SubtitleCorpus, strategy: Strategy) -> Result<FrequencyTable, LexiconError> {
    if corpus.documents.is_empty() {
        return Err(LexiconError::EmptyCorpus);
    }
    Ok(strategy.fold(
        &corpus.documents,
        FrequencyTable::default,
        |mut table, doc| {
            for tok in &doc.tokens {
                *table.counts.entry(tok.clone()).or_insert(0) += 1;
            }
            table
        },
        FrequencyTable::merge,
    ))
}

/// Merges the source lists and removes corpus-frequent and excluded words.
///
/// Result: `(h1 ∪ h2) \ {w : freq[w] >= threshold} \ exclusions`, each entry
/// tagged with the lists containing it. Words in `highly_inappropriate` that
/// survive the filter get [`Severity::High`].
pub fn build_lexicon(
    h1: &BTreeSet<String>,
    h2: &BTreeSet<String>,
    freq: &FrequencyTable,
    threshold: u64,
    exclusions: &BTreeSet<String>,
    highly_inappropriate: &BTreeSet<String>,
) -> Result<TabooLexicon, LexiconError> {
    if threshold < 1 {
        return Err(LexiconError::InvalidThreshold(threshold));
    }
    if let Some(w) = highly_inappropriate.iter().find(|w| !h1.contains(*w) && !h2.contains(*w)) {
        return Err(LexiconError::Inconsistent(w.clone()));
    }
    let mut words = Vec::new();
    for surface in h1.union(h2) {
        if freq.get(surface) >= threshold || exclusions.contains(surface) || !valid_surface(surface) {
            continue;
        }
        let mut sources = BTreeSet::new();
        if h1.contains(surface) {
            sources.insert(WordlistSource::H1);
        }
        if h2.contains(surface) {
            sources.insert(WordlistSource::H2);
        }
        let severity = if highly_inappropriate.contains(surface) { Severity::High } else { Severity::Standard };
        words.push(LexiconWord { surface: surface.clone(), sources, severity });
    }
    TabooLexicon::from_words(words, format!("threshold={threshold}"))
}

/// Renders the tab-separated lexicon file. Provenance lines are written as
/// `#@ ` comments so plain readers skip them.
pub fn format_lexicon(lexicon: &TabooLexicon) -> String {
    let mut out = String::from("# surface\tsources\tseverity\n");
    for line in lexicon.provenance.split('\n') {
        out.push_str("#@ ");
        out.push_str(line);
        out.push('\n');
    }
    for w in lexicon.iter() {
        let sources: Vec<String> = w.sources.iter().map(|s| s.to_string()).collect();
        out.push_str(&format!("{}\t{}\t{}\n", w.surface, sources.join(","), w.severity.file_token()));
    }
    out
}

pub fn parse_lexicon(text: &str) -> Result<TabooLexicon, LexiconError> {
    let mut provenance: Vec<&str> = Vec::new();
    let mut entries = BTreeMap::new();
    for (i, line) in text.split('\n').enumerate() {
        let line_no = i + 1;
        let err = |message: String| LexiconError::Parse { line: line_no, message };
        if let Some(p) = line.strip_prefix("#@") {
            provenance.push(p.strip_prefix(' ').unwrap_or(p));
            continue;
        }
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [surface, sources, severity] = fields[..] else {
            return Err(err(format!("expected 3 tab-separated fields, found {}", fields.len())));
        };
        let sources =
            sources.split(',').map(str::parse).collect::<Result<BTreeSet<WordlistSource>, _>>().map_err(err)?;
        let word = LexiconWord { surface: surface.to_string(), sources, severity: severity.parse().map_err(err)? };
        word.check().map_err(err)?;
        if entries.contains_key(surface) {
            return Err(err(format!("duplicate surface {surface:?}")));
        }
        entries.insert(surface.to_string(), word);
    }
    Ok(TabooLexicon { entries, provenance: provenance.join("\n") })
}

pub fn save_lexicon(lexicon: &TabooLexicon, path: &Path) -> Result<(), LexiconError> {
    fs::write(path, format_lexicon(lexicon)).map_err(|source| LexiconError::Io { path: path.to_path_buf(), source })
}

pub fn load_lexicon(path: &Path) -> Result<TabooLexicon, LexiconError> {
    parse_lexicon(&read(path)?)
}

/// Word lists shipped in `data/`.
pub mod bundled {
    pub const H2_CHILDREN: &str = include_str!("../data/h2_children.txt");
    pub const HIGHLY_INAPPROPRIATE: &str = include_str!("../data/highly_inappropriate.txt");
    pub const EXCLUSIONS: &str = include_str!("../data/exclusions.txt");
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{any, prop_assert_eq, proptest};
    use proptest::strategy::Strategy as _;

    fn set(words: &[&str]) -> BTreeSet<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    fn table(pairs: &[(&str, u64)]) -> FrequencyTable {
        FrequencyTable { counts: pairs.iter().map(|(w, c)| (w.to_string(), *c)).collect() }
    }

    #[test]
    fn wordlist_dedups_and_folds_case() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("w.txt");
        fs::write(&p, "Crap\n\n# comment\ncrap\nkiller whale\n").unwrap();
        assert_eq!(load_wordlist(&p, WordlistSource::H2).unwrap(), set(&["crap"]));

        fs::write(&p, "# only\n# comments\n").unwrap();
        assert!(matches!(load_wordlist(&p, WordlistSource::H1), Err(LexiconError::EmptyWordlist { .. })));
        assert!(matches!(load_wordlist(&dir.path().join("missing"), WordlistSource::H1), Err(LexiconError::Io { .. })));
    }

    #[test]
    fn corpus_counts() {
        let doc = |toks: &[&str]| CorpusDocument {
            title: "t".into(),
            year: 2001,
            rating: "G".into(),
            tokens: toks.iter().map(|s| s.to_string()).collect(),
        };
        for &s in Strategy::available() {
            let corpus = SubtitleCorpus { documents: vec![doc(&["a", "b", "a"]), doc(&["b"])] };
            let f = corpus_frequency_with(&corpus, s).unwrap();
            assert_eq!(f, table(&[("a", 2), ("b", 2)]));
            assert_eq!(f.get("fuck"), 0);
            assert!(!f.counts.contains_key("fuck"));

            let empty_doc = SubtitleCorpus { documents: vec![doc(&[])] };
            assert!(corpus_frequency_with(&empty_doc, s).unwrap().counts.is_empty());
            assert!(matches!(corpus_frequency_with(&SubtitleCorpus::default(), s), Err(LexiconError::EmptyCorpus)));
        }
    }

    #[test]
    fn frequent_words_are_dropped() {
        let h1 = set(&["rape", "killer", "italian"]);
        let h2 = set(&["dog", "crap", "killer"]);
        let freq = table(&[("dog", 40), ("killer", 4)]);
        let lex = build_lexicon(&h1, &h2, &freq, 5, &set(&["italian"]), &set(&["rape", "crap"])).unwrap();
        assert!(!lex.contains("dog"));
        assert!(!lex.contains("italian"));
        assert!(lex.contains("rape"));
        assert_eq!(lex.get("rape").unwrap().severity, Severity::High);
        let killer = lex.get("killer").unwrap();
        assert_eq!(killer.sources, [WordlistSource::H1, WordlistSource::H2].into_iter().collect());
        assert_eq!(killer.severity, Severity::Standard);
        assert_eq!(lex.len(), 3);
    }

    #[test]
    fn build_errors() {
        let h = set(&["crap"]);
        let f = FrequencyTable::default();
        assert!(matches!(
            build_lexicon(&h, &h, &f, 0, &BTreeSet::new(), &BTreeSet::new()),
            Err(LexiconError::InvalidThreshold(0))
        ));
        assert!(matches!(
            build_lexicon(&h, &h, &f, 5, &BTreeSet::new(), &set(&["shit"])),
            Err(LexiconError::Inconsistent(w)) if w == "shit"
        ));
    }

    #[test]
    fn file_errors_carry_line_numbers() {
        let dup = "# header\ncrap\tH1\tstandard\ncrap\tH2\thigh\n";
        assert!(matches!(parse_lexicon(dup), Err(LexiconError::Parse { line: 3, .. })));
        let sev = "crap\tH1\tsevere\n";
        assert!(matches!(parse_lexicon(sev), Err(LexiconError::Parse { line: 1, .. })));
        let src = "crap\tH3\tstandard\n";
        assert!(matches!(parse_lexicon(src), Err(LexiconError::Parse { line: 1, .. })));
        let fields = "\ncrap standard\n";
        assert!(matches!(parse_lexicon(fields), Err(LexiconError::Parse { line: 2, .. })));
        let upper = "Crap\tH1\tstandard\n";
        assert!(matches!(parse_lexicon(upper), Err(LexiconError::Parse { line: 1, .. })));
    }

    #[test]
    fn three_entry_round_trip() {
        let lex = TabooLexicon::from_words(
            [
                ("crap", vec![WordlistSource::H1, WordlistSource::H2], Severity::High),
                ("ho", vec![WordlistSource::H1], Severity::Standard),
                ("butthead", vec![WordlistSource::H2], Severity::Standard),
            ]
            .map(|(s, src, sev)| LexiconWord {
                surface: s.into(),
                sources: src.into_iter().collect(),
                severity: sev,
            }),
            "threshold=5\ncorpus=fixture",
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("lex.tsv");
        save_lexicon(&lex, &p).unwrap();
        assert_eq!(load_lexicon(&p).unwrap(), lex);
    }

    fn arb_lexicon() -> impl proptest::strategy::Strategy<Value = TabooLexicon> {
        let word = ("[a-z][a-z0-9'\\-]{0,8}", 1u8..4, any::<bool>());
        (proptest::collection::vec(word, 0..20), "[ -~]{0,30}(\n[ -~]{0,10})?").prop_map(|(words, provenance)| {
            let mut seen = BTreeSet::new();
            let words = words.into_iter().filter(|(s, _, _)| seen.insert(s.clone())).map(|(s, src, high)| {
                let mut sources = BTreeSet::new();
                if src & 1 != 0 {
                    sources.insert(WordlistSource::H1);
                }
                if src & 2 != 0 {
                    sources.insert(WordlistSource::H2);
                }
                LexiconWord { surface: s, sources, severity: if high { Severity::High } else { Severity::Standard } }
            });
            TabooLexicon::from_words(words, provenance).unwrap()
        })
    }

    proptest! {
        #[test]
        fn round_trip_is_identity(lex in arb_lexicon()) {
            prop_assert_eq!(parse_lexicon(&format_lexicon(&lex)).unwrap(), lex);
        }
    }

    #[test]
    fn bundled_lists_parse() {
        assert_eq!(parse_wordlist(bundled::H2_CHILDREN, WordlistSource::H2).len(), 76);
        assert_eq!(parse_wordlist(bundled::HIGHLY_INAPPROPRIATE, WordlistSource::H1).len(), 16);
        assert!(parse_wordlist(bundled::EXCLUSIONS, WordlistSource::H1).contains("italian"));
    }
}
