//! Detection and correction of taboo-words hallucinated by speech recognizers
//! in children's video transcripts.
//!
//! The pipeline runs in stages:
//!
//! 1. [`lexicon`] builds the taboo lexicon from source wordlists, dropping
//!    words that occur often in a kid-safe subtitle corpus.
//! 2. [`transcripts`] parses SRT, WebVTT and ASR JSON into normalized tokens.
//! 3. [`agreement`] measures how well two transcripts of one video agree.
//! 4. [`detection`] flags lexicon words and cuts context snippets.
//! 5. [`candidates`] proposes lexically or phonetically similar replacements.
//! 6. [`cloze`] masks the flagged word and ranks candidates with a scorer.
//! 7. [`evaluation`] reports P@K over a ground-truthed benchmark.
//!
//! Batch entry points take a [`par::Strategy`]; with the `parallel` feature
//! (on by default) they fan out over rayon, otherwise they run sequentially.

pub mod agreement;
pub mod candidates;
pub mod cloze;
pub mod detection;
pub mod evaluation;
pub mod lexicon;
pub mod par;
pub mod transcripts;

pub use agreement::{mutual_agreement, window_agreement, AgreementReport};
pub use candidates::{generate_candidates, levenshtein, phonetic_key, CandidateMode, CandidateSet};
pub use cloze::{correct, make_cloze, ClozeTask, Correction, ScoredCandidate, ScorerBackend};
pub use detection::{detect, extract_snippet, FlaggedOccurrence, Snippet};
pub use evaluation::{evaluate, BenchmarkItem, EvalResult};
pub use lexicon::{build_lexicon, LexiconWord, Severity, TabooLexicon};
pub use par::Strategy;
pub use transcripts::{normalize, Source, Token, Transcript};
