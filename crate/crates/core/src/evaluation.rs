//! Benchmark loading and P@K evaluation of the corrector.
//!
//! An item is a snippet with one hallucinated word and the word actually
//! spoken. The ground truth's rank in the corrector's ranking decides P@K;
//! an item whose candidate set never contains the ground truth is a miss at
//! every K and is also counted as a candidate miss. Backend failures are
//! recorded per item and excluded from the denominators.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::candidates::{CandidateError, CandidateIndex, CandidateMode};
use crate::cloze::{cloze_from_tokens, score, ScoreError, ScorerBackend};
use crate::lexicon::TabooLexicon;
use crate::par::Strategy;
use crate::transcripts::{normalize, Source, MASK};

pub const DEFAULT_KS: [usize; 3] = [1, 5, 10];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchmarkItem {
    pub id: String,
    pub source: Source,
    pub tokens: Vec<String>,
    pub flag_offset: usize,
    pub hallucinated: String,
    pub ground_truth: String,
}

impl BenchmarkItem {
    pub fn validate(&self) -> Result<(), String> {
        if self.id.is_empty() {
            return Err("empty id".into());
        }
        if self.source == Source::Other {
            return Err("source must be aws or youtube".into());
        }
        let Some(flagged) = self.tokens.get(self.flag_offset) else {
            return Err(format!("flag_offset {} outside {} tokens", self.flag_offset, self.tokens.len()));
        };
        if *flagged != self.hallucinated {
            return Err(format!(
                "tokens[{}] is {:?}, not the hallucinated word {:?}",
                self.flag_offset, flagged, self.hallucinated
            ));
        }
        for w in self.tokens.iter().chain([&self.ground_truth]) {
            if w == MASK {
                return Err("reserved mask symbol in item".into());
            }
            if w.is_empty() || normalize(w) != *w {
                return Err(format!("{w:?} is not a single normalized token"));
            }
        }
        if self.ground_truth == self.hallucinated {
            return Err("ground_truth equals hallucinated".into());
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("cannot read {path}: {source}", path = path.display())]
    Io { path: std::path::PathBuf, source: std::io::Error },
    #[error("benchmark line {line}: {message}")]
    Load { line: usize, message: String },
    #[error("k values must be positive")]
    InvalidK,
    #[error("no eligible benchmark items")]
    NoEligible,
    #[error("every item failed; first error: {0}")]
    AllFailed(String),
    #[error(transparent)]
    Candidates(#[from] CandidateError),
    #[error("vocabulary query failed: {0}")]
    Backend(#[from] ScoreError),
}

pub fn parse_benchmark(text: &str) -> Result<Vec<BenchmarkItem>, EvalError> {
    let mut items = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let de = &mut serde_json::Deserializer::from_str(line);
        let item: BenchmarkItem = serde_path_to_error::deserialize(de)
            .map_err(|e| EvalError::Load { line: line_no, message: format!("at {}: {}", e.path(), e.inner()) })?;
        item.validate().map_err(|message| EvalError::Load { line: line_no, message })?;
        if !seen.insert(item.id.clone()) {
            return Err(EvalError::Load { line: line_no, message: format!("duplicate id {:?}", item.id) });
        }
        items.push(item);
    }
    Ok(items)
}

pub fn load_benchmark(path: &Path) -> Result<Vec<BenchmarkItem>, EvalError> {
    let text = std::fs::read_to_string(path).map_err(|source| EvalError::Io { path: path.to_path_buf(), source })?;
    parse_benchmark(&text)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Exclusion {
    pub id: String,
    pub reason: String,
}

/// Splits items into those whose ground truth the backend can score and the
/// rest, preserving order.
pub fn eligibility_filter(
    items: &[BenchmarkItem],
    backend: &dyn ScorerBackend,
) -> Result<(Vec<BenchmarkItem>, Vec<Exclusion>), ScoreError> {
    let truths: Vec<String> = items.iter().map(|i| i.ground_truth.clone()).collect();
    let known = if truths.is_empty() { Vec::new() } else { backend.contains_many(&truths)? };
    let (mut eligible, mut excluded) = (Vec::new(), Vec::new());
    for (item, ok) in items.iter().zip(known) {
        if ok {
            eligible.push(item.clone());
        } else {
            excluded.push(Exclusion { id: item.id.clone(), reason: "oov_ground_truth".into() });
        }
    }
    Ok((eligible, excluded))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ItemOutcome {
    /// Ground truth was scored at this 1-based rank.
    Ranked {
        rank: usize,
    },
    /// Ground truth never entered the candidate set, or was not scoreable.
    CandidateMiss,
    Error {
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemResult {
    pub id: String,
    pub source: Source,
    pub hallucinated: String,
    pub ground_truth: String,
    #[serde(flatten)]
    pub outcome: ItemOutcome,
    pub c_star: Option<String>,
    pub n_candidates: usize,
    pub n_oov: usize,
}

impl ItemResult {
    pub fn rank(&self) -> Option<usize> {
        match self.outcome {
            ItemOutcome::Ranked { rank } => Some(rank),
            _ => None,
        }
    }

    pub fn is_error(&self) -> bool {
        matches!(self.outcome, ItemOutcome::Error { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub mode: CandidateMode,
    pub radius: usize,
    pub ks: Vec<usize>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            mode: CandidateMode::Levenshtein,
            radius: crate::candidates::DEFAULT_RADIUS,
            ks: DEFAULT_KS.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub backend: String,
    pub mode: CandidateMode,
    pub radius: usize,
    pub n_total: usize,
    pub n_eligible: usize,
    /// Eligible items that did not error; the denominator of every rate.
    pub n_scored: usize,
    pub n_errors: usize,
    pub p_at: BTreeMap<usize, f64>,
    pub candidate_miss: usize,
    pub candidate_miss_rate: f64,
    /// Fraction of scored items whose top word is a lexicon word.
    pub taboo_top1_rate: f64,
    /// Scored items where every candidate was out of vocabulary.
    pub no_decision: usize,
    pub excluded: Vec<Exclusion>,
    pub per_item: Vec<ItemResult>,
}

fn evaluate_item(
    item: &BenchmarkItem,
    backend: &dyn ScorerBackend,
    index: &CandidateIndex,
    config: &EvalConfig,
) -> Result<ItemResult, EvalError> {
    let candidates = index.candidates(&item.hallucinated, config.mode, config.radius)?;
    let mut result = ItemResult {
        id: item.id.clone(),
        source: item.source,
        hallucinated: item.hallucinated.clone(),
        ground_truth: item.ground_truth.clone(),
        outcome: ItemOutcome::CandidateMiss,
        c_star: None,
        n_candidates: candidates.len(),
        n_oov: 0,
    };
    let ranking = cloze_from_tokens(&item.tokens, item.flag_offset)
        .map_err(ScoreError::from)
        .and_then(|task| score(backend, &task, &candidates));
    match ranking {
        Ok(r) => {
            result.n_oov = r.oov.len();
            result.c_star = r.top().map(|c| c.word.clone());
            if let Some(rank) = r.rank_of(&item.ground_truth) {
                result.outcome = ItemOutcome::Ranked { rank };
            }
        }
        Err(e) => {
            result.outcome = ItemOutcome::Error { message: e.to_string() };
        }
    }
    Ok(result)
}

/// Filters `items` for eligibility, corrects each eligible item and reports
/// P@K over the ones that did not error.
pub fn evaluate(
    items: &[BenchmarkItem],
    backend: &dyn ScorerBackend,
    index: &CandidateIndex,
    lexicon: &TabooLexicon,
    config: &EvalConfig,
    strategy: Strategy,
) -> Result<EvalResult, EvalError> {
    let mut ks = config.ks.clone();
    if ks.is_empty() || ks.contains(&0) {
        return Err(EvalError::InvalidK);
    }
    ks.sort_unstable();
    ks.dedup();

    let (eligible, excluded) = eligibility_filter(items, backend)?;
    if eligible.is_empty() {
        return Err(EvalError::NoEligible);
    }
    let per_item = strategy
        .map(&eligible, |item| evaluate_item(item, backend, index, config))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;

    let n_errors = per_item.iter().filter(|r| r.is_error()).count();
    if n_errors == per_item.len() {
        let first = match &per_item[0].outcome {
            ItemOutcome::Error { message } => message.clone(),
            _ => unreachable!(),
        };
        return Err(EvalError::AllFailed(first));
    }
    let scored: Vec<&ItemResult> = per_item.iter().filter(|r| !r.is_error()).collect();
    let n = scored.len() as f64;
    let rate = |count: usize| count as f64 / n;
    let p_at =
        ks.iter().map(|&k| (k, rate(scored.iter().filter(|r| r.rank().is_some_and(|x| x <= k)).count()))).collect();
    let candidate_miss = scored.iter().filter(|r| r.outcome == ItemOutcome::CandidateMiss).count();
    let taboo = scored.iter().filter(|r| r.c_star.as_deref().is_some_and(|w| lexicon.contains(w))).count();
    let no_decision = scored.iter().filter(|r| r.c_star.is_none()).count();

    Ok(EvalResult {
        backend: backend.name().to_string(),
        mode: config.mode,
        radius: config.radius,
        n_total: items.len(),
        n_eligible: eligible.len(),
        n_scored: scored.len(),
        n_errors,
        p_at,
        candidate_miss,
        candidate_miss_rate: rate(candidate_miss),
        taboo_top1_rate: rate(taboo),
        no_decision,
        excluded,
        per_item,
    })
}
