//! Independent reference implementations and fixture helpers shared by the
//! integration tests and the acceptance harness.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use taboo_core::cloze::{ClozeTask, NgramConfig, NgramModel, ScoreError, ScorerBackend};
use taboo_core::evaluation::BenchmarkItem;
use taboo_core::lexicon::{LexiconWord, Severity, TabooLexicon, WordlistSource};
use taboo_core::transcripts::Source;

/// `crates/core`, reachable from any sibling crate that includes this file.
fn core_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core")
}

pub fn fixture(rel: &str) -> PathBuf {
    core_dir().join("tests/fixtures").join(rel)
}

pub fn data(rel: &str) -> PathBuf {
    core_dir().join("data").join(rel)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn words(s: &str) -> Vec<String> {
    s.split_whitespace().map(String::from).collect()
}

/// Random word over `alphabet` with length in `len`.
pub fn random_word(rng: &mut ChaCha8Rng, alphabet: &[u8], len: std::ops::RangeInclusive<usize>) -> String {
    let n = rng.random_range(len);
    (0..n).map(|_| *alphabet.choose(rng).unwrap() as char).collect()
}

/// `n` words drawn from a pool.
pub fn random_text(rng: &mut ChaCha8Rng, pool: &[&str], n: usize) -> Vec<String> {
    (0..n).map(|_| pool.choose(rng).unwrap().to_string()).collect()
}

/// Mutual agreement by listing the union and counting each word directly.
pub fn naive_ma(a: &[String], b: &[String]) -> Option<f64> {
    let union: BTreeSet<&String> = a.iter().chain(b).collect();
    if union.is_empty() {
        return None;
    }
    let equal =
        union.iter().filter(|w| a.iter().filter(|x| x == *w).count() == b.iter().filter(|x| x == *w).count()).count();
    Some(equal as f64 / union.len() as f64)
}

/// Indices of tokens that equal some lexicon word, by nested loop.
pub fn naive_detect(tokens: &[String], lexicon: &[String]) -> Vec<usize> {
    let mut out = Vec::new();
    for (i, t) in tokens.iter().enumerate() {
        for w in lexicon {
            if t == w {
                out.push(i);
                break;
            }
        }
    }
    out
}

/// Lexicon surfaces by set algebra: union, minus frequent, minus excluded.
pub fn naive_lexicon(
    h1: &BTreeSet<String>,
    h2: &BTreeSet<String>,
    counts: &BTreeMap<String, u64>,
    threshold: u64,
    exclusions: &BTreeSet<String>,
) -> BTreeSet<String> {
    let merged: BTreeSet<String> = h1.union(h2).cloned().collect();
    let frequent: BTreeSet<String> = counts.iter().filter(|(_, c)| **c >= threshold).map(|(w, _)| w.clone()).collect();
    merged.difference(&frequent).cloned().collect::<BTreeSet<_>>().difference(exclusions).cloned().collect()
}

/// Full-matrix edit distance.
#[allow(clippy::needless_range_loop)]
pub fn naive_levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for i in 0..=a.len() {
        d[i][0] = i;
    }
    for j in 0..=b.len() {
        d[0][j] = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = (d[i - 1][j] + 1).min(d[i][j - 1] + 1).min(d[i - 1][j - 1] + cost);
        }
    }
    d[a.len()][b.len()]
}

/// Trigram model evaluated by rescanning the corpus for every count, with
/// weights 0.6/0.3/0.1, add-k 0.01 unigrams and one extra unknown-word type.
/// Levels whose history never occurs drop out and the remaining weights are
/// renormalized.
pub struct NaiveTrigram {
    pub docs: Vec<Vec<String>>,
}

impl NaiveTrigram {
    const W: [f64; 3] = [0.1, 0.3, 0.6];
    const K: f64 = 0.01;

    fn count(&self, seq: &[&str]) -> usize {
        self.docs.iter().map(|d| d.windows(seq.len()).filter(|w| w.iter().zip(seq).all(|(a, b)| a == b)).count()).sum()
    }

    fn count_followed(&self, h: &[&str]) -> usize {
        self.docs
            .iter()
            .map(|d| {
                (0..d.len().saturating_sub(h.len()))
                    .filter(|&i| d[i..i + h.len()].iter().zip(h).all(|(a, b)| a == b))
                    .count()
            })
            .sum()
    }

    fn types(&self) -> usize {
        self.docs.iter().flatten().collect::<BTreeSet<_>>().len() + 1
    }

    pub fn prob(&self, history: &[&str], w: &str) -> f64 {
        let total: usize = self.docs.iter().map(Vec::len).sum();
        let p1 = (self.count(&[w]) as f64 + Self::K) / (total as f64 + Self::K * self.types() as f64);
        let h: Vec<&str> = history[history.len().saturating_sub(2)..].to_vec();
        let mut terms = vec![(Self::W[0], p1)];
        if !h.is_empty() {
            let h1 = &h[h.len() - 1..];
            let c1 = self.count_followed(h1);
            if c1 > 0 {
                let mut g = h1.to_vec();
                g.push(w);
                terms.push((Self::W[1], self.count(&g) as f64 / c1 as f64));
            }
            if h.len() == 2 {
                let c2 = self.count_followed(&h);
                if c2 > 0 {
                    let mut g = h.clone();
                    g.push(w);
                    terms.push((Self::W[2], self.count(&g) as f64 / c2 as f64));
                }
            }
        }
        let wsum: f64 = terms.iter().map(|t| t.0).sum();
        terms.iter().map(|(wt, p)| wt / wsum * p).sum()
    }

    /// Sum of log-probabilities of positions `mask-2 ..= mask+2` of `seq`.
    pub fn window_score(&self, seq: &[String], mask: usize) -> f64 {
        let lo = mask.saturating_sub(2);
        let hi = (mask + 2).min(seq.len() - 1);
        (lo..=hi)
            .map(|p| {
                let h: Vec<&str> = seq[p.saturating_sub(2)..p].iter().map(String::as_str).collect();
                self.prob(&h, &seq[p]).ln()
            })
            .sum()
    }
}

/// Training corpus for the crap/crab example, one document per line.
pub fn worked_corpus() -> Vec<Vec<String>> {
    [
        "i love to eat crab and lobster for dinner",
        "i love to eat crab and lobster for dinner",
        "we eat crab and rice at the beach",
        "the crab walks on the beach",
        "this is a craft project for kids",
        "i love to eat pasta for dinner",
        "that show was crap",
    ]
    .iter()
    .map(|s| words(s))
    .collect()
}

pub const WORKED_SNIPPET: &str = "i love to eat crap and lobster for dinner";

/// Standard-severity H1 lexicon over `words`.
pub fn lexicon(words: &[&str]) -> TabooLexicon {
    TabooLexicon::from_words(
        words.iter().map(|w| LexiconWord {
            surface: w.to_string(),
            sources: [WordlistSource::H1].into(),
            severity: Severity::Standard,
        }),
        "test",
    )
    .unwrap()
}

/// Deterministic pseudo-random scores keyed by context and word.
pub struct Hashed {
    pub seed: u64,
    pub vocab: BTreeSet<String>,
}

impl ScorerBackend for Hashed {
    fn name(&self) -> &str {
        "hashed"
    }
    fn contains(&self, word: &str) -> Result<bool, ScoreError> {
        Ok(self.vocab.contains(word))
    }
    fn score(&self, task: &ClozeTask, c: &[String]) -> Result<Vec<f64>, ScoreError> {
        use std::hash::{Hash, Hasher};
        Ok(c.iter()
            .map(|w| {
                let mut h = std::collections::hash_map::DefaultHasher::new();
                (self.seed, &task.left, &task.right, w).hash(&mut h);
                (h.finish() % 1000) as f64
            })
            .collect())
    }
}

/// Near words for each planted taboo word, all within edit distance 2.
pub const PLANTED: &[(&str, &[&str])] = &[
    ("crap", &["crab", "trap", "clap", "cap", "wrap", "crop", "scrap", "strap", "cramp", "carp"]),
    ("shit", &["shut", "ship", "shot", "hit", "sit", "shirt", "spit", "suit", "sheet", "skit"]),
    ("hell", &["hello", "help", "held", "bell", "well", "shell", "hall", "hill", "heel", "yell"]),
    ("butt", &["but", "button", "putt", "bus", "bat", "butts", "bun", "mutt", "bull", "butter"]),
    ("damn", &["dam", "darn", "dawn", "damp", "dame", "dan", "ham", "jam", "dams", "dawns"]),
];

/// Fifty items, each with a private context that makes the ground truth
/// the only word the corpus ever saw between those neighbours.
pub fn planted() -> (Vec<BenchmarkItem>, NgramModel) {
    let mut rng = rng(42);
    let mut used = BTreeSet::new();
    let mut fresh = || loop {
        let w = random_word(&mut rng, b"qxzvjk", 6..=6);
        if used.insert(w.clone()) {
            return w;
        }
    };
    let mut docs = Vec::new();
    let mut items = Vec::new();
    for (h, truths) in PLANTED {
        docs.push(vec!["that".to_string(), "was".to_string(), h.to_string()]);
        for g in *truths {
            let ctx: Vec<String> = (0..4).map(|_| fresh()).collect();
            let doc = vec![ctx[0].clone(), ctx[1].clone(), g.to_string(), ctx[2].clone(), ctx[3].clone()];
            for _ in 0..3 {
                docs.push(doc.clone());
            }
            let mut tokens = doc;
            tokens[2] = h.to_string();
            items.push(BenchmarkItem {
                id: format!("p{:02}", items.len()),
                source: if items.len() % 2 == 0 { Source::Aws } else { Source::Youtube },
                tokens,
                flag_offset: 2,
                hallucinated: h.to_string(),
                ground_truth: g.to_string(),
            });
        }
    }
    (items, NgramModel::train(docs, NgramConfig::default()).unwrap())
}
