mod common;

use proptest::prelude::*;
use rand::Rng;
use taboo_core::candidates::{generate_candidates, CandidateMode, Vocabulary};
use taboo_core::cloze::{
    cloze_from_tokens, correct, score_words, ClozeTask, NgramConfig, NgramModel, ScoreError, ScorerBackend, UNK,
};
use taboo_core::detection::{detect, extract_snippet};
use taboo_core::lexicon::{LexiconWord, Severity, TabooLexicon, WordlistSource};
use taboo_core::transcripts::{Source, Transcript};

fn worked_model() -> NgramModel {
    NgramModel::train(common::worked_corpus(), NgramConfig::default()).unwrap()
}

fn strings(ws: &[&str]) -> Vec<String> {
    ws.iter().map(|s| s.to_string()).collect()
}

#[test]
fn probabilities_sum_to_one() {
    let mut rng = common::rng(31);
    let pool: Vec<String> = (0..20).map(|i| format!("w{i}")).collect();
    let pool_refs: Vec<&str> = pool.iter().map(String::as_str).collect();
    let docs: Vec<Vec<String>> = (0..40).map(|_| common::random_text(&mut rng, &pool_refs, 15)).collect();
    for order in 1..=3 {
        let m = NgramModel::train(docs.clone(), NgramConfig::with_order(order).unwrap()).unwrap();
        for _ in 0..30 {
            let n = rng.random_range(0..3);
            let mut history = common::random_text(&mut rng, &pool_refs, n);
            if rng.random_bool(0.2) {
                history.push("never-seen".into());
            }
            let h: Vec<&str> = history.iter().map(String::as_str).collect();
            let total: f64 = m.vocabulary().iter().map(|w| m.prob(&h, w)).sum();
            assert!((total - 1.0).abs() <= 1e-9, "order {order}, history {h:?}: {total}");
        }
    }
}

#[test]
fn matches_naive_trigram_on_random_corpora() {
    let mut rng = common::rng(32);
    let pool = ["a", "b", "c", "d", "e", "crab", "crap"];
    for _ in 0..20 {
        let docs: Vec<Vec<String>> = (0..6).map(|_| common::random_text(&mut rng, &pool, 8)).collect();
        let m = NgramModel::train(docs.clone(), NgramConfig::default()).unwrap();
        let oracle = common::NaiveTrigram { docs };
        for _ in 0..20 {
            let mut seq = common::random_text(&mut rng, &pool, 7);
            seq[rng.random_range(0..7)] = "zzz".into();
            let mask = rng.random_range(0..7);
            let got = m.window_logprob(&seq, mask);
            let want = oracle.window_score(&seq, mask);
            assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "{seq:?} @{mask}: {got} vs {want}");
        }
    }
}

#[test]
fn worked_example_prefers_crab() {
    let m = worked_model();
    let tokens = common::words(common::WORKED_SNIPPET);
    let task = cloze_from_tokens(&tokens, 4).unwrap();
    assert_eq!(task.display(), "i love to eat [MASK] and lobster for dinner");

    let candidates = strings(&["crab", "craft", "crap"]);
    let scores = m.score(&task, &candidates).unwrap();
    let oracle = common::NaiveTrigram { docs: common::worked_corpus() };
    for (w, s) in candidates.iter().zip(&scores) {
        let want = oracle.window_score(&task.splice(w), 4);
        assert!((s - want).abs() <= 1e-12, "{w}: {s} vs {want}");
    }
    // frozen from the rescanning oracle above
    let frozen = [-1.341_919_571_236_230_2, -11.280_829_026_386_359, -9.894_534_665_266_468];
    for (s, f) in scores.iter().zip(frozen) {
        assert!((s - f).abs() <= 1e-9, "{s} vs {f}");
    }

    let ranking = score_words(&m, &task, &candidates).unwrap();
    let order: Vec<&str> = ranking.ranked.iter().map(|c| c.word.as_str()).collect();
    assert_eq!(order, ["crab", "crap", "craft"]);
}

#[test]
fn end_to_end_correction() {
    let m = worked_model();
    let lex = TabooLexicon::from_words(
        [LexiconWord { surface: "crap".into(), sources: [WordlistSource::H1].into(), severity: Severity::High }],
        "test",
    )
    .unwrap();
    let t = Transcript::from_words("kids-001", Source::Aws, &common::words(common::WORKED_SNIPPET));
    let flags = detect(&t, &lex);
    assert_eq!(flags.len(), 1);
    let snippet = extract_snippet(&t, &flags[0], 25).unwrap();
    let vocab = Vocabulary::new(m.vocabulary().iter().filter(|w| *w != UNK).cloned());
    let set = generate_candidates("crap", &vocab, CandidateMode::Levenshtein, 2).unwrap();
    assert_eq!(set.words, ["crap", "crab", "craft"]);
    let c = correct(&m, &snippet, &set).unwrap();
    assert_eq!(c.c_star.as_deref(), Some("crab"));
    assert!(c.ranking.oov.is_empty());
}

#[test]
fn training_is_deterministic_and_order_free() {
    let a = worked_model();
    let b = worked_model();
    let mut docs = common::worked_corpus();
    docs.reverse();
    let c = NgramModel::train(docs, NgramConfig::default()).unwrap();
    let task = cloze_from_tokens(&common::words(common::WORKED_SNIPPET), 4).unwrap();
    let cands = strings(&["crab", "craft", "crap", "rice"]);
    let sa = a.score(&task, &cands).unwrap();
    assert_eq!(sa, b.score(&task, &cands).unwrap());
    for (x, y) in sa.iter().zip(c.score(&task, &cands).unwrap()) {
        assert!((x - y).abs() <= 1e-12);
    }
    let mut shuffled = cands.clone();
    shuffled.rotate_left(2);
    assert_eq!(score_words(&a, &task, &cands).unwrap(), score_words(&a, &task, &shuffled).unwrap());
}

#[test]
fn unigram_model_ignores_context() {
    let m = NgramModel::train(common::worked_corpus(), NgramConfig::with_order(1).unwrap()).unwrap();
    assert_eq!(m.prob(&["eat"], "crab"), m.prob(&[], "crab"));
    // crab 4, vocabulary 27 types plus the unknown entry, 50 tokens
    let p = m.prob(&[], "crab");
    assert!((p - 4.01 / (50.0 + 0.01 * 28.0)).abs() <= 1e-15, "{p}");
}

/// Wraps a backend and applies `a * s + b` to its scores.
struct Affine<'a> {
    inner: &'a NgramModel,
    a: f64,
    b: f64,
}

impl ScorerBackend for Affine<'_> {
    fn name(&self) -> &str {
        "affine"
    }
    fn contains(&self, word: &str) -> Result<bool, ScoreError> {
        self.inner.contains(word)
    }
    fn score(&self, task: &ClozeTask, c: &[String]) -> Result<Vec<f64>, ScoreError> {
        Ok(self.inner.score(task, c)?.into_iter().map(|s| self.a * s + self.b).collect())
    }
}

proptest! {
    #[test]
    fn ranking_invariant_under_positive_affine_maps(a in 0.01f64..100.0, b in -1e3f64..1e3, mask in 0usize..9) {
        let m = worked_model();
        let tokens = common::words(common::WORKED_SNIPPET);
        let task = cloze_from_tokens(&tokens, mask).unwrap();
        let cands = strings(&["crab", "craft", "crap", "rice", "beach", "kids"]);
        let base = score_words(&m, &task, &cands).unwrap();
        let mapped = score_words(&Affine { inner: &m, a, b }, &task, &cands).unwrap();
        let words = |r: &taboo_core::cloze::Ranking| r.ranked.iter().map(|c| (c.word.clone(), c.rank)).collect::<Vec<_>>();
        prop_assert_eq!(words(&base), words(&mapped));
    }
}
