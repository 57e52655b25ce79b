//! Run configuration: a TOML file, overridden by command-line flags.
//!
//! Every key is optional and unknown keys are rejected. `--save-config`
//! writes the effective configuration after overrides, so a run can be
//! repeated exactly with `--config`.

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context};
use serde::{Deserialize, Serialize};
use taboo_core::agreement::{DEFAULT_AGREEMENT_THRESHOLD, DEFAULT_WINDOW};
use taboo_core::candidates::{CandidateMode, DEFAULT_RADIUS};
use taboo_core::cloze::NgramConfig;
use taboo_core::evaluation::DEFAULT_KS;
use taboo_core::lexicon::DEFAULT_THRESHOLD;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub paths: Paths,
    pub thresholds: Thresholds,
    pub backend: BackendConfig,
    pub eval: EvalSection,
    pub review: ReviewSection,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Paths {
    pub lexicon: Option<PathBuf>,
    /// Training text for the n-gram backend, or the subtitle corpus for
    /// the frequency filter.
    pub corpus: Option<PathBuf>,
    /// Candidate vocabulary.
    pub vocab: Option<PathBuf>,
    pub bench: Option<PathBuf>,
    pub preset: Option<PathBuf>,
    pub journal: Option<PathBuf>,
    pub h1: Option<PathBuf>,
    pub h2: Option<PathBuf>,
    pub highly: Option<PathBuf>,
    pub exclusions: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    /// Corpus count at which a word leaves the lexicon; >= 1.
    pub frequency: u64,
    /// Minimum windowed agreement for a benchmark row; in [0, 1].
    pub agreement: f64,
    /// Snippet and agreement half-width in tokens; 1..=1000.
    pub window: usize,
    /// Levenshtein radius; 1..=10.
    pub radius: usize,
    /// N-gram order; 1..=5, and at most 3 without explicit weights.
    pub order: usize,
    /// Interpolation weights, unigram first; defaults follow `order`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    /// Add-k unigram smoothing; > 0.
    pub smoothing_k: f64,
    /// Confidence histogram bins; 1..=1000.
    pub histogram_bins: usize,
    /// Rows in frequency reports; >= 1.
    pub top_n: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            frequency: DEFAULT_THRESHOLD,
            agreement: DEFAULT_AGREEMENT_THRESHOLD,
            window: DEFAULT_WINDOW,
            radius: DEFAULT_RADIUS,
            order: 3,
            weights: None,
            smoothing_k: NgramConfig::default().k,
            histogram_bins: 10,
            top_n: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum BackendKind {
    #[default]
    Ngram,
    Http,
    /// Fixed scores from a JSON file.
    Preset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BackendConfig {
    pub kind: BackendKind,
    pub endpoint: Option<String>,
    /// 1..=600000.
    pub timeout_ms: u64,
    /// 0..=10.
    pub retries: u32,
    /// 1..=256.
    pub max_in_flight: usize,
}

impl Default for BackendConfig {
    fn default() -> Self {
        let http = taboo_core::cloze::HttpScorerConfig::new("");
        BackendConfig {
            kind: BackendKind::Ngram,
            endpoint: None,
            timeout_ms: http.timeout_ms,
            retries: http.retries,
            max_in_flight: http.max_in_flight,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalSection {
    /// Each in 1..=1000.
    pub ks: Vec<usize>,
    pub mode: CandidateMode,
}

impl Default for EvalSection {
    fn default() -> Self {
        EvalSection { ks: DEFAULT_KS.to_vec(), mode: CandidateMode::Levenshtein }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReviewSection {
    /// Candidates shown per item; 1..=100.
    pub top_k: usize,
    pub double_keyed: bool,
    pub host: String,
    pub port: u16,
    /// Journal entries between snapshots; 0 disables them.
    pub snapshot_every: u64,
}

impl Default for ReviewSection {
    fn default() -> Self {
        ReviewSection {
            top_k: taboo_review::model::DEFAULT_TOP_K,
            double_keyed: false,
            host: "127.0.0.1".into(),
            port: 8080,
            snapshot_every: taboo_review::store::DEFAULT_SNAPSHOT_EVERY,
        }
    }
}

fn in_range<T: PartialOrd + std::fmt::Display>(name: &str, v: T, lo: T, hi: T) -> anyhow::Result<()> {
    ensure!(v >= lo && v <= hi, "{name} = {v} is outside {lo}..={hi}");
    Ok(())
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("invalid config {}", path.display()))
    }

    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        let cfg: RunConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn save(&self, path: &Path) -> anyhow::Result<()> {
        std::fs::write(path, self.to_toml()).with_context(|| format!("cannot write config {}", path.display()))
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        let t = &self.thresholds;
        in_range("thresholds.frequency", t.frequency, 1, u64::MAX)?;
        ensure!((0.0..=1.0).contains(&t.agreement), "thresholds.agreement = {} is outside [0, 1]", t.agreement);
        in_range("thresholds.window", t.window, 1, 1000)?;
        in_range("thresholds.radius", t.radius, 1, 10)?;
        in_range("thresholds.order", t.order, 1, 5)?;
        in_range("thresholds.histogram_bins", t.histogram_bins, 1, 1000)?;
        in_range("thresholds.top_n", t.top_n, 1, usize::MAX)?;
        self.ngram()?;
        let b = &self.backend;
        in_range("backend.timeout_ms", b.timeout_ms, 1, 600_000)?;
        in_range("backend.retries", b.retries, 0, 10)?;
        in_range("backend.max_in_flight", b.max_in_flight, 1, 256)?;
        ensure!(!self.eval.ks.is_empty(), "eval.ks must not be empty");
        for &k in &self.eval.ks {
            in_range("eval.ks entry", k, 1, 1000)?;
        }
        in_range("review.top_k", self.review.top_k, 1, 100)?;
        Ok(())
    }

    /// N-gram settings implied by the thresholds.
    pub fn ngram(&self) -> anyhow::Result<NgramConfig> {
        let t = &self.thresholds;
        let mut c = match &t.weights {
            Some(w) => NgramConfig { order: t.order, weights: w.clone(), k: t.smoothing_k },
            None if t.order > 3 => bail!("thresholds.order = {} needs explicit thresholds.weights", t.order),
            None => NgramConfig::with_order(t.order)?,
        };
        c.k = t.smoothing_k;
        c.validate().context("invalid n-gram settings")?;
        Ok(c)
    }
}
