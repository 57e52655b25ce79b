//! Client for a remote masked-LM scorer.
//!
//! `POST {endpoint}/score` with `{"left", "right", "mask", "candidates"}`
//! answers `{"scores": {word: number}}`; `POST {endpoint}/contains` with
//! `{"words"}` answers `{"contains": {word: bool}}`.

use std::collections::HashMap;
use std::sync::{Condvar, Mutex};
use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::transcripts::MASK;

use super::{ClozeTask, ScoreError, ScorerBackend};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HttpScorerConfig {
    pub endpoint: String,
    #[serde(default = "default_timeout_ms")]
    pub timeout_ms: u64,
    /// Extra attempts after the first on transport failure or 5xx.
    #[serde(default = "default_retries")]
    pub retries: u32,
    #[serde(default = "default_max_in_flight")]
    pub max_in_flight: usize,
}

fn default_timeout_ms() -> u64 {
    10_000
}
fn default_retries() -> u32 {
    2
}
fn default_max_in_flight() -> usize {
    4
}

impl HttpScorerConfig {
    pub fn new(endpoint: impl Into<String>) -> Self {
        HttpScorerConfig {
            endpoint: endpoint.into(),
            timeout_ms: default_timeout_ms(),
            retries: default_retries(),
            max_in_flight: default_max_in_flight(),
        }
    }
}

#[derive(Serialize)]
struct ScoreRequest<'a> {
    left: &'a [String],
    right: &'a [String],
    mask: &'a str,
    candidates: &'a [String],
}

#[derive(Deserialize)]
struct ScoreResponse {
    scores: HashMap<String, f64>,
}

#[derive(Serialize)]
struct ContainsRequest<'a> {
    words: &'a [String],
}

#[derive(Deserialize)]
struct ContainsResponse {
    contains: HashMap<String, bool>,
}

/// Counting semaphore bounding concurrent requests.
#[derive(Debug)]
struct Gate {
    free: Mutex<usize>,
    cv: Condvar,
}

struct Permit<'a>(&'a Gate);

impl Gate {
    fn new(n: usize) -> Self {
        Gate { free: Mutex::new(n.max(1)), cv: Condvar::new() }
    }

    fn acquire(&self) -> Permit<'_> {
        let mut free = self.free.lock().unwrap_or_else(|e| e.into_inner());
        while *free == 0 {
            free = self.cv.wait(free).unwrap_or_else(|e| e.into_inner());
        }
        *free -= 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap_or_else(|e| e.into_inner()) += 1;
        self.0.cv.notify_one();
    }
}

#[derive(Debug)]
pub struct HttpScorer {
    config: HttpScorerConfig,
    agent: ureq::Agent,
    gate: Gate,
    name: String,
}

impl HttpScorer {
    pub fn new(config: HttpScorerConfig) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(config.timeout_ms)))
            .http_status_as_error(false)
            .build()
            .into();
        let gate = Gate::new(config.max_in_flight);
        let name = format!("http:{}", config.endpoint);
        HttpScorer { config, agent, gate, name }
    }

    fn post<Req: Serialize, Resp: DeserializeOwned>(&self, path: &str, body: &Req) -> Result<Resp, ScoreError> {
        let url = format!("{}/{}", self.config.endpoint.trim_end_matches('/'), path);
        let _permit = self.gate.acquire();
        let max_attempts = self.config.retries + 1;
        let mut attempt = 0;
        loop {
            attempt += 1;
            let (status, message) = match self.agent.post(&url).send_json(body) {
                Ok(mut resp) => {
                    let status = resp.status().as_u16();
                    if (200..300).contains(&status) {
                        let text = resp
                            .body_mut()
                            .read_to_string()
                            .map_err(|e| ScoreError::Protocol(format!("unreadable body: {e}")))?;
                        return serde_json::from_str(&text)
                            .map_err(|e| ScoreError::Protocol(format!("malformed {path} response: {e}")));
                    }
                    (Some(status), format!("{url} answered {status}"))
                }
                Err(e) => (None, e.to_string()),
            };
            let retryable = status.map_or(true, |s| s >= 500 || s == 429);
            if !retryable || attempt >= max_attempts {
                return Err(ScoreError::Transport { status, attempts: attempt, message });
            }
            log::debug!("retrying {url} after attempt {attempt}: {message}");
            std::thread::sleep(Duration::from_millis(25 * u64::from(attempt)));
        }
    }
}

impl ScorerBackend for HttpScorer {
    fn name(&self) -> &str {
        &self.name
    }

    fn contains(&self, word: &str) -> Result<bool, ScoreError> {
        Ok(self.contains_many(&[word.to_string()])?[0])
    }

    fn contains_many(&self, words: &[String]) -> Result<Vec<bool>, ScoreError> {
        let resp: ContainsResponse = self.post("contains", &ContainsRequest { words })?;
        words
            .iter()
            .map(|w| {
                resp.contains
                    .get(w)
                    .copied()
                    .ok_or_else(|| ScoreError::Protocol(format!("contains response lacks word {w:?}")))
            })
            .collect()
    }

    fn score(&self, task: &ClozeTask, candidates: &[String]) -> Result<Vec<f64>, ScoreError> {
        let req = ScoreRequest { left: &task.left, right: &task.right, mask: MASK, candidates };
        let resp: ScoreResponse = self.post("score", &req)?;
        candidates
            .iter()
            .map(|c| match resp.scores.get(c) {
                None => Err(ScoreError::Protocol(format!("score response lacks candidate {c:?}"))),
                Some(s) if !s.is_finite() => Err(ScoreError::NonFinite(c.clone())),
                Some(s) => Ok(*s),
            })
            .collect()
    }
}
