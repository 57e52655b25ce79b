//! HTTP contract of the review service, driven in-process.

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use taboo_core::cloze::ScoredCandidate;
use taboo_core::detection::{FlaggedOccurrence, Snippet};
use taboo_core::lexicon::Severity;
use taboo_core::transcripts::Source;
use taboo_review::{router, IngestRecord, QueueConfig, ReviewStore, StoreOptions};
use tower::ServiceExt;

fn record(video: &str) -> IngestRecord {
    IngestRecord {
        id: None,
        snippet: Snippet {
            tokens: ["i", "love", "to", "eat", "crap"].map(String::from).to_vec(),
            flag_offset: 4,
            origin: FlaggedOccurrence {
                video_id: video.into(),
                source: Source::Aws,
                token_index: 4,
                word: "crap".into(),
                severity: Severity::High,
                confidence: Some(0.98),
            },
        },
        candidates: ["crab", "crap", "craft"]
            .iter()
            .enumerate()
            .map(|(i, w)| ScoredCandidate { word: w.to_string(), score: -1.0 - i as f64, rank: i + 1 })
            .collect(),
        media_url: Some(format!("https://media.example/{video}")),
    }
}

struct Fixture {
    _dir: tempfile::TempDir,
    store: Arc<ReviewStore>,
}

impl Fixture {
    fn new(config: QueueConfig, videos: &[&str]) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let opts = StoreOptions { config: Some(config), ..StoreOptions::default() };
        let store = Arc::new(ReviewStore::open(&dir.path().join("j.jsonl"), opts).unwrap());
        store.ingest(videos.iter().map(|v| record(v)).collect()).unwrap();
        Fixture { _dir: dir, store }
    }

    fn app(&self) -> Router {
        router(self.store.clone())
    }

    async fn call(&self, req: Request<Body>) -> (StatusCode, Value) {
        let resp = self.app().oneshot(req).await.unwrap();
        let status = resp.status();
        let ct = resp.headers().get("content-type").map(|v| v.to_str().unwrap().to_string());
        let bytes = resp.into_body().collect().await.unwrap().to_bytes();
        assert_eq!(ct.as_deref(), Some("application/json"), "{}", String::from_utf8_lossy(&bytes));
        (status, serde_json::from_slice(&bytes).unwrap())
    }

    async fn get(&self, uri: &str) -> (StatusCode, Value) {
        self.call(Request::get(uri).body(Body::empty()).unwrap()).await
    }

    async fn decide(&self, id: &str, reviewer: Option<&str>, body: Value) -> (StatusCode, Value) {
        let mut req = Request::post(format!("/api/items/{id}/decision")).header("content-type", "application/json");
        if let Some(r) = reviewer {
            req = req.header("x-reviewer", r);
        }
        self.call(req.body(Body::from(body.to_string())).unwrap()).await
    }
}

const A: &str = "vid-a:aws:4";

#[tokio::test]
async fn health_and_queue_listing() {
    let f = Fixture::new(QueueConfig::default(), &["vid-a", "vid-b", "vid-c"]);
    let (s, v) = f.get("/api/health").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["items"], 3);

    let (s, v) = f.get("/api/queue?status=pending&limit=2").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["total"], 3);
    let items = v["items"].as_array().unwrap();
    assert_eq!(items.len(), 2);
    assert_eq!(items[0]["id"], A);
    assert_eq!(items[0]["status"], "pending");
    assert_eq!(items[0]["decision"], Value::Null);
    let words: Vec<&str> =
        items[0]["candidates"].as_array().unwrap().iter().map(|c| c["word"].as_str().unwrap()).collect();
    assert_eq!(words, ["crab", "crap", "craft"]);
    assert_eq!(items[0]["media_url"], "https://media.example/vid-a");

    let (_, v) = f.get("/api/queue?status=decided").await;
    assert_eq!(v["total"], 0);
    for bad in ["/api/queue?status=done", "/api/queue?limit=0", "/api/queue?limit=x", "/api/queue?sort=id"] {
        let (s, v) = f.get(bad).await;
        assert_eq!(s, StatusCode::BAD_REQUEST, "{bad}");
        assert_eq!(v["error"], "invalid");
    }
}

#[tokio::test]
async fn item_lookup() {
    let f = Fixture::new(QueueConfig::default(), &["vid-a"]);
    let (s, v) = f.get(&format!("/api/items/{A}")).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["snippet"]["tokens"][4], "crap");
    let (s, v) = f.get("/api/items/nope").await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(v["error"], "not_found");
}

#[tokio::test]
async fn decision_lifecycle() {
    let f = Fixture::new(QueueConfig::default(), &["vid-a", "vid-b", "vid-c"]);
    let body = json!({"verdict": "accept_fix", "chosen_word": "crab", "timestamp_ms": 1_700_000_000_000u64});

    let (s, v) = f.decide(A, Some("ann"), body.clone()).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["idempotent"], false);
    assert_eq!(v["item"]["status"], "decided");
    assert_eq!(v["item"]["decision"]["reviewer"], "ann");
    assert_eq!(v["item"]["decision"]["chosen_word"], "crab");

    let mut later = body.clone();
    later["timestamp_ms"] = json!(1_700_000_009_000u64);
    let (s, v) = f.decide(A, Some("ann"), later).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["idempotent"], true);
    assert_eq!(v["item"]["decisions"].as_array().unwrap().len(), 1);

    let (s, v) = f.decide(A, Some("bob"), json!({"verdict": "present_in_audio"})).await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert_eq!(v["error"], "conflict");
    assert_eq!(v["existing"][0]["reviewer"], "ann");
    assert_eq!(v["incoming"]["reviewer"], "bob");
    assert_eq!(v["incoming"]["verdict"], "present_in_audio");

    let (s, _) = f.decide(A, Some("ann"), json!({"verdict": "unsure"})).await;
    assert_eq!(s, StatusCode::CONFLICT);

    let (s, v) = f.decide("nope", Some("ann"), json!({"verdict": "unsure"})).await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    assert_eq!(v["error"], "not_found");

    let (_, v) = f.get("/api/reports/summary").await;
    assert_eq!((v["total"].as_u64(), v["decided"].as_u64(), v["pending"].as_u64()), (Some(3), Some(1), Some(2)));
    assert_eq!(v["accept_fix"], 1);
    assert_eq!(v["agreement_rate"], Value::Null);
}

#[tokio::test]
async fn decision_validation() {
    let f = Fixture::new(QueueConfig::default(), &["vid-a"]);
    let cases = [
        (Some("ann"), json!({"verdict": "accept_fix"})),
        (Some("ann"), json!({"verdict": "accept_fix", "chosen_word": "lobster"})),
        (Some("ann"), json!({"verdict": "unsure", "chosen_word": "crab"})),
        (Some("ann"), json!({"verdict": "maybe"})),
        (Some("ann"), json!({"verdict": "unsure", "extra": 1})),
        (Some("ann"), json!({"verdict": "unsure", "item_id": "other"})),
        (Some("ann"), json!({"verdict": "unsure", "reviewer": "bob"})),
        (None, json!({"verdict": "unsure"})),
    ];
    for (reviewer, body) in cases {
        let (s, v) = f.decide(A, reviewer, body.clone()).await;
        assert_eq!(s, StatusCode::BAD_REQUEST, "{body}");
        assert_eq!(v["error"], "invalid");
    }
    let (_, v) = f.get("/api/reports/summary").await;
    assert_eq!(v["decided"], 0);

    let (s, v) = f
        .decide(
            A,
            None,
            json!({"reviewer": "cy", "verdict": "accept_fix", "chosen_word": "lobster", "free_text": true}),
        )
        .await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v["item"]["decision"]["free_text"], true);
    assert!(v["item"]["decision"]["timestamp_ms"].as_u64().unwrap() > 1_600_000_000_000);
}

#[tokio::test]
async fn double_keyed_agreement() {
    let f = Fixture::new(QueueConfig::double_keyed(), &["vid-a", "vid-b"]);
    let (_, v) = f.decide(A, Some("ann"), json!({"verdict": "accept_fix", "chosen_word": "crab"})).await;
    assert_eq!(v["item"]["status"], "pending");
    let (_, v) = f.decide(A, Some("bob"), json!({"verdict": "accept_fix", "chosen_word": "crab"})).await;
    assert_eq!(v["item"]["status"], "decided");
    let b = "vid-b:aws:4";
    f.decide(b, Some("ann"), json!({"verdict": "unsure"})).await;
    f.decide(b, Some("bob"), json!({"verdict": "present_in_audio"})).await;
    let (s, v) = f.decide(b, Some("cy"), json!({"verdict": "unsure"})).await;
    assert_eq!(s, StatusCode::CONFLICT);
    assert_eq!(v["existing"].as_array().unwrap().len(), 2);
    let (_, v) = f.get("/api/reports/summary").await;
    assert_eq!(v["double_keyed"], 2);
    assert_eq!(v["agreement_rate"], 0.5);
}

#[tokio::test]
async fn decisions_survive_restart() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("j.jsonl");
    {
        let store = Arc::new(ReviewStore::open(&path, StoreOptions::default()).unwrap());
        store.ingest(vec![record("vid-a")]).unwrap();
        let f = Fixture { _dir: tempfile::tempdir().unwrap(), store };
        let (s, _) = f.decide(A, Some("ann"), json!({"verdict": "present_in_audio"})).await;
        assert_eq!(s, StatusCode::OK);
    }
    let f = Fixture { _dir: dir, store: Arc::new(ReviewStore::open(&path, StoreOptions::default()).unwrap()) };
    let (_, v) = f.get(&format!("/api/items/{A}")).await;
    assert_eq!(v["decision"]["verdict"], "present_in_audio");
}
