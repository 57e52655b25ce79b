//! HTTP JSON API over a [`ReviewStore`].
//!
//! | method | path | success |
//! |---|---|---|
//! | GET | `/api/queue?status=pending\|decided&limit=N` | `{"items": [...], "total": n}` |
//! | GET | `/api/items/{id}` | the item |
//! | POST | `/api/items/{id}/decision` | `{"item": ..., "idempotent": bool}` |
//! | GET | `/api/reports/summary` | [`Summary`](crate::Summary) |
//! | GET | `/api/health` | `{"status": "ok", ...}` |
//!
//! Errors are `{"error": kind, "message": text}` with status 400, 404, 409
//! or 500; a 409 also carries `existing` and `incoming` decisions.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;

use crate::model::{ReviewDecision, Status, Verdict};
use crate::store::ReviewStore;
use crate::ReviewError;

/// Names the reviewer when the decision body does not.
pub const REVIEWER_HEADER: &str = "x-reviewer";

pub const DEFAULT_LIMIT: usize = 50;
pub const MAX_LIMIT: usize = 1000;

pub fn router(store: Arc<ReviewStore>) -> Router {
    Router::new()
        .route("/api/health", get(health))
        .route("/api/queue", get(queue))
        .route("/api/items/{id}", get(item))
        .route("/api/items/{id}/decision", post(decide))
        .route("/api/reports/summary", get(summary))
        .with_state(store)
}

struct ApiError(ReviewError);

impl From<ReviewError> for ApiError {
    fn from(e: ReviewError) -> Self {
        ApiError(e)
    }
}

fn bad_request(message: impl Into<String>) -> ApiError {
    ApiError(ReviewError::Invalid(message.into()))
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let message = self.0.to_string();
        let (status, body) = match self.0 {
            ReviewError::NotFound(_) => (StatusCode::NOT_FOUND, json!({"error": "not_found", "message": message})),
            ReviewError::Conflict { item_id, existing, incoming } => (
                StatusCode::CONFLICT,
                json!({"error": "conflict", "message": message, "item_id": item_id, "existing": existing, "incoming": incoming}),
            ),
            ReviewError::DuplicateIds(ids) => {
                (StatusCode::CONFLICT, json!({"error": "duplicate_ids", "message": message, "ids": ids}))
            }
            ReviewError::Invalid(_) => (StatusCode::BAD_REQUEST, json!({"error": "invalid", "message": message})),
            ReviewError::Journal(_) | ReviewError::Replay { .. } => {
                log::error!("{message}");
                (StatusCode::INTERNAL_SERVER_ERROR, json!({"error": "internal", "message": message}))
            }
        };
        (status, Json(body)).into_response()
    }
}

async fn health(State(store): State<Arc<ReviewStore>>) -> Json<serde_json::Value> {
    let s = store.summary();
    Json(json!({
        "status": "ok",
        "items": s.total,
        "pending": s.pending,
        "journal_seq": store.last_seq(),
        "required_decisions": store.config().required_decisions,
    }))
}

async fn queue(
    State(store): State<Arc<ReviewStore>>,
    Query(params): Query<BTreeMap<String, String>>,
) -> Result<Json<serde_json::Value>, ApiError> {
    if let Some(k) = params.keys().find(|k| *k != "status" && *k != "limit") {
        return Err(bad_request(format!("unknown query parameter {k:?}")));
    }
    let status = params.get("status").map(|s| s.parse::<Status>()).transpose().map_err(bad_request)?;
    let limit = match params.get("limit") {
        None => DEFAULT_LIMIT,
        Some(l) => match l.parse::<usize>() {
            Ok(n) if (1..=MAX_LIMIT).contains(&n) => n,
            _ => return Err(bad_request(format!("limit must be an integer in 1..={MAX_LIMIT}"))),
        },
    };
    let (items, total) = store.list(status, limit);
    Ok(Json(json!({"items": items, "total": total})))
}

async fn item(State(store): State<Arc<ReviewStore>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let item = store.get(&id).ok_or(ReviewError::NotFound(id))?;
    Ok(Json(item).into_response())
}

async fn summary(State(store): State<Arc<ReviewStore>>) -> Response {
    Json(store.summary()).into_response()
}

/// Decision as posted; the path supplies the item id and the header or
/// server clock may supply reviewer and timestamp.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DecisionBody {
    item_id: Option<String>,
    reviewer: Option<String>,
    verdict: Verdict,
    chosen_word: Option<String>,
    #[serde(default)]
    free_text: bool,
    timestamp_ms: Option<u64>,
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
}

fn resolve(id: String, headers: &HeaderMap, body: &[u8]) -> Result<ReviewDecision, ApiError> {
    let b: DecisionBody = serde_json::from_slice(body).map_err(|e| bad_request(format!("decision body: {e}")))?;
    if b.item_id.as_ref().is_some_and(|i| *i != id) {
        return Err(bad_request("item_id in body differs from the path"));
    }
    let header = match headers.get(REVIEWER_HEADER) {
        None => None,
        Some(v) => Some(v.to_str().map_err(|_| bad_request("reviewer header is not visible ASCII"))?.to_string()),
    };
    let reviewer = match (b.reviewer, header) {
        (Some(r), Some(h)) if r != h => return Err(bad_request("reviewer in body differs from the header")),
        (Some(r), _) | (None, Some(r)) => r,
        (None, None) => return Err(bad_request(format!("reviewer missing; set it in the body or {REVIEWER_HEADER}"))),
    };
    Ok(ReviewDecision {
        item_id: id,
        reviewer,
        verdict: b.verdict,
        chosen_word: b.chosen_word,
        free_text: b.free_text,
        timestamp_ms: b.timestamp_ms.unwrap_or_else(now_ms),
    })
}

async fn decide(
    State(store): State<Arc<ReviewStore>>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<Json<serde_json::Value>, ApiError> {
    let decision = resolve(id, &headers, &body)?;
    let recorded = tokio::task::spawn_blocking(move || store.record_decision(decision))
        .await
        .map_err(|e| ApiError(ReviewError::Invalid(format!("decision task failed: {e}"))))??;
    Ok(Json(json!({"item": recorded.item, "idempotent": recorded.idempotent})))
}
