//! Human review queue for flagged snippets.
//!
//! State lives in memory and is rebuilt on start from an append-only
//! journal (see [`journal`]); every change is journaled before it becomes
//! visible. [`api::router`] exposes the queue over HTTP.

pub mod api;
pub mod journal;
pub mod model;
pub mod queue;
pub mod store;

pub use api::router;
pub use model::{IngestRecord, ReviewDecision, ReviewItem, Status, Summary, Verdict};
pub use queue::{Queue, QueueConfig};
pub use store::{Recorded, ReviewStore, StoreOptions};

use journal::JournalError;

#[derive(Debug, thiserror::Error)]
pub enum ReviewError {
    #[error("no item {0:?}")]
    NotFound(String),
    #[error("item {item_id:?} already has a different decision")]
    Conflict { item_id: String, existing: Vec<ReviewDecision>, incoming: Box<ReviewDecision> },
    #[error("item ids already queued or repeated: {}", .0.join(", "))]
    DuplicateIds(Vec<String>),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Journal(#[from] JournalError),
    #[error("journal entry {seq} cannot be replayed: {message}")]
    Replay { seq: u64, message: String },
}
