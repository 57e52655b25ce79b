//! Journaled queue shared by the HTTP handlers.
//!
//! Writers serialize on the journal mutex, validate against the current
//! state, append, and only then apply under the state write lock. Readers
//! take the state read lock only.

use std::path::Path;
use std::sync::{Mutex, RwLock};

use crate::journal::{read_snapshot, snapshot_path, write_snapshot, Event, Journal, Snapshot};
use crate::model::{IngestRecord, ReviewDecision, ReviewItem, Status, Summary};
use crate::queue::{DecisionEffect, Queue, QueueConfig};
use crate::ReviewError;

/// Entries between automatic snapshots.
pub const DEFAULT_SNAPSHOT_EVERY: u64 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StoreOptions {
    /// Queue settings for a new journal; must match an existing one.
    pub config: Option<QueueConfig>,
    /// 0 disables automatic snapshots.
    pub snapshot_every: u64,
}

impl Default for StoreOptions {
    fn default() -> Self {
        StoreOptions { config: None, snapshot_every: DEFAULT_SNAPSHOT_EVERY }
    }
}

pub struct ReviewStore {
    state: RwLock<Queue>,
    journal: Mutex<Journal>,
    snapshot_every: u64,
}

/// Result of [`ReviewStore::record_decision`].
#[derive(Debug, Clone, PartialEq)]
pub struct Recorded {
    pub item: ReviewItem,
    /// True when the decision repeated the reviewer's earlier one.
    pub idempotent: bool,
}

impl ReviewStore {
    /// Rebuilds state from the snapshot, if usable, plus the journal.
    pub fn open(path: &Path, options: StoreOptions) -> Result<Self, ReviewError> {
        if let Some(c) = options.config {
            c.validate()?;
        }
        let (mut journal, recovered) = Journal::open(path)?;
        let entries = recovered.entries;

        let config = match entries.first().map(|e| &e.event) {
            Some(Event::Open { config }) => {
                if options.config.is_some_and(|c| c != *config) {
                    return Err(ReviewError::Invalid(format!(
                        "journal {} was opened with {config:?}, not {:?}",
                        path.display(),
                        options.config.unwrap()
                    )));
                }
                *config
            }
            Some(_) => unreachable!("journal validates its first entry"),
            None => {
                let config = options.config.unwrap_or_default();
                journal.append(&Event::Open { config })?;
                config
            }
        };

        let snap = read_snapshot(&snapshot_path(path)).filter(|s| {
            let usable = s.seq <= journal.last_seq() && s.queue.config() == config;
            if !usable {
                log::warn!("ignoring snapshot at seq {} that does not fit the journal", s.seq);
            }
            usable
        });
        let (mut queue, from) = match snap {
            Some(s) => (s.queue, s.seq.max(1)),
            None => (Queue::new(config), 1),
        };
        for e in entries.iter().filter(|e| e.seq > from) {
            replay(&mut queue, &e.event).map_err(|err| ReviewError::Replay { seq: e.seq, message: err.to_string() })?;
        }
        Ok(ReviewStore {
            state: RwLock::new(queue),
            journal: Mutex::new(journal),
            snapshot_every: options.snapshot_every,
        })
    }

    pub fn config(&self) -> QueueConfig {
        self.read().config()
    }

    fn read(&self) -> std::sync::RwLockReadGuard<'_, Queue> {
        self.state.read().unwrap_or_else(|e| e.into_inner())
    }

    fn lock_journal(&self) -> std::sync::MutexGuard<'_, Journal> {
        self.journal.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn last_seq(&self) -> u64 {
        self.lock_journal().last_seq()
    }

    pub fn get(&self, id: &str) -> Option<ReviewItem> {
        self.read().get(id).cloned()
    }

    /// Up to `limit` items in ingest order, and how many matched in total.
    pub fn list(&self, status: Option<Status>, limit: usize) -> (Vec<ReviewItem>, usize) {
        let q = self.read();
        let items = q.iter(status).take(limit).cloned().collect();
        (items, q.iter(status).count())
    }

    pub fn summary(&self) -> Summary {
        self.read().summary()
    }

    /// Copy of the whole in-memory state.
    pub fn queue(&self) -> Queue {
        self.read().clone()
    }

    /// Queues the records as pending items; all or nothing.
    pub fn ingest(&self, records: Vec<IngestRecord>) -> Result<Vec<String>, ReviewError> {
        let mut journal = self.lock_journal();
        let items = self.read().prepare_ingest(records)?;
        let ids: Vec<String> = items.iter().map(|i| i.id.clone()).collect();
        if items.is_empty() {
            return Ok(ids);
        }
        let event = Event::Ingest { items };
        journal.append(&event)?;
        let Event::Ingest { items } = event else { unreachable!() };
        self.state.write().unwrap_or_else(|e| e.into_inner()).apply_ingest(items);
        self.maybe_snapshot(&journal)?;
        Ok(ids)
    }

    pub fn record_decision(&self, decision: ReviewDecision) -> Result<Recorded, ReviewError> {
        let mut journal = self.lock_journal();
        let effect = self.read().check_decision(&decision)?;
        let id = decision.item_id.clone();
        if effect == DecisionEffect::Record {
            journal.append(&Event::Decision { decision: decision.clone() })?;
            self.state.write().unwrap_or_else(|e| e.into_inner()).apply_decision(decision);
            self.maybe_snapshot(&journal)?;
        }
        Ok(Recorded { item: self.get(&id).expect("checked item"), idempotent: effect == DecisionEffect::Repeat })
    }

    fn maybe_snapshot(&self, journal: &Journal) -> Result<(), ReviewError> {
        if self.snapshot_every > 0 && journal.last_seq() % self.snapshot_every == 0 {
            self.write_snapshot_locked(journal)?;
        }
        Ok(())
    }

    fn write_snapshot_locked(&self, journal: &Journal) -> Result<(), ReviewError> {
        let snap = Snapshot { seq: journal.last_seq(), queue: self.queue() };
        write_snapshot(&snapshot_path(journal.path()), &snap)?;
        Ok(())
    }

    /// Writes a snapshot of the current state now.
    pub fn snapshot(&self) -> Result<(), ReviewError> {
        let journal = self.lock_journal();
        self.write_snapshot_locked(&journal)
    }
}

fn replay(queue: &mut Queue, event: &Event) -> Result<(), ReviewError> {
    match event {
        Event::Open { .. } => Err(ReviewError::Invalid("repeated open event".into())),
        Event::Ingest { items } => {
            queue.check_ingest(items)?;
            queue.apply_ingest(items.clone());
            Ok(())
        }
        Event::Decision { decision } => match queue.check_decision(decision)? {
            DecisionEffect::Record => {
                queue.apply_decision(decision.clone());
                Ok(())
            }
            DecisionEffect::Repeat => Err(ReviewError::Invalid("journaled decision repeats an earlier one".into())),
        },
    }
}
