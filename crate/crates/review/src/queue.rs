//! In-memory review state. Every mutation is split into a `check_*` that
//! may fail and an infallible `apply_*`, so the store can journal between
//! the two.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::model::{IngestRecord, ReviewDecision, ReviewItem, Status, Summary, Verdict, DEFAULT_TOP_K};
use crate::ReviewError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueueConfig {
    /// Decisions from distinct reviewers needed before an item is decided;
    /// 1 or 2.
    pub required_decisions: usize,
    pub top_k: usize,
}

impl Default for QueueConfig {
    fn default() -> Self {
        QueueConfig { required_decisions: 1, top_k: DEFAULT_TOP_K }
    }
}

impl QueueConfig {
    pub fn double_keyed() -> Self {
        QueueConfig { required_decisions: 2, ..QueueConfig::default() }
    }

    pub fn validate(&self) -> Result<(), ReviewError> {
        if !(1..=2).contains(&self.required_decisions) {
            return Err(ReviewError::Invalid(format!(
                "required_decisions must be 1 or 2, got {}",
                self.required_decisions
            )));
        }
        if self.top_k == 0 {
            return Err(ReviewError::Invalid("top_k must be at least 1".into()));
        }
        Ok(())
    }
}

/// What recording a decision would do.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecisionEffect {
    /// New decision; must be journaled and applied.
    Record,
    /// Exact repeat of this reviewer's earlier verdict; nothing changes.
    Repeat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Queue {
    config: QueueConfig,
    /// Ids in ingest order.
    order: Vec<String>,
    items: BTreeMap<String, ReviewItem>,
}

impl Queue {
    pub fn new(config: QueueConfig) -> Self {
        Queue { config, order: Vec::new(), items: BTreeMap::new() }
    }

    pub fn config(&self) -> QueueConfig {
        self.config
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&ReviewItem> {
        self.items.get(id)
    }

    /// Items in ingest order, optionally of one status.
    pub fn iter(&self, status: Option<Status>) -> impl Iterator<Item = &ReviewItem> {
        self.order.iter().map(|id| &self.items[id]).filter(move |it| status.map_or(true, |s| it.status == s))
    }

    /// Turns records into pending items, rejecting the whole batch if any
    /// id is already queued or repeated within it.
    pub fn prepare_ingest(&self, records: Vec<IngestRecord>) -> Result<Vec<ReviewItem>, ReviewError> {
        let items: Vec<ReviewItem> = records.into_iter().map(|r| r.into_item(self.config.top_k)).collect();
        self.check_ingest(&items)?;
        Ok(items)
    }

    pub fn check_ingest(&self, items: &[ReviewItem]) -> Result<(), ReviewError> {
        let mut seen = BTreeSet::new();
        let mut dups = BTreeSet::new();
        for it in items {
            if it.id.is_empty() {
                return Err(ReviewError::Invalid("empty item id".into()));
            }
            if it.status != Status::Pending || it.decision.is_some() || !it.decisions.is_empty() {
                return Err(ReviewError::Invalid(format!("item {} is not pending", it.id)));
            }
            if self.items.contains_key(&it.id) || !seen.insert(it.id.as_str()) {
                dups.insert(it.id.clone());
            }
        }
        if !dups.is_empty() {
            return Err(ReviewError::DuplicateIds(dups.into_iter().collect()));
        }
        Ok(())
    }

    pub fn apply_ingest(&mut self, items: Vec<ReviewItem>) {
        for it in items {
            self.order.push(it.id.clone());
            self.items.insert(it.id.clone(), it);
        }
    }

    pub fn check_decision(&self, d: &ReviewDecision) -> Result<DecisionEffect, ReviewError> {
        let item = self.items.get(&d.item_id).ok_or_else(|| ReviewError::NotFound(d.item_id.clone()))?;
        if d.reviewer.trim().is_empty() {
            return Err(ReviewError::Invalid("reviewer must be non-empty".into()));
        }
        match (d.verdict, &d.chosen_word) {
            (Verdict::AcceptFix, None) => {
                return Err(ReviewError::Invalid("accept_fix requires chosen_word".into()));
            }
            (Verdict::AcceptFix, Some(w)) => {
                if w.trim().is_empty() {
                    return Err(ReviewError::Invalid("chosen_word must be non-empty".into()));
                }
                if !d.free_text && !item.has_candidate(w) {
                    return Err(ReviewError::Invalid(format!(
                        "{w:?} is not a candidate of {}; set free_text for an override",
                        item.id
                    )));
                }
            }
            (v, Some(_)) => {
                return Err(ReviewError::Invalid(format!(
                    "chosen_word is only allowed with accept_fix, not {}",
                    v.as_str()
                )));
            }
            (_, None) if d.free_text => {
                return Err(ReviewError::Invalid("free_text requires chosen_word".into()));
            }
            (_, None) => {}
        }
        if let Some(prev) = item.decisions.iter().find(|p| p.reviewer == d.reviewer) {
            return if prev.same_judgement(d) { Ok(DecisionEffect::Repeat) } else { Err(self.conflict(item, d)) };
        }
        if item.status == Status::Decided {
            return Err(self.conflict(item, d));
        }
        Ok(DecisionEffect::Record)
    }

    fn conflict(&self, item: &ReviewItem, d: &ReviewDecision) -> ReviewError {
        ReviewError::Conflict {
            item_id: item.id.clone(),
            existing: item.decisions.clone(),
            incoming: Box::new(d.clone()),
        }
    }

    /// Appends a decision that passed [`Queue::check_decision`] with
    /// [`DecisionEffect::Record`].
    pub fn apply_decision(&mut self, d: ReviewDecision) {
        let required = self.config.required_decisions;
        let item = self.items.get_mut(&d.item_id).expect("checked decision");
        item.decisions.push(d);
        if item.decisions.len() >= required {
            item.status = Status::Decided;
            item.decision = item.decisions.first().cloned();
        }
    }

    pub fn summary(&self) -> Summary {
        let mut s = Summary {
            total: self.len(),
            pending: 0,
            decided: 0,
            accept_fix: 0,
            present_in_audio: 0,
            unsure: 0,
            free_text_overrides: 0,
            double_keyed: 0,
            double_keyed_agreeing: 0,
            agreement_rate: None,
        };
        for it in self.items.values() {
            match &it.decision {
                None => s.pending += 1,
                Some(d) => {
                    s.decided += 1;
                    match d.verdict {
                        Verdict::AcceptFix => s.accept_fix += 1,
                        Verdict::PresentInAudio => s.present_in_audio += 1,
                        Verdict::Unsure => s.unsure += 1,
                    }
                    if let [a, b] = it.decisions.as_slice() {
                        s.double_keyed += 1;
                        s.double_keyed_agreeing += usize::from(a.same_judgement(b));
                    }
                }
            }
            s.free_text_overrides += it.decisions.iter().filter(|d| d.free_text).count();
        }
        if s.double_keyed > 0 {
            s.agreement_rate = Some(s.double_keyed_agreeing as f64 / s.double_keyed as f64);
        }
        s
    }
}
