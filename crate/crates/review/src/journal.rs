//! Append-only JSON-lines event log plus an optional snapshot file.
//!
//! Each line is one [`Entry`]: `{"seq":N,"event":"open"|"ingest"|"decision",...}`
//! with `seq` starting at 1 and increasing by one. An append is durable once
//! [`Journal::append`] returns. A final line without its newline is the
//! remains of an interrupted append and is cut off on open; any other
//! unreadable line is corruption.

use std::fs::{self, File, OpenOptions};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::model::{ReviewDecision, ReviewItem};
use crate::queue::{Queue, QueueConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    /// Always the first entry.
    Open {
        config: QueueConfig,
    },
    Ingest {
        items: Vec<ReviewItem>,
    },
    Decision {
        decision: ReviewDecision,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub seq: u64,
    #[serde(flatten)]
    pub event: Event,
}

#[derive(Debug, thiserror::Error)]
pub enum JournalError {
    #[error("journal {path}: {source}", path = path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("journal {path} line {line}: {message}", path = path.display())]
    Corrupt { path: PathBuf, line: usize, message: String },
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> JournalError + '_ {
    move |source| JournalError::Io { path: path.to_path_buf(), source }
}

pub struct Journal {
    path: PathBuf,
    file: File,
    len: u64,
    next_seq: u64,
}

/// What [`Journal::open`] found on disk.
pub struct Recovered {
    pub entries: Vec<Entry>,
    /// Bytes of an interrupted final append that were discarded.
    pub torn_bytes: u64,
}

impl Journal {
    /// Opens or creates the journal, reading every intact entry.
    pub fn open(path: &Path) -> Result<(Journal, Recovered), JournalError> {
        let mut file = OpenOptions::new().read(true).append(true).create(true).open(path).map_err(io(path))?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes).map_err(io(path))?;

        let mut entries = Vec::new();
        let mut good = 0usize;
        for (i, line) in bytes.split_inclusive(|b| *b == b'\n').enumerate() {
            if !line.ends_with(b"\n") {
                break;
            }
            let corrupt = |message: String| JournalError::Corrupt { path: path.to_path_buf(), line: i + 1, message };
            let entry: Entry = serde_json::from_slice(line).map_err(|e| corrupt(e.to_string()))?;
            let expected = entries.len() as u64 + 1;
            if entry.seq != expected {
                return Err(corrupt(format!("seq {} where {expected} was expected", entry.seq)));
            }
            if (entry.seq == 1) != matches!(entry.event, Event::Open { .. }) {
                return Err(corrupt("open event must be first and only first".into()));
            }
            entries.push(entry);
            good += line.len();
        }
        let torn_bytes = (bytes.len() - good) as u64;
        if torn_bytes > 0 {
            log::warn!("{}: discarding {torn_bytes} bytes of an interrupted append", path.display());
            file.set_len(good as u64).map_err(io(path))?;
            file.sync_all().map_err(io(path))?;
        }
        let journal = Journal { path: path.to_path_buf(), file, len: good as u64, next_seq: entries.len() as u64 + 1 };
        Ok((journal, Recovered { entries, torn_bytes }))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Sequence number of the last durable entry, 0 when empty.
    pub fn last_seq(&self) -> u64 {
        self.next_seq - 1
    }

    /// Writes and syncs one entry, returning its sequence number.
    pub fn append(&mut self, event: &Event) -> Result<u64, JournalError> {
        let entry = Entry { seq: self.next_seq, event: event.clone() };
        let mut line = serde_json::to_vec(&entry).expect("journal entries serialize");
        line.push(b'\n');
        let written = self.file.write_all(&line).and_then(|()| self.file.sync_data());
        if let Err(e) = written {
            // Leave no partial line behind if the file is still usable.
            let _ = self.file.set_len(self.len);
            return Err(io(&self.path)(e));
        }
        self.len += line.len() as u64;
        self.next_seq += 1;
        Ok(entry.seq)
    }
}

/// Queue state as of journal entry `seq`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub seq: u64,
    pub queue: Queue,
}

/// `<journal>.snapshot` next to the journal.
pub fn snapshot_path(journal: &Path) -> PathBuf {
    let mut p = journal.as_os_str().to_owned();
    p.push(".snapshot");
    PathBuf::from(p)
}

/// Replaces the snapshot atomically via a temporary file and rename.
pub fn write_snapshot(path: &Path, snapshot: &Snapshot) -> Result<(), JournalError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut f = File::create(&tmp).map_err(io(&tmp))?;
    serde_json::to_writer(&mut f, snapshot).expect("snapshots serialize");
    f.sync_all().map_err(io(&tmp))?;
    drop(f);
    fs::rename(&tmp, path).map_err(io(path))?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        if let Ok(d) = File::open(dir) {
            let _ = d.sync_all();
        }
    }
    Ok(())
}

/// `None` when there is no snapshot or it cannot be read.
pub fn read_snapshot(path: &Path) -> Option<Snapshot> {
    let text = match fs::read(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return None,
        Err(e) => {
            log::warn!("ignoring unreadable snapshot {}: {e}", path.display());
            return None;
        }
    };
    match serde_json::from_slice(&text) {
        Ok(s) => Some(s),
        Err(e) => {
            log::warn!("ignoring malformed snapshot {}: {e}", path.display());
            None
        }
    }
}
