use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::Context;
use taboo_review::journal::JournalError;
use taboo_review::{router, IngestRecord, QueueConfig, ReviewError, ReviewStore, StoreOptions};

use crate::config::RunConfig;
use crate::error::{Classify, CliResult, Failure};
use crate::io;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Append-only decision journal; created if missing.
    #[arg(long, value_name = "FILE")]
    journal: Option<PathBuf>,
    /// Review records (JSON lines) to add before serving.
    #[arg(long, value_name = "FILE")]
    ingest: Option<PathBuf>,
    #[arg(long)]
    host: Option<String>,
    /// 0 picks a free port.
    #[arg(long)]
    port: Option<u16>,
    /// Require two reviewers per item (new journals only).
    #[arg(long)]
    double_keyed: bool,
    /// Candidates kept per item (new journals only).
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long)]
    snapshot_every: Option<u64>,
}

impl Args {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if self.journal.is_some() {
            cfg.paths.journal.clone_from(&self.journal);
        }
        if let Some(h) = &self.host {
            cfg.review.host.clone_from(h);
        }
        if let Some(p) = self.port {
            cfg.review.port = p;
        }
        if self.double_keyed {
            cfg.review.double_keyed = true;
        }
        if let Some(k) = self.top_k {
            cfg.review.top_k = k;
        }
        if let Some(n) = self.snapshot_every {
            cfg.review.snapshot_every = n;
        }
    }
}

pub fn review_failure(e: ReviewError) -> Failure {
    match e {
        ReviewError::Journal(JournalError::Io { .. }) => Failure::Internal(e.into()),
        _ => Failure::Input(e.into()),
    }
}

/// Opens the journal at `path`. An existing journal keeps the queue
/// settings it was created with.
pub fn open_store(path: &std::path::Path, cfg: &RunConfig) -> CliResult<ReviewStore> {
    let wanted =
        QueueConfig { required_decisions: if cfg.review.double_keyed { 2 } else { 1 }, top_k: cfg.review.top_k };
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let options = StoreOptions { config: fresh.then_some(wanted), snapshot_every: cfg.review.snapshot_every };
    let store = ReviewStore::open(path, options).map_err(review_failure)?;
    if store.config() != wanted {
        log::warn!("journal {} keeps its settings {:?}", path.display(), store.config());
    }
    Ok(store)
}

pub fn run(args: &Args, cfg: &RunConfig, out: &mut impl Write) -> CliResult<()> {
    let path = super::need(&cfg.paths.journal, "--journal")?;
    let store = open_store(path, cfg)?;
    if let Some(src) = &args.ingest {
        let records: Vec<IngestRecord> = io::read_jsonl(src)?;
        let ids = store.ingest(records).map_err(review_failure)?;
        log::info!("ingested {} items", ids.len());
    }
    let store = Arc::new(store);
    let addr = format!("{}:{}", cfg.review.host, cfg.review.port);

    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build().internal()?;
    runtime.block_on(async {
        let listener =
            tokio::net::TcpListener::bind(&addr).await.with_context(|| format!("cannot listen on {addr}")).input()?;
        let local: SocketAddr = listener.local_addr().internal()?;
        writeln!(out, "{}", serde_json::json!({ "listening": local.to_string() })).internal()?;
        out.flush().internal()?;
        log::info!("serving {} items on http://{local}", store.summary().total);
        axum::serve(listener, router(store.clone()))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .internal()
    })?;
    store.snapshot().map_err(review_failure)
}
