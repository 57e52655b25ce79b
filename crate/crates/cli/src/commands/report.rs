use std::io::Write;
use std::path::PathBuf;

use taboo_core::EvalResult;

use crate::config::RunConfig;
use crate::error::{input_error, Classify, CliResult};
use crate::io;

#[derive(Debug, clap::Args)]
#[group(required = true, multiple = false)]
pub struct Args {
    /// Review journal; prints the queue summary as JSON.
    #[arg(long, value_name = "FILE")]
    journal: Option<PathBuf>,
    /// Output of `taboo eval`; prints metric,value CSV.
    #[arg(long, value_name = "FILE")]
    eval: Option<PathBuf>,
}

pub fn run(args: &Args, out: &mut impl Write) -> CliResult<()> {
    if let Some(path) = &args.journal {
        if !path.exists() {
            return Err(input_error(format!("no journal at {}", path.display())));
        }
        let mut cfg = RunConfig::default();
        cfg.review.snapshot_every = 0;
        let store = super::serve::open_store(path, &cfg)?;
        return io::write_json(out, &store.summary());
    }
    let path = args.eval.as_ref().expect("clap requires one of the two");
    let text =
        std::fs::read_to_string(path).map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))?;
    let r: EvalResult = serde_json::from_str(&text)
        .map_err(|e| input_error(format!("{} is not an eval result: {e}", path.display())))?;
    let mut w = csv::Writer::from_writer(&mut *out);
    w.write_record(["metric", "value"]).internal()?;
    let mut row = |k: String, v: String| w.write_record([k, v]).internal();
    row("backend".into(), r.backend.clone())?;
    row("mode".into(), r.mode.to_string())?;
    row("radius".into(), r.radius.to_string())?;
    row("n_total".into(), r.n_total.to_string())?;
    row("n_eligible".into(), r.n_eligible.to_string())?;
    row("n_scored".into(), r.n_scored.to_string())?;
    row("n_errors".into(), r.n_errors.to_string())?;
    for (k, p) in &r.p_at {
        row(format!("p_at_{k}"), p.to_string())?;
    }
    row("candidate_miss".into(), r.candidate_miss.to_string())?;
    row("candidate_miss_rate".into(), r.candidate_miss_rate.to_string())?;
    row("taboo_top1_rate".into(), r.taboo_top1_rate.to_string())?;
    row("no_decision".into(), r.no_decision.to_string())?;
    row("excluded".into(), r.excluded.len().to_string())?;
    w.flush().internal()
}
