//! Configured experiments with persistent outputs.

use crate::config::ExperimentConfig;
use crate::construct::{build, Built};
use crate::error::HarnessError;
use crate::metrics::{write_csv, RunContext, RunMetrics};
use crate::run::{execute, for_seeds, horizon, run_label, validate};
use crate::traces::write_trace;
use crate::with_protocol;
use std::path::{Path, PathBuf};

pub const METRICS_FILE: &str = "metrics.csv";

pub fn trace_path(dir: &Path, seed: u64) -> PathBuf {
    dir.join("traces").join(format!("seed-{seed}.jsonl"))
}

pub fn context(built: &Built) -> RunContext {
    RunContext { bound: built.bound(), state_bits: with_protocol!(built, p => synccount_core::Protocol::state_bits(p)), kappa: built.kappa() }
}

/// Outcome of a sweep: metrics rows in seed order.
#[derive(Clone, Debug)]
pub struct Sweep {
    pub horizon: u64,
    pub rows: Vec<RunMetrics>,
}

impl Sweep {
    pub fn all_within_bound(&self) -> bool {
        self.rows.iter().all(|r| r.within_bound)
    }
}

fn io_error(run: String, path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { run, path: path.to_path_buf(), source }
}

/// Run every configured seed and write traces and the metrics table under
/// the output directory.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Sweep, HarnessError> {
    let built = build(&cfg.construction)?;
    validate(cfg, &built)?;
    let horizon = horizon(&cfg.run, &built)?;
    let ctx = context(&built);
    let dir = Path::new(&cfg.output.dir);
    if cfg.output.traces {
        let traces = dir.join("traces");
        std::fs::create_dir_all(&traces).map_err(io_error("sweep".into(), &traces))?;
    } else {
        std::fs::create_dir_all(dir).map_err(io_error("sweep".into(), dir))?;
    }
    let seeds: Vec<u64> = cfg.seeds().collect();
    let rows = with_protocol!(&built, p => for_seeds(&seeds, |seed| {
        let trace = execute(p, &cfg.adversary, seed, horizon)?;
        if cfg.output.traces {
            let path = trace_path(dir, seed);
            let run = run_label(&cfg.adversary, seed);
            let file = std::fs::File::create(&path).map_err(io_error(run.clone(), &path))?;
            write_trace(file, &trace, ctx, cfg).map_err(io_error(run, &path))?;
        }
        Ok(RunMetrics::from_trace(&trace, &ctx))
    }))?;
    let path = dir.join(METRICS_FILE);
    write_csv(&path, &rows).map_err(|e| HarnessError::Io {
        run: "sweep".into(),
        path: path.clone(),
        source: std::io::Error::other(e),
    })?;
    Ok(Sweep { horizon, rows })
}
