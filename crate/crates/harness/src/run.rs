//! Single executions and seed fan-out.

use crate::config::{AdversaryConfig, ExperimentConfig, Mode, RunConfig};
use crate::construct::Built;
use crate::error::HarnessError;
use rayon::prelude::*;
use synccount_adversary::Catalog;
use synccount_core::{run_execution, Protocol, RunOptions, Trace};

/// Environment variable holding the worker count for sweeps.
pub const WORKERS_VAR: &str = "SYNCCOUNT_WORKERS";

/// Horizon for `built`: the configured one, or bound plus guard band when 0.
/// A configured horizon short of the guard band is refused unless overridden.
pub fn horizon(run: &RunConfig, built: &Built) -> Result<u64, HarnessError> {
    let minimum = built.bound() + run.guard_taus * built.tau();
    match run.horizon {
        0 => Ok(minimum),
        h if h < minimum && !run.allow_short_horizon => Err(HarnessError::Config(format!(
            "horizon {h} is below bound {} plus guard band {} x tau {}; set allow_short_horizon to override",
            built.bound(),
            run.guard_taus,
            built.tau()
        ))),
        h => Ok(h),
    }
}

/// Cross-section checks that need both the construction and the adversary.
pub fn validate(cfg: &ExperimentConfig, built: &Built) -> Result<(), HarnessError> {
    if cfg.construction.mode == Mode::Frozen {
        if let Some(s) = built.sampler() {
            s.check_adversary(cfg.adversary.oblivious).map_err(HarnessError::config)?;
        }
    }
    if cfg.run.seeds == 0 {
        return Err(HarnessError::Config("need at least one seed".into()));
    }
    Ok(())
}

pub fn adversary(cfg: &AdversaryConfig, seed: u64) -> Catalog {
    Catalog::new(cfg.strategy, seed).oblivious(cfg.oblivious)
}

pub fn run_label(cfg: &AdversaryConfig, seed: u64) -> String {
    format!("{}/seed {seed}", cfg.strategy.name())
}

pub fn execute<P: Protocol>(p: &P, adv: &AdversaryConfig, seed: u64, horizon: u64) -> Result<Trace, HarnessError> {
    run_execution(p, &mut adversary(adv, seed), RunOptions::new(horizon, seed))
        .map_err(|source| HarnessError::Sim { run: run_label(adv, seed), source })
}

/// Worker count from [`WORKERS_VAR`], defaulting to the available cores.
pub fn workers() -> usize {
    std::env::var(WORKERS_VAR)
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, usize::from))
}

/// Run `job` for every seed on a pool of [`workers`]; results come back in
/// seed order whatever the scheduling.
pub fn for_seeds<R, F>(seeds: &[u64], job: F) -> Result<Vec<R>, HarnessError>
where
    R: Send,
    F: Fn(u64) -> Result<R, HarnessError> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers())
        .build()
        .map_err(|e| HarnessError::Config(format!("worker pool: {e}")))?;
    let mut out: Vec<(u64, R)> =
        pool.install(|| seeds.par_iter().map(|&s| job(s).map(|r| (s, r))).collect::<Result<_, _>>())?;
    out.sort_by_key(|(s, _)| *s);
    Ok(out.into_iter().map(|(_, r)| r).collect())
}

/// Run `p` against `adv` for every seed and reduce each trace with `eval`,
/// without keeping the traces.
pub fn evaluate<P, R, F>(p: &P, adv: &AdversaryConfig, seeds: &[u64], horizon: u64, eval: F) -> Result<Vec<R>, HarnessError>
where
    P: Protocol,
    R: Send,
    F: Fn(&Trace) -> R + Sync + Send,
{
    for_seeds(seeds, |seed| execute(p, adv, seed, horizon).map(|t| eval(&t)))
}
