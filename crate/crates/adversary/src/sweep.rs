use crate::catalog::{Catalog, Strategy};
use rayon::prelude::*;
use serde::Serialize;
use synccount_core::{run_execution, Protocol, RunOptions, SimFault};

/// Worst stabilisation round of one strategy over a seed set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WorstCase {
    pub strategy: Strategy,
    pub runs: usize,
    /// Largest stabilisation round among runs that stabilised.
    pub max_round: Option<u64>,
    pub unstabilised: usize,
}

pub fn worst_of<P: Protocol>(
    strategies: &[Strategy],
    p: &P,
    seeds: &[u64],
    horizon: u64,
) -> Result<Vec<WorstCase>, SimFault> {
    strategies
        .iter()
        .map(|&strategy| {
            let rounds = seeds
                .par_iter()
                .map(|&seed| {
                    let trace = run_execution(p, &mut Catalog::new(strategy, seed), RunOptions::new(horizon, seed))?;
                    Ok(trace.stabilisation().round())
                })
                .collect::<Result<Vec<_>, SimFault>>()?;
            Ok(WorstCase {
                strategy,
                runs: rounds.len(),
                max_round: rounds.iter().flatten().copied().max(),
                unstabilised: rounds.iter().filter(|r| r.is_none()).count(),
            })
        })
        .collect()
}
