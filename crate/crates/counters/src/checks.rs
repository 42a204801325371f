//! Trace assertions for the weak-counter layer of a boost root.
//!
//! All checks read the per-round probes, i.e. the settled votes and the clock
//! each correct node holds at the end of a round.

use crate::params::BoostParams;
use std::collections::HashMap;
use synccount_core::Trace;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub round: u64,
    pub detail: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "round {}: {}", self.round, self.detail)
    }
}

fn rounds(trace: &Trace) -> impl Iterator<Item = &synccount_core::RoundRecord> {
    std::iter::once(&trace.initial).chain(&trace.rounds)
}

/// Settled votes of one block never disagree within `2 c1` rounds.
///
/// Two defined values `d(v, r)` and `d(w, r')` with `r - 2c1 < r' <= r` and
/// `r >= 2c1` must satisfy `d(w, r') = d(v, r) - (r - r') mod c_i`.
/// Equivalently, `d - r mod c_i` takes a single value over every such window.
pub fn check_settled_consistency(trace: &Trace, p: &BoostParams) -> Result<(), Violation> {
    let span = 2 * u64::from(p.c1);
    for i in 0..2 {
        let period = u64::from(p.block_period(i));
        let mut last_seen: HashMap<u64, (u64, usize)> = HashMap::new();
        for rec in rounds(trace).skip(1) {
            let r = rec.round;
            let mut here: Vec<(u64, usize)> = Vec::new();
            for (v, probe) in rec.probes.iter().enumerate() {
                if let Some(d) = probe.and_then(|p| p.block_view[i]) {
                    let base = (u64::from(d) + period - r % period) % period;
                    last_seen.insert(base, (r, v));
                    here.push((base, v));
                }
            }
            if r < span {
                continue;
            }
            for &(base, v) in &here {
                if let Some((&other, &(r2, w))) =
                    last_seen.iter().find(|(&b, &(r2, _))| b != base && r2 + span > r)
                {
                    return Err(Violation {
                        round: r,
                        detail: format!(
                            "block {i}: node v{v} offset {base} at round {r}, node v{w} offset {other} at round {r2}"
                        ),
                    });
                }
            }
        }
    }
    Ok(())
}

/// First round starting `tau` consecutive rounds in which all correct clocks
/// agree and count up modulo `tau`.
pub fn first_clock_window(trace: &Trace, tau: u32) -> Option<u64> {
    let mut start: Option<u64> = None;
    let mut prev: Option<u32> = None;
    for rec in rounds(trace) {
        let mut clocks = rec.probes.iter().flatten().map(|p| p.clock);
        let first = clocks.next().flatten();
        let agreed = first.filter(|&d| clocks.all(|x| x == Some(d)));
        match (agreed, prev, start) {
            (Some(d), Some(q), Some(s)) if d == (q + 1) % tau => {
                if rec.round + 1 - s >= u64::from(tau) {
                    return Some(s);
                }
            }
            (Some(_), _, _) => start = Some(rec.round),
            (None, _, _) => start = None,
        }
        prev = agreed;
        if tau == 1 && start.is_some() {
            return start;
        }
    }
    None
}

/// Every correct node's settled vote of block `i` agrees and increments from
/// round `from` to the end of the trace.
pub fn check_block_counts(trace: &Trace, p: &BoostParams, i: usize, from: u64) -> Result<(), Violation> {
    let period = p.block_period(i);
    let mut prev: Option<u32> = None;
    for rec in rounds(trace).filter(|r| r.round >= from) {
        let mut seen = None;
        for (v, probe) in rec.probes.iter().enumerate() {
            let Some(probe) = probe else { continue };
            let d = probe.block_view[i].ok_or_else(|| Violation {
                round: rec.round,
                detail: format!("block {i}: node v{v} has no settled vote"),
            })?;
            if *seen.get_or_insert(d) != d {
                return Err(Violation { round: rec.round, detail: format!("block {i}: votes disagree") });
            }
        }
        if let (Some(q), Some(d)) = (prev, seen) {
            if d != (q + 1) % period {
                return Err(Violation { round: rec.round, detail: format!("block {i}: {q} followed by {d}") });
            }
        }
        prev = seen;
    }
    Ok(())
}

/// Round from which a correct block's settled votes must count: its child's
/// bound plus the vote settling time and one full cooldown.
pub fn block_settle_round(p: &BoostParams, child_bound: u64) -> u64 {
    child_bound + crate::constants::VOTE_SETTLE_ROUNDS + u64::from(p.cooldown_max())
}
