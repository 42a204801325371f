//! Trace checks and measurements for silenced runs.
//!
//! They read the per-round probes: cooldown, happiness and raw counter.

use serde::{Deserialize, Serialize};
use synccount_core::{RoundRecord, Trace};
use synccount_counters::checks::Violation;

fn records(trace: &Trace) -> impl Iterator<Item = &RoundRecord> {
    std::iter::once(&trace.initial).chain(&trace.rounds)
}

/// Nodes with a zero cooldown agree on the counter, shifted by round, within
/// any `cooldown`-round window, from round `from` on.
pub fn check_cooldown_agreement(trace: &Trace, cooldown: u64, from: u64) -> Result<(), Violation> {
    let c = u64::from(trace.c);
    // (round, node, counter - round mod c) of the latest zero-cooldown entries
    let mut recent: Vec<(u64, usize, u64)> = Vec::new();
    for rec in records(trace) {
        let r = rec.round;
        recent.retain(|&(r2, _, _)| r2 + cooldown > r);
        for (v, p) in rec.probes.iter().enumerate() {
            let Some(p) = p else { continue };
            let (Some(0), Some(a)) = (p.cooldown, p.raw_counter) else { continue };
            if r < from {
                continue;
            }
            let base = (u64::from(a) + c - r % c) % c;
            if u64::from(a) >= c {
                return Err(Violation { round: r, detail: format!("v{v} has zero cooldown at infinity") });
            }
            if let Some(&(r2, w, other)) = recent.iter().find(|e| e.2 != base) {
                return Err(Violation {
                    round: r,
                    detail: format!("v{v} counts with offset {base}, v{w} with offset {other} at round {r2}"),
                });
            }
            recent.push((r, v, base));
        }
    }
    Ok(())
}

/// A correct node happy in two consecutive rounds `r-1, r >= from` forces all
/// correct counters to agree in round `r+1`.
pub fn check_happy_convergence(trace: &Trace, from: u64) -> Result<(), Violation> {
    let recs: Vec<&RoundRecord> = records(trace).collect();
    for w in recs.windows(3) {
        let (prev, cur, next) = (w[0], w[1], w[2]);
        if cur.round < from {
            continue;
        }
        let happy = |rec: &RoundRecord, v: usize| rec.probes[v].and_then(|p| p.happy) == Some(true);
        let Some(v) = (0..trace.n).find(|&v| happy(prev, v) && happy(cur, v)) else { continue };
        let mut values = next.probes.iter().flatten().map(|p| p.raw_counter);
        let first = values.next().flatten();
        if !values.all(|x| x == first) {
            return Err(Violation {
                round: next.round,
                detail: format!("v{v} stayed happy through round {} but counters differ", cur.round),
            });
        }
    }
    Ok(())
}

/// First round from which every correct node is happy up to the horizon.
pub fn happy_since(trace: &Trace) -> Option<u64> {
    let all_happy = |rec: &RoundRecord| rec.probes.iter().flatten().all(|p| p.happy == Some(true));
    let recs: Vec<&RoundRecord> = records(trace).collect();
    let tail = recs.iter().rev().take_while(|r| all_happy(r)).count();
    (tail > 0).then(|| recs[recs.len() - tail].round)
}

/// First round from which all correct nodes are happy, agree and count.
pub fn silenced_since(trace: &Trace) -> Option<u64> {
    Some(trace.stabilisation().round()?.max(happy_since(trace)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowBits {
    pub windows: u64,
    pub max_bits: u64,
}

/// Bits each correct node broadcasts per aligned window of `kappa` rounds,
/// starting at round `from`.
///
/// A window opens with the message sent from a state whose counter is
/// `0 mod kappa`; round `r` carries the message sent from the state of round
/// `r - 1`. Only windows ending by the horizon count.
pub fn measure_post_stabilisation_bits(trace: &Trace, kappa: u32, from: u64) -> WindowBits {
    let recs: Vec<&RoundRecord> = records(trace).collect();
    let k = kappa as usize;
    let mut out = WindowBits { windows: 0, max_bits: 0 };
    for r in (from.max(1) as usize)..recs.len() {
        if r + k > recs.len() {
            break;
        }
        for v in 0..trace.n {
            let Some(a) = recs[r - 1].probes[v].and_then(|p| p.raw_counter) else { continue };
            if a % kappa != 0 {
                continue;
            }
            let bits: u64 = recs[r..r + k].iter().filter_map(|rec| rec.bits[v]).sum();
            out.windows += 1;
            out.max_bits = out.max_bits.max(bits);
        }
    }
    out
}
