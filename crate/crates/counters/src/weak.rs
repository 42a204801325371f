//! Weak counters: observe each block's counter, vote on it, and derive the
//! phase-king clock.

use crate::params::BoostParams;
use serde::{Deserialize, Serialize};
use synccount_core::Tally;

/// Weak-counter variables of one block at one node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeakBlock {
    /// Most frequent observed block output.
    pub observed: u32,
    /// Majority vote on last round's observations; `None` is a failed vote.
    pub vote: Option<u32>,
    pub cooldown: u32,
}

/// One weak-counter update for a block with period `period`.
///
/// `outputs` tallies the block members' counter outputs, `claims` tallies all
/// nodes' previous observations. `strong` is the vote threshold.
pub fn weak_update(p: &BoostParams, period: u32, prev: WeakBlock, outputs: &Tally, claims: &Tally, strong: u32) -> WeakBlock {
    let observed = outputs.mode().unwrap_or(0);
    let vote = claims.first_reaching(strong).filter(|&v| v < period);
    let consistent = matches!((prev.vote, vote), (Some(old), Some(new)) if new == (old + 1) % period);
    let cooldown = if consistent { prev.cooldown.saturating_sub(1) } else { p.cooldown_max() };
    WeakBlock { observed, vote, cooldown }
}

/// Clock and leader pointer derived from both blocks' votes and cooldowns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeaderView {
    /// Vote value once the cooldown has expired.
    pub settled: [Option<u32>; 2],
    pub pointers: [Option<usize>; 2],
    pub leader: Option<usize>,
    /// Phase-king clock in `[tau]`.
    pub clock: u32,
}

pub fn derive_leader(p: &BoostParams, own_block: usize, blocks: [WeakBlock; 2]) -> LeaderView {
    let settled = blocks.map(|b| if b.cooldown == 0 { b.vote } else { None });
    let pointers = [0, 1].map(|i| settled[i].map(|d| (d / p.pointer_span(i)) as usize));
    let leader = pointers[own_block].or(pointers[1 - own_block]);
    // A pointer may name a block whose own vote has not settled; the clock
    // then idles at zero like an undefined pointer.
    let clock = leader.and_then(|l| settled[l]).map_or(0, |d| d % p.tau);
    LeaderView { settled, pointers, leader, clock }
}
