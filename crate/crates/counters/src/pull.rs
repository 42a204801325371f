//! How a node gathers the messages it reads.
//!
//! In the broadcast model every message arrives and weighs one. A pulling
//! model instead draws a multiset of senders; the weight of a sender is the
//! number of times it was drawn.

use crate::phase_king::Thresholds;
use synccount_core::StepCtx;

/// Which vote a draw feeds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Site {
    /// Observing the counter outputs of block `j`.
    Block(usize),
    /// Majority votes and the phase king's tallies, over all nodes.
    All,
    /// Followers observing their core.
    Core,
}

impl Site {
    pub fn code(self) -> u64 {
        match self {
            Site::Block(j) => j as u64,
            Site::All => 2,
            Site::Core => 3,
        }
    }
}

/// Identifies one draw: the drawing node (global index), the construction
/// level, and the round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DrawKey {
    pub node: usize,
    pub level: usize,
    pub site: Site,
}

pub trait Pull: Send + Sync {
    /// Fill `out` with one weight per member of a population of size `pop`.
    fn draw(&self, key: DrawKey, pop: usize, ctx: &mut StepCtx, out: &mut Vec<u32>);

    /// Account for reading the king's message.
    fn pull_king(&self, _ctx: &mut StepCtx) {}

    /// Vote thresholds at a level with `n` nodes and resilience `f`.
    fn thresholds(&self, n: usize, f: usize) -> Thresholds;

    fn label(&self) -> String;
}

/// Everyone hears everyone. Every message read counts as one pull; the
/// king's message is among them.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Broadcast;

impl Pull for Broadcast {
    fn draw(&self, _key: DrawKey, pop: usize, ctx: &mut StepCtx, out: &mut Vec<u32>) {
        out.clear();
        out.resize(pop, 1);
        ctx.pulls += pop as u64;
    }

    fn thresholds(&self, n: usize, f: usize) -> Thresholds {
        Thresholds::broadcast(n, f)
    }

    fn label(&self) -> String {
        "broadcast".into()
    }
}
