use crate::node::NodeId;
use crate::schema::Schema;
use rand::RngCore;
use serde::{Deserialize, Serialize};
use std::ops::Range;

/// Per-step context handed to a transition.
///
/// Randomised protocols derive their streams from `(seed, node, round)`; the
/// transition reports how many messages it pulled.
#[derive(Clone, Debug)]
pub struct StepCtx {
    pub round: u64,
    pub seed: u64,
    pub pulls: u64,
}

impl StepCtx {
    pub fn new(round: u64, seed: u64) -> Self {
        StepCtx { round, seed, pulls: 0 }
    }
}

/// Diagnostic view of a node's state, recorded per round for trace checks.
///
/// Fields a protocol does not have stay `None`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Probe {
    /// Top-level observed block counters (`None` = bottom).
    pub block_view: [Option<u32>; 2],
    /// Top-level clock driving the phase-king instructions.
    pub clock: Option<u32>,
    /// Raw phase-king value, with `c` standing for infinity.
    pub raw_counter: Option<u32>,
    pub happy: Option<bool>,
    pub cooldown: Option<u32>,
}

/// A synchronous counting algorithm over packed states.
///
/// States are word vectors laid out by [`Protocol::schema`]. Messages are an
/// associated type so that broadcast-of-state and compressed bit streams share
/// one engine.
pub trait Protocol: Send + Sync {
    type Msg: Clone + Send + Sync + std::fmt::Debug;

    fn name(&self) -> String;
    fn n(&self) -> usize;
    fn f(&self) -> usize;
    /// Output period.
    fn c(&self) -> u32;

    fn schema(&self, v: NodeId) -> &Schema;

    /// Bits to store one node's state (widest node).
    fn state_bits(&self) -> u32 {
        (0..self.n()).map(|v| self.schema(NodeId(v)).width()).max().unwrap_or(0)
    }

    fn message(&self, v: NodeId, state: &[u32]) -> Self::Msg;
    fn message_bits(&self, sender: NodeId, msg: &Self::Msg) -> u64;
    fn max_message_bits(&self) -> u64;
    /// Whether `msg` belongs to the message alphabet of `sender`.
    fn check_message(&self, sender: NodeId, msg: &Self::Msg) -> Result<(), String>;
    /// A uniformly random bit pattern mapped through the decoder.
    fn garbage(&self, sender: NodeId, rng: &mut dyn RngCore) -> Self::Msg;

    /// New state of `v`. `inbox[u]` is what `v` received from `u`; `None`
    /// means nothing arrived.
    fn transition(&self, v: NodeId, state: &[u32], inbox: &[Option<&Self::Msg>], ctx: &mut StepCtx) -> Vec<u32>;

    fn output(&self, v: NodeId, state: &[u32]) -> u32;

    fn probe(&self, _v: NodeId, _state: &[u32]) -> Probe {
        Probe::default()
    }

    /// Top-level block partition, if the protocol has one.
    fn top_blocks(&self) -> Option<[Range<usize>; 2]> {
        None
    }
}
