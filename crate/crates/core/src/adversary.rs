use crate::node::NodeId;
use crate::protocol::Protocol;
use crate::rng::{derive, seeded_rng, SimRng};

/// What the adversary sees at the start of a round: every correct state.
pub struct View<'a, P: Protocol> {
    pub protocol: &'a P,
    pub round: u64,
    /// `None` for faulty nodes.
    pub states: &'a [Option<Vec<u32>>],
    pub faulty: &'a [bool],
}

impl<P: Protocol> View<'_, P> {
    pub fn correct(&self) -> impl Iterator<Item = (NodeId, &[u32])> + '_ {
        self.states.iter().enumerate().filter_map(|(i, s)| s.as_deref().map(|s| (NodeId(i), s)))
    }
}

/// Byzantine behaviour: the faulty set, all initial states, and every
/// message a faulty node sends, chosen per recipient.
pub trait Adversary<P: Protocol> {
    fn name(&self) -> String;

    /// Called once before round 1. At most `f` distinct nodes.
    fn select_faults(&mut self, p: &P) -> Vec<NodeId>;

    /// Initial state of `v` (correct nodes included).
    fn initial_state(&mut self, p: &P, v: NodeId) -> Vec<u32>;

    fn begin_round(&mut self, _view: &View<'_, P>) {}

    fn emit(&mut self, view: &View<'_, P>, sender: NodeId, recipient: NodeId) -> Option<P::Msg>;
}

/// No faulty nodes; initial states are random bit patterns.
pub struct FaultFree {
    rng: SimRng,
}

impl FaultFree {
    pub fn new(seed: u64) -> Self {
        FaultFree { rng: seeded_rng(derive(seed, &[0xFA17])) }
    }
}

impl<P: Protocol> Adversary<P> for FaultFree {
    fn name(&self) -> String {
        "fault-free".into()
    }

    fn select_faults(&mut self, _p: &P) -> Vec<NodeId> {
        Vec::new()
    }

    fn initial_state(&mut self, p: &P, v: NodeId) -> Vec<u32> {
        p.schema(v).random_state(&mut self.rng)
    }

    fn emit(&mut self, _view: &View<'_, P>, _sender: NodeId, _recipient: NodeId) -> Option<P::Msg> {
        None
    }
}
