//! Broadcast, receive, update.

use crate::adversary::{Adversary, View};
use crate::error::SimFault;
use crate::node::NodeId;
use crate::protocol::{Probe, Protocol, StepCtx};
use crate::stabilise::{detect_stabilization, Stabilisation};
use serde::{Deserialize, Serialize};

/// Correct-node states at a round; faulty entries are `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    pub round: u64,
    pub states: Vec<Option<Vec<u32>>>,
}

/// Everything observable about one round for correct nodes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: u64,
    pub outputs: Vec<Option<u32>>,
    /// Bits broadcast during this round (absent for round 0).
    pub bits: Vec<Option<u64>>,
    pub pulls: Vec<Option<u64>>,
    pub probes: Vec<Option<Probe>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub states: Option<Vec<Option<Vec<u32>>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub protocol: String,
    pub adversary: String,
    pub n: usize,
    pub f: usize,
    pub c: u32,
    pub seed: u64,
    pub faulty: Vec<NodeId>,
    /// Round 0: the adversary-chosen initial configuration.
    pub initial: RoundRecord,
    /// Rounds `1..=horizon`.
    pub rounds: Vec<RoundRecord>,
}

impl Trace {
    pub fn horizon(&self) -> u64 {
        self.rounds.len() as u64
    }

    /// Output rows indexed by round, starting at round 0.
    pub fn output_rows(&self) -> Vec<&[Option<u32>]> {
        std::iter::once(&self.initial).chain(&self.rounds).map(|r| r.outputs.as_slice()).collect()
    }

    pub fn record(&self, round: u64) -> Option<&RoundRecord> {
        if round == 0 {
            Some(&self.initial)
        } else {
            self.rounds.get(round as usize - 1)
        }
    }

    pub fn stabilisation(&self) -> Stabilisation {
        detect_stabilization(&self.output_rows(), self.c)
    }

    pub fn correct(&self) -> Vec<NodeId> {
        (0..self.n).map(NodeId).filter(|v| !self.faulty.contains(v)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOptions {
    pub horizon: u64,
    pub seed: u64,
    pub keep_states: bool,
}

impl RunOptions {
    pub fn new(horizon: u64, seed: u64) -> Self {
        RunOptions { horizon, seed, keep_states: false }
    }
}

fn check_outgoing<P: Protocol>(
    p: &P,
    round: u64,
    sender: NodeId,
    recipient: NodeId,
    msg: &P::Msg,
) -> Result<(), SimFault> {
    let bits = p.message_bits(sender, msg);
    let limit = p.max_message_bits();
    if bits > limit {
        return Err(SimFault::Oversized { round, sender, recipient, bits, limit });
    }
    p.check_message(sender, msg).map_err(|why| SimFault::Alphabet { round, sender, recipient, why })
}

/// One lockstep round from `config`.
pub fn step_round<P: Protocol, A: Adversary<P> + ?Sized>(
    p: &P,
    config: &Configuration,
    adversary: &mut A,
    faulty: &[bool],
    seed: u64,
    keep_states: bool,
) -> Result<(Configuration, RoundRecord), SimFault> {
    let n = p.n();
    let round = config.round + 1;
    let view = View { protocol: p, round, states: &config.states, faulty };
    adversary.begin_round(&view);

    let honest: Vec<Option<P::Msg>> = config
        .states
        .iter()
        .enumerate()
        .map(|(v, s)| s.as_deref().map(|s| p.message(NodeId(v), s)))
        .collect();

    // forged[u][v]: what faulty u sends to correct v
    let mut forged: Vec<Vec<Option<P::Msg>>> = vec![Vec::new(); n];
    for u in (0..n).filter(|&u| faulty[u]) {
        let row = (0..n)
            .map(|v| {
                if faulty[v] {
                    return Ok(None);
                }
                let m = adversary.emit(&view, NodeId(u), NodeId(v));
                if let Some(m) = &m {
                    check_outgoing(p, round, NodeId(u), NodeId(v), m)?;
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>, SimFault>>()?;
        forged[u] = row;
    }

    let mut states = vec![None; n];
    let mut rec = RoundRecord {
        round,
        outputs: vec![None; n],
        bits: vec![None; n],
        pulls: vec![None; n],
        probes: vec![None; n],
        states: None,
    };
    let mut inbox: Vec<Option<&P::Msg>> = Vec::with_capacity(n);
    for v in 0..n {
        let Some(old) = config.states[v].as_deref() else { continue };
        inbox.clear();
        inbox.extend((0..n).map(|u| if faulty[u] { forged[u][v].as_ref() } else { honest[u].as_ref() }));
        let mut ctx = StepCtx::new(round, seed);
        let node = NodeId(v);
        let new = p.transition(node, old, &inbox, &mut ctx);
        p.schema(node).check(&new).map_err(|why| SimFault::IllegalState { node, why })?;
        rec.outputs[v] = Some(p.output(node, &new));
        rec.probes[v] = Some(p.probe(node, &new));
        rec.bits[v] = honest[v].as_ref().map(|m| p.message_bits(node, m));
        rec.pulls[v] = Some(ctx.pulls);
        states[v] = Some(new);
    }
    if keep_states {
        rec.states = Some(states.clone());
    }
    Ok((Configuration { round, states }, rec))
}

fn initial_record<P: Protocol>(p: &P, config: &Configuration, keep_states: bool) -> RoundRecord {
    let n = p.n();
    let each = |g: &dyn Fn(NodeId, &[u32]) -> u32| -> Vec<Option<u32>> {
        (0..n).map(|v| config.states[v].as_deref().map(|s| g(NodeId(v), s))).collect()
    };
    RoundRecord {
        round: 0,
        outputs: each(&|v, s| p.output(v, s)),
        bits: vec![None; n],
        pulls: vec![None; n],
        probes: (0..n).map(|v| config.states[v].as_deref().map(|s| p.probe(NodeId(v), s))).collect(),
        states: keep_states.then(|| config.states.clone()),
    }
}

/// Adversary's faulty set and initial configuration, validated.
pub fn initialise<P: Protocol, A: Adversary<P> + ?Sized>(
    p: &P,
    adversary: &mut A,
) -> Result<(Vec<NodeId>, Vec<bool>, Configuration), SimFault> {
    let n = p.n();
    let mut faults = adversary.select_faults(p);
    faults.sort();
    faults.dedup();
    if faults.len() > p.f() {
        return Err(SimFault::TooManyFaults { got: faults.len(), f: p.f() });
    }
    let mut faulty = vec![false; n];
    for &u in &faults {
        if u.0 >= n {
            return Err(SimFault::UnknownNode(u));
        }
        faulty[u.0] = true;
    }
    let mut states = Vec::with_capacity(n);
    for (v, &is_faulty) in faulty.iter().enumerate() {
        let node = NodeId(v);
        let s = adversary.initial_state(p, node);
        p.schema(node).check(&s).map_err(|why| SimFault::IllegalState { node, why })?;
        states.push((!is_faulty).then_some(s));
    }
    Ok((faults, faulty, Configuration { round: 0, states }))
}

/// Iterate [`step_round`] for `horizon` rounds from adversary-chosen initial states.
pub fn run_execution<P: Protocol, A: Adversary<P> + ?Sized>(
    p: &P,
    adversary: &mut A,
    opts: RunOptions,
) -> Result<Trace, SimFault> {
    let (faults, faulty, mut config) = initialise(p, adversary)?;
    let initial = initial_record(p, &config, opts.keep_states);
    let mut rounds = Vec::with_capacity(opts.horizon as usize);
    for _ in 0..opts.horizon {
        let (next, rec) = step_round(p, &config, adversary, &faulty, opts.seed, opts.keep_states)?;
        rounds.push(rec);
        config = next;
    }
    Ok(Trace {
        protocol: p.name(),
        adversary: adversary.name(),
        n: p.n(),
        f: p.f(),
        c: p.c(),
        seed: opts.seed,
        faulty: faults,
        initial,
        rounds,
    })
}
