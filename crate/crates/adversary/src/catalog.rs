use rand::seq::index::sample;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use synccount_core::rng::{derive, seeded_rng, SimRng};
use synccount_core::{Adversary, FieldKind, NodeId, Protocol, Schema, Tally, View};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Crashed from round 0.
    Silent,
    /// A fresh random state per recipient.
    RandomBytes,
    /// A correct node's state to half the recipients, a shifted copy to the rest.
    Equivocator,
    /// Per field, the runner-up value among correct nodes.
    AntiMajority,
    /// Counters just off the majority, cooldowns expired, flags set.
    ResetSpammer,
    /// All faults in one top-level block, equivocating.
    BlockKiller,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Silent,
        Strategy::RandomBytes,
        Strategy::Equivocator,
        Strategy::AntiMajority,
        Strategy::ResetSpammer,
        Strategy::BlockKiller,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Silent => "silent",
            Strategy::RandomBytes => "random-bytes",
            Strategy::Equivocator => "equivocator",
            Strategy::AntiMajority => "anti-majority",
            Strategy::ResetSpammer => "reset-spammer",
            Strategy::BlockKiller => "block-killer",
        }
    }

    fn code(self) -> u64 {
        Self::ALL.iter().position(|&s| s == self).unwrap() as u64
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("unknown adversary strategy {0:?}")]
pub struct UnknownStrategy(pub String);

impl FromStr for Strategy {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| UnknownStrategy(s.to_string()))
    }
}

/// Fixed key for oblivious fault sets, so they never depend on the run seed.
const OBLIVIOUS_KEY: u64 = 0x0b11_7105;

/// Per-field statistics over the correct members of one schema group.
#[derive(Clone, Debug, Default)]
struct FieldStats {
    mode: u32,
    runner_up: Option<u32>,
}

/// A catalog strategy bound to a seed.
///
/// Adaptive by default: the faulty set is drawn from the seed and messages
/// read every correct state. With `oblivious` the faulty set is fixed before
/// any seed-derived data exists.
pub struct Catalog {
    strategy: Strategy,
    oblivious: bool,
    seed: u64,
    rng: SimRng,
    /// Nodes sharing a state layout.
    group: Vec<usize>,
    /// Lowest correct member of each group, refreshed per round.
    template: Vec<Option<usize>>,
    stats: Vec<Vec<FieldStats>>,
}

impl Catalog {
    pub fn new(strategy: Strategy, seed: u64) -> Self {
        Catalog {
            strategy,
            oblivious: false,
            seed,
            rng: seeded_rng(derive(seed, &[0xAD5, strategy.code()])),
            group: Vec::new(),
            template: Vec::new(),
            stats: Vec::new(),
        }
    }

    pub fn oblivious(mut self, yes: bool) -> Self {
        self.oblivious = yes;
        self
    }

    pub fn is_oblivious(&self) -> bool {
        self.oblivious
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    fn group_nodes<P: Protocol>(&mut self, p: &P) {
        let mut reps: Vec<&Schema> = Vec::new();
        self.group = (0..p.n())
            .map(|v| {
                let s = p.schema(NodeId(v));
                reps.iter().position(|r| *r == s).unwrap_or_else(|| {
                    reps.push(s);
                    reps.len() - 1
                })
            })
            .collect();
    }

    fn forge_shifted(&self, schema: &Schema, base: &[u32], recipient: NodeId) -> Vec<u32> {
        if recipient.index().is_multiple_of(2) {
            return base.to_vec();
        }
        schema
            .fields()
            .iter()
            .zip(base)
            .map(|(field, &x)| match field.kind {
                FieldKind::Flag => 1 - x,
                FieldKind::Counter { .. } | FieldKind::Marked { .. } => (x + 1) % field.range,
                FieldKind::Cooldown { .. } | FieldKind::Aux => x,
            })
            .collect()
    }

    fn forge_against(&self, schema: &Schema, g: usize) -> Vec<u32> {
        schema
            .fields()
            .iter()
            .zip(&self.stats[g])
            .map(|(field, st)| match field.kind {
                FieldKind::Flag => 1 - st.mode,
                _ => st.runner_up.unwrap_or((st.mode + 1) % field.range),
            })
            .collect()
    }

    fn forge_near_miss(&self, schema: &Schema, g: usize, recipient: NodeId) -> Vec<u32> {
        let odd = recipient.index() % 2 == 1;
        schema
            .fields()
            .iter()
            .zip(&self.stats[g])
            .map(|(field, st)| match field.kind {
                FieldKind::Flag => 1,
                FieldKind::Cooldown { .. } => 0,
                FieldKind::Counter { .. } | FieldKind::Marked { .. } => {
                    let shift = if odd { field.range - 1 } else { 2 };
                    (st.mode + shift) % field.range
                }
                FieldKind::Aux => st.mode,
            })
            .collect()
    }
}

impl<P: Protocol> Adversary<P> for Catalog {
    fn name(&self) -> String {
        if self.oblivious {
            format!("{}/oblivious", self.strategy)
        } else {
            self.strategy.to_string()
        }
    }

    fn select_faults(&mut self, p: &P) -> Vec<NodeId> {
        self.group_nodes(p);
        let (n, f) = (p.n(), p.f());
        let key = if self.oblivious { OBLIVIOUS_KEY } else { self.seed };
        let mut rng = seeded_rng(derive(key, &[0xFA, self.strategy.code(), n as u64, f as u64]));
        let pool: Vec<usize> = match (self.strategy, p.top_blocks()) {
            (Strategy::BlockKiller, Some([_, top])) => top.collect(),
            _ => (0..n).collect(),
        };
        let k = f.min(pool.len());
        let mut picked: Vec<NodeId> = sample(&mut rng, pool.len(), k).into_iter().map(|i| NodeId(pool[i])).collect();
        picked.sort();
        picked
    }

    fn initial_state(&mut self, p: &P, v: NodeId) -> Vec<u32> {
        p.schema(v).random_state(&mut self.rng)
    }

    fn begin_round(&mut self, view: &View<'_, P>) {
        if matches!(self.strategy, Strategy::Silent | Strategy::RandomBytes) {
            return;
        }
        let groups = self.group.iter().copied().max().map_or(0, |g| g + 1);
        self.template = vec![None; groups];
        let mut tallies: Vec<Vec<Tally>> = vec![Vec::new(); groups];
        for (v, state) in view.correct() {
            let g = self.group[v.index()];
            self.template[g].get_or_insert(v.index());
            let t = &mut tallies[g];
            if t.is_empty() {
                t.resize(state.len(), Tally::new());
            }
            for (tally, &x) in t.iter_mut().zip(state) {
                tally.add(x, 1);
            }
        }
        self.stats = tallies
            .into_iter()
            .map(|fields| {
                fields
                    .into_iter()
                    .map(|t| {
                        let mode = t.mode().unwrap_or(0);
                        let runner_up = t
                            .iter()
                            .filter(|&(x, _)| x != mode)
                            .max_by_key(|&(x, c)| (c, std::cmp::Reverse(x)))
                            .map(|(x, _)| x);
                        FieldStats { mode, runner_up }
                    })
                    .collect()
            })
            .collect();
    }

    fn emit(&mut self, view: &View<'_, P>, sender: NodeId, recipient: NodeId) -> Option<P::Msg> {
        let p = view.protocol;
        let schema = p.schema(sender);
        let g = self.group[sender.index()];
        let has_stats = self.stats.get(g).is_some_and(|s| !s.is_empty());
        let state = match self.strategy {
            Strategy::Silent => return None,
            Strategy::RandomBytes => return Some(p.garbage(sender, &mut self.rng)),
            Strategy::Equivocator | Strategy::BlockKiller => match self.template.get(g).copied().flatten() {
                Some(t) => self.forge_shifted(schema, view.states[t].as_deref()?, recipient),
                None => return Some(p.garbage(sender, &mut self.rng)),
            },
            Strategy::AntiMajority if has_stats => self.forge_against(schema, g),
            Strategy::ResetSpammer if has_stats => self.forge_near_miss(schema, g, recipient),
            Strategy::AntiMajority | Strategy::ResetSpammer => return Some(p.garbage(sender, &mut self.rng)),
        };
        Some(p.message(sender, &state))
    }
}
