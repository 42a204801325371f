//! Exhaustive exploration of every adversary choice on tiny instances.
//!
//! Reachable configurations are explored level by level with deduplication,
//! so the work is bounded by distinct configurations rather than by the
//! number of branches. The branch count is still estimated up front and
//! instances above the limit are refused.

use serde::Serialize;
use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;
use synccount_core::Tally;
use synccount_counters::{phase_king_update, Instruction, KingState, Thresholds};
use thiserror::Error;

/// Refusal threshold on enumerated branches.
pub const BRANCH_LIMIT: u64 = 100_000_000;

/// A finite system: a set of start configurations, a per-round choice set
/// for the adversary, and a property of the final configurations.
pub trait SmallModel {
    type Config: Clone + Eq + Hash + Debug;
    type Choice: Clone + Debug;

    fn rounds(&self) -> usize;
    fn initial(&self) -> Vec<Self::Config>;
    fn choices(&self, round: usize) -> Vec<Self::Choice>;
    fn step(&self, round: usize, config: &Self::Config, choice: &Self::Choice) -> Self::Config;
    fn holds(&self, config: &Self::Config) -> bool;

    /// Number of start configurations times every round's choice count.
    fn branches(&self) -> u64 {
        (0..self.rounds()).fold(self.initial().len() as u64, |acc, r| acc.saturating_mul(self.choices(r).len() as u64))
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("instance needs about {estimate} branches, above the limit of {limit}")]
pub struct TooLarge {
    pub estimate: u64,
    pub limit: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict<M: SmallModel> {
    AllHold,
    /// Start configuration followed by `(choice, resulting configuration)` per round.
    Counterexample { start: M::Config, steps: Vec<(M::Choice, M::Config)> },
}

impl<M: SmallModel> Verdict<M> {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::AllHold)
    }
}

type Parents<M> = HashMap<<M as SmallModel>::Config, Option<(<M as SmallModel>::Config, <M as SmallModel>::Choice)>>;

pub struct Exploration<M: SmallModel> {
    pub branches: u64,
    /// Reachable configurations after each round, round 0 first, with the
    /// predecessor and choice that first reached them.
    pub levels: Vec<Parents<M>>,
    pub verdict: Verdict<M>,
}

impl<M: SmallModel> Exploration<M> {
    pub fn reached(&self, round: usize, config: &M::Config) -> bool {
        self.levels.get(round).is_some_and(|l| l.contains_key(config))
    }
}

pub fn explore<M: SmallModel>(model: &M, limit: u64) -> Result<Exploration<M>, TooLarge> {
    let branches = model.branches();
    if branches > limit {
        return Err(TooLarge { estimate: branches, limit });
    }
    let mut levels: Vec<Parents<M>> = vec![model.initial().into_iter().map(|c| (c, None)).collect()];
    for r in 0..model.rounds() {
        let choices = model.choices(r);
        let mut next: Parents<M> = HashMap::new();
        for config in levels[r].keys() {
            for choice in &choices {
                next.entry(model.step(r, config, choice)).or_insert_with(|| Some((config.clone(), choice.clone())));
            }
        }
        levels.push(next);
    }
    let last = levels.len() - 1;
    let bad = levels[last].keys().find(|c| !model.holds(c)).cloned();
    let verdict = match bad {
        None => Verdict::AllHold,
        Some(mut config) => {
            let mut steps = Vec::new();
            for level in levels[1..].iter().rev() {
                let (prev, choice) = level[&config].clone().expect("non-initial level has parents");
                steps.push((choice, config));
                config = prev;
            }
            steps.reverse();
            Verdict::Counterexample { start: config, steps }
        }
    };
    Ok(Exploration { branches, levels, verdict })
}

/// What the phase-king instance checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum KingProperty {
    /// Three rounds of a correct king's instruction sets from any start end
    /// in agreement on a finite value with `b = 1`.
    Establish { king: usize },
    /// One round of arbitrary per-node clocks from agreement on `x` with
    /// `b = 1` ends in agreement on `x + 1` with `b = 1`.
    Persist { x: u32, tau: u32 },
}

/// Phase king on `n` nodes with a fixed faulty set.
///
/// Receivers read only the `a` field of messages, so faulty messages range
/// over `[c] ∪ {∞}` per recipient. A configuration lists `(a, b)` of the
/// correct nodes in index order.
#[derive(Clone, Debug)]
pub struct PhaseKingModel {
    pub n: usize,
    pub c: u32,
    pub faulty: Vec<usize>,
    pub thresholds: Thresholds,
    pub property: KingProperty,
    correct: Vec<usize>,
}

/// Adversary choice for one round: forged values indexed by
/// `[faulty][correct recipient]`, and each recipient's clock when clocks are
/// free.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KingChoice {
    pub forged: Vec<Vec<u32>>,
    pub clocks: Vec<u32>,
}

impl PhaseKingModel {
    pub fn new(n: usize, f: usize, c: u32, faulty: Vec<usize>, property: KingProperty) -> Self {
        let correct = (0..n).filter(|v| !faulty.contains(v)).collect();
        PhaseKingModel { n, c, faulty, thresholds: Thresholds::broadcast(n, f), property, correct }
    }

    pub fn with_thresholds(mut self, thresholds: Thresholds) -> Self {
        self.thresholds = thresholds;
        self
    }

    fn clock(&self, round: usize, recipient: usize, choice: &KingChoice) -> u32 {
        match self.property {
            KingProperty::Establish { king } => 3 * king as u32 + round as u32,
            KingProperty::Persist { .. } => choice.clocks[recipient],
        }
    }
}

/// All vectors of length `len` over `0..base`.
fn product(base: u32, len: usize) -> Vec<Vec<u32>> {
    (0..len).fold(vec![vec![]], |acc, _| {
        acc.into_iter().flat_map(|v| (0..base).map(move |x| [v.as_slice(), &[x]].concat())).collect()
    })
}

impl SmallModel for PhaseKingModel {
    type Config = Vec<KingState>;
    type Choice = KingChoice;

    fn rounds(&self) -> usize {
        match self.property {
            KingProperty::Establish { .. } => 3,
            KingProperty::Persist { .. } => 1,
        }
    }

    fn initial(&self) -> Vec<Vec<KingState>> {
        let m = self.correct.len();
        match self.property {
            KingProperty::Establish { .. } => product(2 * (self.c + 1), m)
                .into_iter()
                .map(|codes| codes.into_iter().map(|x| KingState { a: x / 2, b: x % 2 == 1 }).collect())
                .collect(),
            KingProperty::Persist { x, .. } => vec![vec![KingState { a: x, b: true }; m]],
        }
    }

    fn choices(&self, _round: usize) -> Vec<KingChoice> {
        let m = self.correct.len();
        let forged = product(self.c + 1, m * self.faulty.len());
        let clocks = match self.property {
            KingProperty::Establish { .. } => vec![vec![]],
            KingProperty::Persist { tau, .. } => product(tau, m),
        };
        forged
            .iter()
            .flat_map(|fv| {
                clocks.iter().map(move |cl| KingChoice { forged: fv.chunks(m.max(1)).map(<[u32]>::to_vec).collect(), clocks: cl.clone() })
            })
            .collect()
    }

    fn step(&self, round: usize, config: &Vec<KingState>, choice: &KingChoice) -> Vec<KingState> {
        let c = self.c;
        (0..self.correct.len())
            .map(|i| {
                let mut tally = Tally::new();
                for s in config {
                    tally.add(s.a, 1);
                }
                for row in &choice.forged {
                    tally.add(row[i], 1);
                }
                let (instr, k) = Instruction::at(self.clock(round, i, choice));
                let king = match self.faulty.iter().position(|&u| u == k) {
                    Some(j) => Some(choice.forged[j][i]),
                    None => self.correct.iter().position(|&u| u == k).map(|pos| config[pos].a),
                };
                phase_king_update(instr, config[i], &tally, king, self.thresholds, c)
            })
            .collect()
    }

    fn holds(&self, config: &Vec<KingState>) -> bool {
        match self.property {
            KingProperty::Establish { .. } => {
                config.iter().all(|s| s.b && s.a < self.c && s.a == config[0].a)
            }
            KingProperty::Persist { x, .. } => {
                config.iter().all(|s| *s == KingState { a: (x + 1) % self.c, b: true })
            }
        }
    }
}

/// Summary of one exhaustive run, for reports.
#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub instance: String,
    pub branches: u64,
    pub distinct_final: usize,
    pub holds: bool,
    pub witness: Option<String>,
}

pub fn report<M: SmallModel>(instance: impl Into<String>, e: &Exploration<M>) -> OracleReport {
    OracleReport {
        instance: instance.into(),
        branches: e.branches,
        distinct_final: e.levels.last().map_or(0, HashMap::len),
        holds: e.verdict.holds(),
        witness: match &e.verdict {
            Verdict::AllHold => None,
            Verdict::Counterexample { start, steps } => Some(format!("{start:?} -> {steps:?}")),
        },
    }
}

/// Every instance of the two phase-king properties on 4 nodes, 1 fault,
/// period 2: each faulty position, and each correct king among the first
/// `f + 2` nodes.
pub fn phase_king_suite(thresholds: Option<Thresholds>) -> Result<Vec<OracleReport>, TooLarge> {
    let (n, f, c) = (4, 1, 2);
    let tau = 3 * (f as u32 + 2);
    let mut out = Vec::new();
    for faulty in 0..n {
        let mut models: Vec<(String, PhaseKingModel)> = Vec::new();
        for king in (0..f + 2).filter(|&k| k != faulty) {
            let prop = KingProperty::Establish { king };
            models.push((format!("establish faulty={faulty} king={king}"), PhaseKingModel::new(n, f, c, vec![faulty], prop)));
        }
        for x in 0..c {
            let prop = KingProperty::Persist { x, tau };
            models.push((format!("persist faulty={faulty} x={x}"), PhaseKingModel::new(n, f, c, vec![faulty], prop)));
        }
        for (name, mut m) in models {
            if let Some(th) = thresholds {
                m = m.with_thresholds(th);
            }
            out.push(report(name, &explore(&m, BRANCH_LIMIT)?));
        }
    }
    Ok(out)
}
