//! Construction trees and the per-node update they induce.
//!
//! A node's state is the concatenation of the boost headers along its path
//! from the root, followed by the state of the leaf it sits in. A sender's
//! message is its full state, so at each level the receiver strips one header
//! and hands the remainder to the child that the sender belongs to.

use crate::constants::{FOLLOWER_DELAY, KAPPA_BOOST};
use crate::params::BoostParams;
use crate::phase_king::{inc, phase_king_update, Instruction, KingState};
use crate::pull::{DrawKey, Pull, Site};
use crate::weak::{derive_leader, weak_update, LeaderView, WeakBlock};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use synccount_core::{Field, Probe, Schema, StepCtx, Tally};

/// Header word indices of a boost level.
pub mod hdr {
    pub const A: usize = 0;
    pub const B: usize = 1;
    pub const OBSERVED: [usize; 2] = [2, 3];
    pub const VOTE: [usize; 2] = [4, 5];
    pub const COOLDOWN: [usize; 2] = [6, 7];
    pub const LEN: usize = 8;
}

pub(crate) type Inbox<'a> = SmallVec<[Option<&'a [u32]>; 32]>;

#[derive(Clone, Debug, PartialEq)]
pub enum Tree {
    /// A single node counting locally.
    Trivial { c: u32 },
    /// The first `core.n()` nodes run `core`; the rest copy its majority.
    Followers { core: Box<Tree>, n: usize, level: usize },
    Boost { params: BoostParams, children: Box<[Tree; 2]>, level: usize },
}

/// What a step needs besides the node's own state and inbox.
pub struct Env<'a> {
    pub pull: &'a dyn Pull,
    pub ctx: &'a mut StepCtx,
    /// Global index of local node 0 at the current level.
    pub base: usize,
}

impl Env<'_> {
    fn draw(&mut self, v: usize, level: usize, site: Site, pop: usize) -> Vec<u32> {
        let mut out = Vec::with_capacity(pop);
        let key = DrawKey { node: self.base + v, level, site };
        self.pull.draw(key, pop, self.ctx, &mut out);
        out
    }
}

impl Tree {
    pub fn n(&self) -> usize {
        match self {
            Tree::Trivial { .. } => 1,
            Tree::Followers { n, .. } => *n,
            Tree::Boost { params, .. } => params.n,
        }
    }

    pub fn f(&self) -> usize {
        match self {
            Tree::Trivial { .. } => 0,
            Tree::Followers { core, .. } => core.f(),
            Tree::Boost { params, .. } => params.f,
        }
    }

    pub fn c(&self) -> u32 {
        match self {
            Tree::Trivial { c } => *c,
            Tree::Followers { core, .. } => core.c(),
            Tree::Boost { params, .. } => params.c,
        }
    }

    /// Number levels in pre-order starting at `next`.
    pub(crate) fn renumber(&mut self, next: &mut usize) {
        match self {
            Tree::Trivial { .. } => {}
            Tree::Followers { core, level, .. } => {
                *level = *next;
                *next += 1;
                core.renumber(next);
            }
            Tree::Boost { children, level, .. } => {
                *level = *next;
                *next += 1;
                children[0].renumber(next);
                children[1].renumber(next);
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Tree::Trivial { .. } => 1,
            Tree::Followers { core, .. } => core.depth(),
            Tree::Boost { children, .. } => 1 + children[0].depth().max(children[1].depth()),
        }
    }

    pub fn schema(&self, v: usize) -> Schema {
        match self {
            Tree::Trivial { c } => Schema::new(vec![Field::counter("count", *c)]),
            Tree::Followers { core, n, .. } => {
                debug_assert!(v < *n);
                if v < core.n() {
                    core.schema(v)
                } else {
                    Schema::new(vec![Field::counter("latch", core.c())])
                }
            }
            Tree::Boost { params: p, children, .. } => {
                let j = p.block_of(v);
                header_schema(p).concat(&children[j].schema(v - p.block_offset(j)))
            }
        }
    }

    pub fn output(&self, v: usize, state: &[u32]) -> u32 {
        match self {
            Tree::Trivial { .. } => state[0],
            Tree::Followers { core, .. } => {
                if v < core.n() {
                    core.output(v, state)
                } else {
                    state[0]
                }
            }
            Tree::Boost { params, .. } => {
                let a = state[hdr::A];
                if a >= params.c {
                    0
                } else {
                    a
                }
            }
        }
    }

    /// Analytic stabilisation time bound in rounds.
    pub fn time_bound(&self) -> u64 {
        match self {
            Tree::Trivial { .. } => 0,
            Tree::Followers { core, .. } => core.time_bound() + FOLLOWER_DELAY,
            Tree::Boost { params, children, .. } => {
                children[0].time_bound().max(children[1].time_bound()) + boost_overhead(params.tau)
            }
        }
    }

    /// Bits of the widest node state.
    pub fn state_bits(&self) -> u32 {
        match self {
            Tree::Trivial { c } => Field::counter("count", *c).width(),
            Tree::Followers { core, .. } => core.state_bits().max(Field::counter("latch", core.c()).width()),
            Tree::Boost { params, children, .. } => {
                header_schema(params).width() + children[0].state_bits().max(children[1].state_bits())
            }
        }
    }

    /// Append `v`'s next state to `out`.
    pub fn step(&self, v: usize, state: &[u32], inbox: &[Option<&[u32]>], env: &mut Env<'_>, out: &mut Vec<u32>) {
        match self {
            Tree::Trivial { c } => out.push((state[0] + 1) % c),
            Tree::Followers { core, level, .. } => {
                let core_n = core.n();
                if v < core_n {
                    core.step(v, state, &inbox[..core_n], env, out);
                    return;
                }
                let weights = env.draw(v, *level, Site::Core, core_n);
                let mut seen = Tally::new();
                for (u, (msg, &w)) in inbox[..core_n].iter().zip(&weights).enumerate() {
                    if let Some(msg) = msg {
                        seen.add(core.output(u, msg), w);
                    }
                }
                let c = core.c();
                out.push(inc(seen.mode().unwrap_or(state[0]), c));
            }
            Tree::Boost { params: p, level, .. } => {
                let all = env.draw(v, *level, Site::All, p.n);
                let clock = self.leader_view(v, state).map_or(0, |l| l.clock);
                let start = out.len();
                self.step_lower(v, state, inbox, &all, env, out);
                let th = env.pull.thresholds(p.n, p.f);
                let mut tally = Tally::new();
                for (msg, &w) in inbox.iter().zip(&all) {
                    if let Some(msg) = msg {
                        tally.add(msg[hdr::A], w);
                    }
                }
                let (instr, k) = Instruction::at(clock);
                env.pull.pull_king(env.ctx);
                let king = inbox[k].map(|m| m[hdr::A]);
                let own = KingState { a: state[hdr::A], b: state[hdr::B] == 1 };
                let next = phase_king_update(instr, own, &tally, king, th, p.c);
                out[start + hdr::A] = next.a;
                out[start + hdr::B] = u32::from(next.b);
            }
        }
    }

    /// Boost-level update of everything except the phase king: the weak
    /// counters and the child counter. `a` and `b` are copied unchanged.
    ///
    /// `all` weighs every sender for the majority votes. Panics on non-boost trees.
    pub fn step_lower(
        &self,
        v: usize,
        state: &[u32],
        inbox: &[Option<&[u32]>],
        all: &[u32],
        env: &mut Env<'_>,
        out: &mut Vec<u32>,
    ) {
        let Tree::Boost { params: p, children, level } = self else {
            panic!("step_lower on a tree without a boost root");
        };
        let start = out.len();
        out.extend_from_slice(&state[..hdr::LEN]);
        let th = env.pull.thresholds(p.n, p.f);
        let blocks = weak_blocks(p, state);
        for j in 0..2 {
            let off = p.block_offset(j);
            let nj = p.block_size(j);
            let weights = env.draw(v, *level, Site::Block(j), nj);
            let mut outputs = Tally::new();
            for (u, (msg, &w)) in inbox[off..off + nj].iter().zip(&weights).enumerate() {
                if let Some(msg) = msg {
                    outputs.add(children[j].output(u, &msg[hdr::LEN..]), w);
                }
            }
            let mut claims = Tally::new();
            for (msg, &w) in inbox.iter().zip(all) {
                if let Some(msg) = msg {
                    claims.add(msg[hdr::OBSERVED[j]], w);
                }
            }
            let period = p.block_period(j);
            let next = weak_update(p, period, blocks[j], &outputs, &claims, th.strong);
            out[start + hdr::OBSERVED[j]] = next.observed;
            out[start + hdr::VOTE[j]] = next.vote.unwrap_or(period);
            out[start + hdr::COOLDOWN[j]] = next.cooldown;
        }
        let j = p.block_of(v);
        let off = p.block_offset(j);
        let child_inbox: Inbox<'_> =
            inbox[off..off + p.block_size(j)].iter().map(|m| m.map(|m| &m[hdr::LEN..])).collect();
        let saved = env.base;
        env.base += off;
        children[j].step(v - off, &state[hdr::LEN..], &child_inbox, env, out);
        env.base = saved;
    }

    /// Leader view of a boost root, from the votes and cooldowns in `state`.
    pub fn leader_view(&self, v: usize, state: &[u32]) -> Option<LeaderView> {
        match self {
            Tree::Boost { params: p, .. } => Some(derive_leader(p, p.block_of(v), weak_blocks(p, state))),
            _ => None,
        }
    }

    pub fn probe(&self, v: usize, state: &[u32]) -> Probe {
        match self {
            Tree::Boost { params: p, .. } => {
                let blocks = weak_blocks(p, state);
                let view = derive_leader(p, p.block_of(v), blocks);
                Probe {
                    block_view: view.settled,
                    clock: Some(view.clock),
                    raw_counter: Some(state[hdr::A]),
                    happy: None,
                    cooldown: Some(blocks[0].cooldown.max(blocks[1].cooldown)),
                }
            }
            _ => Probe::default(),
        }
    }

    pub fn report(&self) -> TreeReport {
        let (kind, params, children) = match self {
            Tree::Trivial { .. } => ("trivial", None, vec![]),
            Tree::Followers { core, .. } => ("followers", None, vec![core.report()]),
            Tree::Boost { params, children, .. } => {
                ("boost", Some(*params), vec![children[0].report(), children[1].report()])
            }
        };
        TreeReport {
            kind: kind.into(),
            n: self.n(),
            f: self.f(),
            c: self.c(),
            params,
            time_bound: self.time_bound(),
            state_bits: self.state_bits(),
            children,
        }
    }
}

/// Rounds a boost level adds on top of its slowest child: `31 tau + 6`.
pub fn boost_overhead(tau: u32) -> u64 {
    use crate::constants::{COOLDOWN_PERIODS, LEADER_WINDOW_PERIODS, PHASE_KING_SLACK, VOTE_SETTLE_ROUNDS};
    let tau = u64::from(tau);
    let c1 = 6 * tau;
    let overhead = VOTE_SETTLE_ROUNDS + (COOLDOWN_PERIODS + LEADER_WINDOW_PERIODS) * c1 + tau + PHASE_KING_SLACK;
    debug_assert!(overhead <= KAPPA_BOOST * tau);
    overhead
}

pub fn header_schema(p: &BoostParams) -> Schema {
    Schema::new(vec![
        Field::marked("a", p.c),
        Field::flag("b"),
        Field::counter("observed0", p.c0),
        Field::counter("observed1", p.c1),
        Field::marked("vote0", p.c0),
        Field::marked("vote1", p.c1),
        Field::cooldown("cooldown0", p.cooldown_max()),
        Field::cooldown("cooldown1", p.cooldown_max()),
    ])
}

pub fn weak_blocks(p: &BoostParams, state: &[u32]) -> [WeakBlock; 2] {
    [0, 1].map(|j| {
        let vote = state[hdr::VOTE[j]];
        WeakBlock {
            observed: state[hdr::OBSERVED[j]],
            vote: (vote < p.block_period(j)).then_some(vote),
            cooldown: state[hdr::COOLDOWN[j]],
        }
    })
}

/// Serializable summary of a construction tree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeReport {
    pub kind: String,
    pub n: usize,
    pub f: usize,
    pub c: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<BoostParams>,
    pub time_bound: u64,
    pub state_bits: u32,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub children: Vec<TreeReport>,
}
