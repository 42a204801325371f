use crate::error::BuildError;
use crate::params::{check_resilience, BoostParams};
use crate::pull::{Broadcast, Pull};
use crate::tree::{Env, Inbox, Tree};
use rand::RngCore;
use std::ops::Range;
use synccount_core::{ConfigError, NodeId, Probe, Protocol, Schema, StepCtx};

/// A counter described by a construction tree, run under a message-gathering model.
#[derive(Clone, Debug)]
pub struct Counter<P: Pull = Broadcast> {
    tree: Tree,
    pull: P,
    schemas: Vec<Schema>,
}

impl Counter<Broadcast> {
    pub fn new(tree: Tree) -> Self {
        Self::with_pull(tree, Broadcast)
    }
}

impl<P: Pull> Counter<P> {
    pub fn with_pull(mut tree: Tree, pull: P) -> Self {
        tree.renumber(&mut 0);
        let schemas = (0..tree.n()).map(|v| tree.schema(v)).collect();
        Counter { tree, pull, schemas }
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn pull(&self) -> &P {
        &self.pull
    }

    pub fn time_bound(&self) -> u64 {
        self.tree.time_bound()
    }

    /// Step with an explicit inbox of state slices.
    pub fn step_slices(&self, v: NodeId, state: &[u32], inbox: &[Option<&[u32]>], ctx: &mut StepCtx) -> Vec<u32> {
        let mut out = Vec::with_capacity(state.len());
        let mut env = Env { pull: &self.pull, ctx, base: 0 };
        self.tree.step(v.index(), state, inbox, &mut env, &mut out);
        out
    }
}

impl<P: Pull> Protocol for Counter<P> {
    type Msg = Vec<u32>;

    fn name(&self) -> String {
        format!("counter(n={}, f={}, c={}, {})", self.n(), self.f(), self.c(), self.pull.label())
    }

    fn n(&self) -> usize {
        self.tree.n()
    }

    fn f(&self) -> usize {
        self.tree.f()
    }

    fn c(&self) -> u32 {
        self.tree.c()
    }

    fn schema(&self, v: NodeId) -> &Schema {
        &self.schemas[v.index()]
    }

    fn message(&self, _v: NodeId, state: &[u32]) -> Vec<u32> {
        state.to_vec()
    }

    fn message_bits(&self, sender: NodeId, _msg: &Vec<u32>) -> u64 {
        u64::from(self.schema(sender).width())
    }

    fn max_message_bits(&self) -> u64 {
        u64::from(self.state_bits())
    }

    fn check_message(&self, sender: NodeId, msg: &Vec<u32>) -> Result<(), String> {
        self.schema(sender).check(msg)
    }

    fn garbage(&self, sender: NodeId, rng: &mut dyn RngCore) -> Vec<u32> {
        self.schema(sender).random_state(rng)
    }

    fn transition(&self, v: NodeId, state: &[u32], inbox: &[Option<&Vec<u32>>], ctx: &mut StepCtx) -> Vec<u32> {
        let slices: Inbox<'_> = inbox.iter().map(|m| m.map(Vec::as_slice)).collect();
        self.step_slices(v, state, &slices, ctx)
    }

    fn output(&self, v: NodeId, state: &[u32]) -> u32 {
        self.tree.output(v.index(), state)
    }

    fn probe(&self, v: NodeId, state: &[u32]) -> Probe {
        self.tree.probe(v.index(), state)
    }

    fn top_blocks(&self) -> Option<[Range<usize>; 2]> {
        match &self.tree {
            Tree::Boost { params: p, .. } => Some([0..p.n0, p.n0..p.n]),
            _ => None,
        }
    }
}

pub fn trivial_counter(c: u32) -> Result<Tree, ConfigError> {
    if c < 2 {
        return Err(ConfigError::param("c", format!("period must be at least 2, got {c}")));
    }
    Ok(Tree::Trivial { c })
}

/// Run `core` on the first nodes and let the remaining ones follow it.
pub fn extend_followers(core: Tree, n_total: usize) -> Result<Tree, BuildError> {
    if n_total <= core.n() {
        return Err(BuildError::NoFollowers { core: core.n(), total: n_total });
    }
    Ok(Tree::Followers { core: Box::new(core), n: n_total, level: 0 })
}

/// Two-block boost of `children` to resilience `params.f` and period `params.c`.
pub fn boost(children: [Tree; 2], params: BoostParams) -> Result<Tree, BuildError> {
    for (j, child) in children.iter().enumerate() {
        let (want_n, want_c) = (params.block_size(j), params.block_period(j));
        if child.n() != want_n || child.c() != want_c {
            return Err(BuildError::ChildMismatch { block: j, got_n: child.n(), got_c: child.c(), want_n, want_c });
        }
        let want = params.block_resilience(j);
        if child.f() < want {
            return Err(BuildError::ChildResilience { block: j, got: child.f(), want });
        }
    }
    Ok(Tree::Boost { params, children: Box::new(children), level: 0 })
}

/// Recursive construction: boost while `f >= 1`, trivial core plus followers at `f = 0`.
pub fn build_recursive(n: usize, f: usize, c: u32) -> Result<Tree, BuildError> {
    check_resilience(n, f)?;
    if f == 0 {
        let leaf = trivial_counter(c)?;
        return if n == 1 { Ok(leaf) } else { extend_followers(leaf, n) };
    }
    let p = BoostParams::new(n, f, c)?;
    let children = [build_recursive(p.n0, p.f0, p.c0)?, build_recursive(p.n1, p.f1, p.c1)?];
    boost(children, p)
}

/// Analytic `(time bound, state bits)` of a tree.
pub fn analytic_bounds(tree: &Tree) -> (u64, u32) {
    (tree.time_bound(), tree.state_bits())
}
