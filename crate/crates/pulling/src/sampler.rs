use crate::error::PullError;
use crate::sampling::{multinomial_counts, PullParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use synccount_core::rng::derive;
use synccount_core::StepCtx;
use synccount_counters::{
    boost, build_recursive, BoostParams, Counter, DrawKey, Pull, Site, Thresholds, Tree,
};

/// Where the sampling randomness comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Topology {
    /// Fresh contacts every round, from the execution seed.
    Fresh,
    /// Contacts depend on `master` and `round mod schedule` only.
    Frozen { master: u64, schedule: u64 },
    /// Every member drawn once; thresholds fall back to `n - f` and `f + 1`.
    SampleAll,
}

/// A [`Pull`] model drawing `K` senders with replacement per vote.
///
/// Followers read their single-node core in full in every mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sampler {
    pub params: PullParams,
    pub topology: Topology,
}

impl Sampler {
    pub fn new(params: PullParams, topology: Topology) -> Result<Self, PullError> {
        if let Topology::Frozen { schedule: 0, .. } = topology {
            return Err(PullError::Schedule);
        }
        Ok(Sampler { params, topology })
    }

    /// Frozen contacts are only sound if the faults ignore the topology.
    pub fn check_adversary(&self, oblivious: bool) -> Result<(), PullError> {
        match self.topology {
            Topology::Frozen { .. } if !oblivious => Err(PullError::AdaptiveAgainstFrozen),
            _ => Ok(()),
        }
    }

    fn rng(&self, key: DrawKey, ctx: &StepCtx) -> ChaCha8Rng {
        let (seed, slot) = match self.topology {
            Topology::Frozen { master, schedule } => (master, ctx.round % schedule),
            _ => (ctx.seed, ctx.round),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(derive(seed, &[key.node as u64, slot, key.level as u64]));
        rng.set_stream(key.site.code());
        rng
    }

    fn samples_all(&self, site: Site) -> bool {
        self.topology == Topology::SampleAll || site == Site::Core
    }
}

impl Pull for Sampler {
    fn draw(&self, key: DrawKey, pop: usize, ctx: &mut StepCtx, out: &mut Vec<u32>) {
        if self.samples_all(key.site) {
            out.clear();
            out.resize(pop, 1);
            ctx.pulls += pop as u64;
            return;
        }
        multinomial_counts(pop, self.params.samples, &mut self.rng(key, ctx), out);
        ctx.pulls += u64::from(self.params.samples);
    }

    fn pull_king(&self, ctx: &mut StepCtx) {
        if self.topology != Topology::SampleAll {
            ctx.pulls += 1;
        }
    }

    fn thresholds(&self, n: usize, f: usize) -> Thresholds {
        match self.topology {
            Topology::SampleAll => Thresholds::broadcast(n, f),
            _ => Thresholds::sampled(self.params.samples),
        }
    }

    fn label(&self) -> String {
        match self.topology {
            Topology::Fresh => format!("pulled(K={})", self.params.samples),
            Topology::Frozen { master, schedule } => {
                format!("frozen(K={}, master={master}, schedule={schedule})", self.params.samples)
            }
            Topology::SampleAll => "sample-all".into(),
        }
    }
}

fn check(sampler: &Sampler, n: usize, f: usize) -> Result<(), PullError> {
    if sampler.topology == Topology::SampleAll {
        synccount_counters::params::check_resilience(n, f).map_err(|e| PullError::Build(e.into()))
    } else {
        sampler.params.check_resilience(n, f)
    }
}

/// One boost level over two children, with votes gathered by `sampler`.
pub fn boost_probabilistic(
    children: [Tree; 2],
    params: BoostParams,
    sampler: Sampler,
) -> Result<Counter<Sampler>, PullError> {
    check(&sampler, params.n, params.f)?;
    Ok(Counter::with_pull(boost(children, params)?, sampler))
}

/// The recursive construction, with votes gathered by `sampler`.
pub fn build_recursive_probabilistic(n: usize, f: usize, c: u32, sampler: Sampler) -> Result<Counter<Sampler>, PullError> {
    check(&sampler, n, f)?;
    Ok(Counter::with_pull(build_recursive(n, f, c)?, sampler))
}

/// Messages node `v` pulls per round, read off the tree.
pub fn pulls_per_round(tree: &Tree, v: usize, sampler: &Sampler) -> u64 {
    match tree {
        Tree::Trivial { .. } => 0,
        Tree::Followers { core, .. } => {
            let core_n = core.n();
            if v < core_n {
                pulls_per_round(core, v, sampler)
            } else {
                core_n as u64
            }
        }
        Tree::Boost { params: p, children, .. } => {
            let j = p.block_of(v);
            let own = if sampler.topology == Topology::SampleAll {
                2 * p.n as u64
            } else {
                3 * u64::from(sampler.params.samples) + 1
            };
            own + pulls_per_round(&children[j], v - p.block_offset(j), sampler)
        }
    }
}
