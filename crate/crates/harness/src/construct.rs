//! Build the configured construction and describe it.

use crate::config::{ConstructionConfig, Mode};
use crate::error::HarnessError;
use serde::Serialize;
use synccount_core::Protocol;
use synccount_counters::{build_recursive, Counter, Tree, TreeReport};
use synccount_pulling::{build_recursive_probabilistic, pulls_per_round, PullParams, Sampler, Topology};
use synccount_silencing::{build_silenced, SilenceOptions, Silenced};

/// One of the runnable constructions.
#[derive(Clone, Debug)]
pub enum Built {
    Counter(Counter),
    Silenced(Silenced),
    Pulled(Counter<Sampler>),
}

/// Evaluate `$body` with `$p` bound to the concrete protocol inside a [`Built`].
#[macro_export]
macro_rules! with_protocol {
    ($built:expr, $p:ident => $body:expr) => {
        match $built {
            $crate::construct::Built::Counter($p) => $body,
            $crate::construct::Built::Silenced($p) => $body,
            $crate::construct::Built::Pulled($p) => $body,
        }
    };
}

fn sampler(cfg: &ConstructionConfig) -> Result<Sampler, HarnessError> {
    let eta = if cfg.eta == 0 { cfg.n } else { cfg.eta };
    let mut params = PullParams::new(eta, cfg.k, cfg.gamma).map_err(HarnessError::config)?;
    if cfg.samples > 0 {
        params = params.with_samples(cfg.samples).map_err(HarnessError::config)?;
    }
    let topology = match cfg.mode {
        Mode::Frozen => Topology::Frozen { master: cfg.master_seed, schedule: cfg.schedule },
        Mode::SampleAll => Topology::SampleAll,
        _ => Topology::Fresh,
    };
    Sampler::new(params, topology).map_err(HarnessError::config)
}

pub fn build(cfg: &ConstructionConfig) -> Result<Built, HarnessError> {
    let (n, f, c) = (cfg.n, cfg.f, cfg.c);
    Ok(match cfg.mode {
        Mode::Deterministic => Built::Counter(Counter::new(build_recursive(n, f, c).map_err(HarnessError::config)?)),
        Mode::Silenced => {
            let opts = SilenceOptions { allow_short_kappa: cfg.allow_short_kappa };
            Built::Silenced(build_silenced(n, f, c, cfg.kappa, opts).map_err(HarnessError::config)?)
        }
        Mode::Pulled | Mode::Frozen | Mode::SampleAll => {
            Built::Pulled(build_recursive_probabilistic(n, f, c, sampler(cfg)?).map_err(HarnessError::config)?)
        }
    })
}

impl Built {
    pub fn tree(&self) -> &Tree {
        match self {
            Built::Counter(p) => p.tree(),
            Built::Silenced(p) => p.inner().tree(),
            Built::Pulled(p) => p.tree(),
        }
    }

    /// Round by which the run is expected to be stable: the tree's bound, or
    /// the all-happy bound of the silencing wrapper.
    pub fn bound(&self) -> u64 {
        match self {
            Built::Silenced(p) => p.silence_bound(),
            _ => self.tree().time_bound(),
        }
    }

    /// Clock period of the root boost; 1 for trees without one.
    pub fn tau(&self) -> u64 {
        match self.tree() {
            Tree::Boost { params, .. } => u64::from(params.tau),
            _ => 1,
        }
    }

    pub fn kappa(&self) -> Option<u32> {
        match self {
            Built::Silenced(p) => Some(p.kappa()),
            _ => None,
        }
    }

    pub fn sampler(&self) -> Option<&Sampler> {
        match self {
            Built::Pulled(p) => Some(p.pull()),
            _ => None,
        }
    }

    /// Largest number of messages a node reads per round.
    pub fn pulls_per_round(&self) -> u64 {
        let tree = self.tree();
        let sampler = match self {
            Built::Pulled(p) => *p.pull(),
            // reading every broadcast is sample-all with unit draws
            _ => Sampler {
                params: PullParams { gamma: 1.0, k: 1, eta: tree.n(), samples: 1 },
                topology: Topology::SampleAll,
            },
        };
        (0..tree.n()).map(|v| pulls_per_round(tree, v, &sampler)).max().unwrap_or(0)
    }

    pub fn report(&self) -> ConstructionReport {
        let tree = self.tree();
        let protocol = with_protocol!(self, p => p.name());
        let state_bits = with_protocol!(self, p => p.state_bits());
        let silenced = match self {
            Built::Silenced(p) => Some(SilencedReport {
                kappa: p.kappa(),
                balls: p.code().balls,
                window_bits: p.code().window_bits(),
                cooldown: p.cooldown(),
                convergence_bound: p.convergence_bound(),
                silence_bound: p.silence_bound(),
            }),
            _ => None,
        };
        ConstructionReport {
            protocol,
            n: tree.n(),
            f: tree.f(),
            c: tree.c(),
            boost_levels: tree.depth() - 1,
            time_bound: tree.time_bound(),
            counter_state_bits: tree.state_bits(),
            state_bits,
            max_message_bits: with_protocol!(self, p => p.max_message_bits()),
            pulls_per_round: self.pulls_per_round(),
            samples: self.sampler().map(|s| s.params.samples),
            silenced,
            tree: tree.report(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SilencedReport {
    pub kappa: u32,
    pub balls: u32,
    pub window_bits: u64,
    pub cooldown: u32,
    pub convergence_bound: u64,
    pub silence_bound: u64,
}

/// Machine-readable construction summary.
#[derive(Clone, Debug, Serialize)]
pub struct ConstructionReport {
    pub protocol: String,
    pub n: usize,
    pub f: usize,
    pub c: u32,
    pub boost_levels: usize,
    pub time_bound: u64,
    /// Packed state of the counter alone.
    pub counter_state_bits: u32,
    /// Packed state of the runnable protocol, wrapper fields included.
    pub state_bits: u32,
    pub max_message_bits: u64,
    pub pulls_per_round: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub silenced: Option<SilencedReport>,
    pub tree: TreeReport,
}

impl std::fmt::Display for ConstructionReport {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(out, "{}", self.protocol)?;
        writeln!(out, "  n = {}, f = {}, c = {}, boost levels = {}", self.n, self.f, self.c, self.boost_levels)?;
        writeln!(out, "  time bound      {} rounds", self.time_bound)?;
        writeln!(out, "  state bits      {} (counter {})", self.state_bits, self.counter_state_bits)?;
        writeln!(out, "  message bits    {} max", self.max_message_bits)?;
        writeln!(out, "  pulls per round {}", self.pulls_per_round)?;
        if let Some(k) = self.samples {
            writeln!(out, "  samples/vote    {k}")?;
        }
        if let Some(s) = &self.silenced {
            writeln!(
                out,
                "  silencing       kappa = {}, balls = {}, window bits = {}, convergence <= {}, silent <= {}",
                s.kappa, s.balls, s.window_bits, s.convergence_bound, s.silence_bound
            )?;
        }
        writeln!(out, "  tree:")?;
        write_tree(out, &self.tree, 2)
    }
}

fn write_tree(out: &mut std::fmt::Formatter<'_>, t: &TreeReport, indent: usize) -> std::fmt::Result {
    let pad = " ".repeat(2 * indent);
    match &t.params {
        Some(p) => writeln!(
            out,
            "{pad}{} n={} f={} c={} tau={} split {}+{} T={} bits={}",
            t.kind, t.n, t.f, t.c, p.tau, p.n0, p.n1, t.time_bound, t.state_bits
        )?,
        None => writeln!(out, "{pad}{} n={} f={} c={} T={} bits={}", t.kind, t.n, t.f, t.c, t.time_bound, t.state_bits)?,
    }
    t.children.iter().try_for_each(|child| write_tree(out, child, indent + 1))
}
