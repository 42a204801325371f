//! Sample sizes, contact sets and sampled votes.

use crate::error::PullError;
use rand::{Rng, RngCore};
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};
use synccount_core::{NodeId, Tally};

/// Chernoff margin `1 - (2/3)(3+gamma)/(2+gamma)`.
pub fn margin(gamma: f64) -> f64 {
    1.0 - 2.0 / 3.0 * (3.0 + gamma) / (2.0 + gamma)
}

/// Least `K` with every sampling failure probability at most `eta^-k`.
///
/// The weakest of the three tail bounds is `exp(-delta^2 (2+gamma) K / (4 (3+gamma)))`,
/// so `K0 = ceil(4 (3+gamma) k ln(eta) / (delta^2 (2+gamma)))`. The other bound,
/// with 2 in place of 4, then holds as well.
pub fn sample_size(eta: usize, k: u32, gamma: f64) -> Result<u32, PullError> {
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(PullError::Gamma(gamma));
    }
    if k < 1 {
        return Err(PullError::Exponent(k));
    }
    if eta < 2 {
        return Err(PullError::SystemSize(eta));
    }
    Ok(sample_size_for(f64::from(k) * (eta as f64).ln(), gamma))
}

/// `K0` as a function of `k ln(eta)`.
pub fn sample_size_for(k_ln_eta: f64, gamma: f64) -> u32 {
    let d = margin(gamma);
    let exact = 4.0 * (3.0 + gamma) * k_ln_eta / (d * d * (2.0 + gamma));
    // shave float noise off values that are integral in exact arithmetic
    (exact - 1e-9).ceil() as u32
}

/// Sampling parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PullParams {
    pub gamma: f64,
    pub k: u32,
    pub eta: usize,
    /// Draws per vote.
    pub samples: u32,
}

impl PullParams {
    /// Minimal sample size for `(eta, k, gamma)`.
    pub fn new(eta: usize, k: u32, gamma: f64) -> Result<Self, PullError> {
        let samples = sample_size(eta, k, gamma)?;
        Ok(PullParams { gamma, k, eta, samples })
    }

    pub fn with_samples(mut self, samples: u32) -> Result<Self, PullError> {
        let minimum = sample_size(self.eta, self.k, self.gamma)?;
        if samples < minimum {
            return Err(PullError::TooFewSamples { samples, minimum });
        }
        self.samples = samples;
        Ok(self)
    }

    pub fn margin(&self) -> f64 {
        margin(self.gamma)
    }

    /// `f < n / (3 + gamma)`.
    pub fn check_resilience(&self, n: usize, f: usize) -> Result<(), PullError> {
        if (f as f64) * (3.0 + self.gamma) < n as f64 {
            Ok(())
        } else {
            Err(PullError::Resilience { n, f, gamma: self.gamma })
        }
    }
}

/// One puller's draws in one round, uniform with replacement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContactSet {
    pub round: u64,
    pub puller: NodeId,
    /// Indices into the population, in draw order.
    pub targets: Vec<usize>,
}

impl ContactSet {
    /// How often each member was drawn.
    pub fn weights(&self, pop: usize) -> Vec<u32> {
        let mut w = vec![0; pop];
        self.targets.iter().for_each(|&t| w[t] += 1);
        w
    }
}

pub fn sample_contacts(round: u64, puller: NodeId, pop: usize, samples: u32, rng: &mut dyn RngCore) -> ContactSet {
    assert!(pop > 0, "empty population");
    let targets = (0..samples).map(|_| rng.random_range(0..pop)).collect();
    ContactSet { round, puller, targets }
}

/// Draw counts of `samples` uniform draws over `pop` members, without
/// materialising the draws: a chain of binomials.
pub fn multinomial_counts(pop: usize, samples: u32, rng: &mut dyn RngCore, out: &mut Vec<u32>) {
    out.clear();
    let mut left = u64::from(samples);
    for i in 0..pop {
        let rest = pop - i;
        let x = if rest == 1 || left == 0 {
            left
        } else {
            Binomial::new(left, 1.0 / rest as f64).expect("valid probability").sample(rng)
        };
        out.push(x as u32);
        left -= x;
    }
}

/// Value counts over one contact set.
#[derive(Clone, Debug, Default)]
pub struct SampledVote {
    pub counts: Tally,
    pub samples: u32,
}

impl SampledVote {
    /// Tally `value(target)` over the draws; `None` responses count toward no value.
    pub fn collect(contacts: &ContactSet, mut value: impl FnMut(usize) -> Option<u32>) -> Self {
        let mut counts = Tally::new();
        for &t in &contacts.targets {
            if let Some(x) = value(t) {
                counts.add(x, 1);
            }
        }
        SampledVote { counts, samples: contacts.targets.len() as u32 }
    }

    pub fn strong(&self) -> u32 {
        (2 * self.samples).div_ceil(3)
    }

    pub fn plural(&self) -> u32 {
        self.samples.div_ceil(3)
    }
}

/// The value drawn at least `ceil(2K/3)` times, if any.
pub fn sampled_majority(vote: &SampledVote) -> Option<u32> {
    vote.counts.iter().find(|&(_, n)| n >= vote.strong()).map(|(x, _)| x)
}

/// Values drawn at least `ceil(K/3)` times, ascending.
pub fn sampled_plurality(vote: &SampledVote) -> Vec<u32> {
    let mut out: Vec<u32> = vote.counts.iter().filter(|&(_, n)| n >= vote.plural()).map(|(x, _)| x).collect();
    out.sort_unstable();
    out
}
