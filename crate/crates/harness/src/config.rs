//! Experiment configuration, read from TOML.

use crate::error::HarnessError;
use serde::{Deserialize, Serialize};
use synccount_adversary::Strategy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Deterministic,
    Silenced,
    Pulled,
    Frozen,
    SampleAll,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Mode::deserialize(serde::de::value::StrDeserializer::<serde::de::value::Error>::new(s))
            .map_err(|_| format!("unknown mode {s:?}; expected deterministic, silenced, pulled, frozen or sample-all"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstructionConfig {
    pub n: usize,
    pub f: usize,
    pub c: u32,
    pub mode: Mode,
    /// Silencing window.
    pub kappa: u32,
    pub allow_short_kappa: bool,
    pub gamma: f64,
    /// Error exponent of the sampling guarantee.
    pub k: u32,
    /// Draws per vote; 0 picks the minimum for `(eta, k, gamma)`.
    pub samples: u32,
    /// System size in the sampling guarantee; 0 means `n`.
    pub eta: usize,
    /// Topology seed in frozen mode.
    pub master_seed: u64,
    pub schedule: u64,
}

impl Default for ConstructionConfig {
    fn default() -> Self {
        ConstructionConfig {
            n: 16,
            f: 5,
            c: 128,
            mode: Mode::Deterministic,
            kappa: 64,
            allow_short_kappa: false,
            gamma: synccount_counters::constants::DEFAULT_PULL_GAMMA,
            k: synccount_counters::constants::DEFAULT_PULL_K,
            samples: 0,
            eta: 0,
            master_seed: 0,
            schedule: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdversaryConfig {
    pub strategy: Strategy,
    /// Pick the faulty set without looking at the run seed.
    pub oblivious: bool,
}

impl Default for AdversaryConfig {
    fn default() -> Self {
        AdversaryConfig { strategy: Strategy::AntiMajority, oblivious: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub first_seed: u64,
    pub seeds: u64,
    /// Rounds to simulate; 0 means analytic bound plus guard band.
    pub horizon: u64,
    /// Guard band beyond the analytic bound, in units of the root tau.
    pub guard_taus: u64,
    pub allow_short_horizon: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            first_seed: 0,
            seeds: 1,
            horizon: 0,
            guard_taus: synccount_counters::constants::GUARD_TAUS,
            allow_short_horizon: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
    /// Write one JSON-lines trace per run.
    pub traces: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: "out".into(), traces: true }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub construction: ConstructionConfig,
    pub adversary: AdversaryConfig,
    pub run: RunConfig,
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        toml::from_str(text).map_err(HarnessError::config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn seeds(&self) -> impl Iterator<Item = u64> {
        self.run.first_seed..self.run.first_seed + self.run.seeds
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let cfg = ExperimentConfig::default();
        assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn partial_files_fill_defaults() {
        let cfg = ExperimentConfig::from_toml("[construction]\nn = 4\nf = 1\nmode = \"sample-all\"\n").unwrap();
        assert_eq!((cfg.construction.n, cfg.construction.mode), (4, Mode::SampleAll));
        assert_eq!(cfg.run, RunConfig::default());
        assert!(ExperimentConfig::from_toml("[construction]\nm = 4\n").is_err());
        assert_eq!("frozen".parse::<Mode>(), Ok(Mode::Frozen));
    }
}
