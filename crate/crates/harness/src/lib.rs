//! Experiment plumbing: configuration, construction reports, sweeps with
//! trace and metrics files, and invariant suites.

pub mod config;
pub mod construct;
pub mod error;
pub mod metrics;
pub mod run;
pub mod sweep;
pub mod traces;
pub mod verify;

pub use config::{ExperimentConfig, Mode};
pub use construct::{build, Built, ConstructionReport};
pub use error::HarnessError;
pub use metrics::{RunContext, RunMetrics, Stabilised};
pub use sweep::{run_sweep, Sweep};
