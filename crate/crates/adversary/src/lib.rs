//! Byzantine behaviours for the simulator.
//!
//! The catalog strategies are heuristic: they aim at the vote thresholds and
//! cooldowns the constructions rely on, but none is claimed to be optimal.
//! [`exhaustive`] enumerates every adversary choice for instances small
//! enough to be exhaustive.

mod catalog;
pub mod exhaustive;
mod sweep;

pub use catalog::{Catalog, Strategy, UnknownStrategy};
pub use exhaustive::{
    explore, phase_king_suite, Exploration, KingChoice, KingProperty, OracleReport, PhaseKingModel, SmallModel, TooLarge, Verdict,
    BRANCH_LIMIT,
};
pub use sweep::{worst_of, WorstCase};
