//! Self-stabilising Byzantine counters built by recursive resilience boosting.

pub mod checks;
pub mod constants;
mod counter;
mod error;
pub mod params;
pub mod phase_king;
pub mod pull;
pub mod tree;
pub mod weak;

pub use counter::{analytic_bounds, boost, build_recursive, extend_followers, trivial_counter, Counter};
pub use error::BuildError;
pub use params::BoostParams;
pub use phase_king::{inc, phase_king_update, Instruction, KingState, Thresholds};
pub use pull::{Broadcast, DrawKey, Pull, Site};
pub use tree::{boost_overhead, Env, Tree, TreeReport};
pub use weak::{derive_leader, weak_update, LeaderView, WeakBlock};
