//! Synchronous lockstep execution of counting protocols under Byzantine faults.
//!
//! A protocol is a per-node automaton over packed integer states ([`Protocol`]).
//! The engine broadcasts, delivers and updates in lockstep, letting an
//! [`Adversary`] pick the faulty set, every initial state and every faulty
//! message per recipient.

pub mod adversary;
pub mod bits;
pub mod engine;
pub mod error;
pub mod majority;
pub mod node;
pub mod protocol;
pub mod rng;
pub mod schema;
pub mod stabilise;

pub use adversary::{Adversary, FaultFree, View};
pub use bits::{BitReader, BitString};
pub use engine::{run_execution, step_round, Configuration, RoundRecord, RunOptions, Trace};
pub use error::{ConfigError, SimFault};
pub use majority::{strong_majority, Tally, Vote};
pub use node::NodeId;
pub use protocol::{Probe, Protocol, StepCtx};
pub use schema::{Field, FieldKind, Schema};
pub use stabilise::{detect_stabilization, Stabilisation};
