//! Counters in the pulling model.
//!
//! Instead of hearing every broadcast, a node draws `K` senders uniformly with
//! replacement for each vote and compares counts against `2K/3` and `K/3`.
//! [`Sampler`] plugs into the deterministic construction through the
//! counter's pull interface, so the update rules are shared.

mod error;
mod sampler;
pub mod sampling;

pub use error::PullError;
pub use sampler::{boost_probabilistic, build_recursive_probabilistic, pulls_per_round, Sampler, Topology};
pub use sampling::{
    margin, multinomial_counts, sample_contacts, sample_size, sampled_majority, sampled_plurality, ContactSet,
    PullParams, SampledVote,
};
