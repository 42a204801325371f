use crate::NodeId;
use thiserror::Error;

/// Rejected parameters. Maps to exit code 2 in the CLI.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("need n > 0 (got n = {0})")]
    EmptySystem(usize),
    #[error("resilience f = {f} is infeasible for n = {n}: {why}")]
    Resilience { n: usize, f: usize, why: &'static str },
    #[error("invalid parameter {name}: {why}")]
    Param { name: &'static str, why: String },
    #[error("vote vector has {got} entries, expected {want}")]
    VoteArity { got: usize, want: usize },
}

impl ConfigError {
    pub fn param(name: &'static str, why: impl Into<String>) -> Self {
        ConfigError::Param { name, why: why.into() }
    }
}

/// A contract breach detected while simulating. Never silently repaired.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SimFault {
    #[error("round {round}: {sender} sent {bits} bits to {recipient}, limit is {limit}")]
    Oversized { round: u64, sender: NodeId, recipient: NodeId, bits: u64, limit: u64 },
    #[error("round {round}: message from {sender} to {recipient} is outside the alphabet: {why}")]
    Alphabet { round: u64, sender: NodeId, recipient: NodeId, why: String },
    #[error("adversary selected {got} faulty nodes, at most {f} allowed")]
    TooManyFaults { got: usize, f: usize },
    #[error("adversary selected unknown node {0}")]
    UnknownNode(NodeId),
    #[error("initial state of {node} is illegal: {why}")]
    IllegalState { node: NodeId, why: String },
    #[error("{0}")]
    Config(#[from] ConfigError),
}
