use synccount_core::ConfigError;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("child for block {block} runs on {got_n} nodes with period {got_c}; expected {want_n} nodes with period {want_c}")]
    ChildMismatch { block: usize, got_n: usize, got_c: u32, want_n: usize, want_c: u32 },
    #[error("child for block {block} tolerates {got} faults; the split needs {want}")]
    ChildResilience { block: usize, got: usize, want: usize },
    #[error("follower extension needs more nodes than the core's {core} (got {total})")]
    NoFollowers { core: usize, total: usize },
}
