//! Silencing wrapper for boost counters.
//!
//! Nodes that have counted consistently for a full cooldown and whose counter
//! hits a window boundary become happy. Happy nodes stop running the wrapped
//! counter and announce their value with a few bits per window, see [`wire`].

pub mod checks;
mod error;
pub mod shim;
pub mod wire;
mod wrapper;

pub use error::SilenceError;
pub use shim::Heard;
pub use wire::{Code, Parsed};
pub use wrapper::{build_silenced, SilenceOptions, Silenced};
