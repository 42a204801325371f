//! Explicit constants behind every asymptotic bound used by the library.
//!
//! Each value is derived from the update rules, not fitted to measurements.
//! Tests recompute the derivations.

/// Rounds between a correct block's counter stabilising and its majority
/// vote counting consistently: one round to observe the block output, one to
/// vote on the observation.
pub const VOTE_SETTLE_ROUNDS: u64 = 2;

/// Cooldown reset value, in units of the slow block period `c1`.
pub const COOLDOWN_PERIODS: u64 = 2;

/// Rounds, in units of `c1`, within which the leader pointers agree on a
/// correct block for a full clock window once the votes count consistently.
pub const LEADER_WINDOW_PERIODS: u64 = 3;

/// Slack after the clock window: the three instructions of one king plus the
/// one-round lag between deriving the clock and executing on it.
pub const PHASE_KING_SLACK: u64 = 4;

/// Boost overhead is `VOTE_SETTLE_ROUNDS + (COOLDOWN_PERIODS + LEADER_WINDOW_PERIODS) * c1 + tau + PHASE_KING_SLACK`
/// rounds, with `c1 = 6 tau`, i.e. `31 tau + 6`. Since `tau >= 9`, this is at
/// most `KAPPA_BOOST * tau`.
pub const KAPPA_BOOST: u64 = 32;

/// Rounds added by letting extra nodes follow a core.
pub const FOLLOWER_DELAY: u64 = 1;

/// Time constant `alpha` in `T <= 1 + alpha * f * sum_{k=0}^{ceil(log f)} 2^-k`.
///
/// A boost at resilience `f` adds `31 tau + 6 = 93 f + 192` rounds, at most
/// `285 f` for `f >= 1`; halving resilience per level makes the per-level
/// terms a geometric series, so `alpha = 285` carries the induction.
pub const ALPHA: u64 = 285;

/// State constant `beta` in `S <= beta * (log2(f)^2 + log2(c))`.
///
/// A boost level stores eight fields: the output value and flag
/// (`log2(c) + 2` bits) and six weak-counter fields of at most
/// `log2(36 (f + 2)) + 1` bits each, over `ceil(log2 f) + 1` levels. The
/// ratio is largest where the target is smallest: `f = 2, c = 2` needs 93
/// bits against a target of 2. Larger `f` or `c` only lower the ratio; tests
/// sweep `f <= 300` and `c < 2^31`.
pub const BETA: f64 = 48.0;

/// Bound on the second difference of state bits over `f = 2^k`: doubling
/// `f` adds at most one bit to each of the eight header fields of every level,
/// and at most one level.
pub const STATE_CURVATURE: u32 = 8;

/// Guard band beyond an analytic bound, in units of `tau`.
pub const GUARD_TAUS: u64 = 4;

/// Bits per window for a happy sender are at most `C_ENC * (1 + B log2 B)`:
/// a two-bit header plus `B` labels of `1 + ceil(log2 B)` bits each.
pub const C_ENC: f64 = 3.0;

/// Windows of `kappa` rounds a decoder needs, from arbitrary state, to lock
/// onto a happy sender. A cleared decoder needs one; a stale streak left in
/// the initial state can spoil the first.
pub const DECODER_LOCK_WINDOWS: u64 = 2;

/// Silenced convergence bound in units of `kappa`, valid when
/// `kappa > T`: `2T + 5 + DECODER_LOCK_WINDOWS * kappa <= C_CONV * kappa`.
pub const C_CONV: u64 = 5;

/// Default error exponent and slack for the pulling model.
pub const DEFAULT_PULL_K: u32 = 2;
pub const DEFAULT_PULL_GAMMA: f64 = 1.0;
