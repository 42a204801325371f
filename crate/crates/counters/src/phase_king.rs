//! Self-stabilising phase king over `[c] ∪ {∞}`.
//!
//! Infinity is stored as the value `c`.

use serde::{Deserialize, Serialize};
use synccount_core::Tally;

/// Which of the three instruction sets of a king's turn runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Instruction {
    /// Keep counting if enough nodes agree with us, else reset.
    Check,
    /// Record strong support and move to the smallest well-supported value.
    Vote,
    /// Nodes without strong support adopt the king's value.
    King,
}

impl Instruction {
    pub const ALL: [Instruction; 3] = [Instruction::Check, Instruction::Vote, Instruction::King];

    /// Instruction and king index for clock value `d`.
    pub fn at(d: u32) -> (Instruction, usize) {
        (Self::ALL[(d % 3) as usize], (d / 3) as usize)
    }
}

/// Vote thresholds: `strong` for agreement checks, `plural` for "more than `f`".
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Thresholds {
    pub strong: u32,
    pub plural: u32,
}

impl Thresholds {
    pub fn broadcast(n: usize, f: usize) -> Self {
        Thresholds { strong: (n - f) as u32, plural: f as u32 + 1 }
    }

    /// Fractions 2/3 and 1/3 of `k` samples, rounded up.
    pub fn sampled(k: u32) -> Self {
        Thresholds { strong: (2 * k).div_ceil(3), plural: k.div_ceil(3) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KingState {
    /// Candidate output; `c` is infinity.
    pub a: u32,
    pub b: bool,
}

/// `x ⊕ 1`: increment modulo `c`, infinity absorbing.
pub fn inc(x: u32, c: u32) -> u32 {
    if x >= c {
        c
    } else {
        (x + 1) % c
    }
}

/// One phase-king update.
///
/// `received` tallies the `a` values heard this round (infinity as `c`).
/// `king` is the value heard from the king, `None` if nothing decodable
/// arrived; it is then treated as `c - 1`.
pub fn phase_king_update(
    instr: Instruction,
    own: KingState,
    received: &Tally,
    king: Option<u32>,
    th: Thresholds,
    c: u32,
) -> KingState {
    match instr {
        Instruction::Check => {
            let a = if received.count(own.a) < th.strong { c } else { inc(own.a, c) };
            KingState { a, b: own.b }
        }
        Instruction::Vote => {
            let b = received.count(own.a) >= th.strong;
            // Candidates are ordered 0 < .. < c-1 < ∞ and infinity is stored as
            // c, so the smallest qualifying entry is the right one; no candidate
            // means infinity.
            let z = received.first_reaching(th.plural).map_or(c, |z| z.min(c));
            KingState { a: inc(z, c), b }
        }
        Instruction::King => {
            let a = if own.a >= c || !own.b {
                let k = king.map_or(c - 1, |k| k.min(c - 1));
                inc(k, c)
            } else {
                inc(own.a, c)
            };
            KingState { a, b: true }
        }
    }
}
