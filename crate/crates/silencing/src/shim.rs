//! Receiver-side reconstruction of one sender's counter.
//!
//! Words: `[estimate, run, phase, prev_0 .. prev_{B-1}, cur_0 .. cur_{B-1}]`.
//!
//! * `estimate` is the sender's value in the last message (`c` = unknown).
//!   An unhappy message sets it outright; a happy-form message keeps it only
//!   if it matches the prediction `estimate + 1`.
//! * A streak collects up to `kappa` consecutive happy-form messages. `run`
//!   counts them; `phase` is the phase of the last one once a header has been
//!   seen (`kappa` before that). Ball arrivals go into `cur` (streak position
//!   before the header, phase after it); at the header they move to `prev`,
//!   converted to phases of the window that just ended.
//! * After `kappa` messages the streak names the current value uniquely: the
//!   window-start value only moves by `kappa` at the header, so digits seen
//!   before and after it pin both windows down. The candidate is re-encoded
//!   and checked against what was seen before it replaces the estimate.

use crate::wire::{Code, Parsed};
use synccount_core::{Field, Schema};
use synccount_counters::tree::hdr;

/// What a receiver makes of one sender this round.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Heard {
    /// Unhappy sender with its full wrapped state.
    Unhappy(Vec<u32>),
    Happy(u32),
    Unknown,
}

impl Heard {
    /// Counter value, infinity included.
    pub fn value(&self) -> Option<u32> {
        match self {
            Heard::Unhappy(s) => Some(s[hdr::A]),
            Heard::Happy(a) => Some(*a),
            Heard::Unknown => None,
        }
    }

    pub fn happy_value(&self) -> Option<u32> {
        match self {
            Heard::Happy(a) => Some(*a),
            _ => None,
        }
    }
}

const EST: usize = 0;
const RUN: usize = 1;
const PHASE: usize = 2;
const DIGITS: usize = 3;

pub fn shim_fields(code: &Code) -> Vec<Field> {
    let k = code.kappa;
    let mut fields = vec![
        Field::marked("shim.estimate", code.c),
        Field::aux("shim.run", k + 1),
        Field::marked("shim.phase", k),
    ];
    fields.extend((0..2 * code.balls).map(|_| Field::marked("shim.digit", k)));
    fields
}

pub fn shim_len(code: &Code) -> usize {
    DIGITS + 2 * code.balls as usize
}

pub fn shim_schema(code: &Code) -> Schema {
    Schema::new(shim_fields(code))
}

/// Header flag and ball set of the message a happy sender at `a` emits.
pub fn expected(code: &Code, a: u32) -> (bool, u64) {
    let phase = a % code.kappa;
    let start = a - phase;
    let balls = (0..code.balls).filter(|&j| code.digit(start, j) == phase).fold(0u64, |m, j| m | 1 << j);
    (phase == 0, balls)
}

/// Decoder words that know nothing about the sender.
pub fn cleared(code: &Code) -> Vec<u32> {
    let mut w = vec![code.c; shim_len(code)];
    clear_streak(code, &mut w);
    w
}

fn clear_streak(code: &Code, w: &mut [u32]) {
    w[RUN] = 0;
    w[PHASE..].iter_mut().for_each(|x| *x = code.kappa);
}

/// Fold one message into `words` and return the reading of the sender.
pub fn observe(code: &Code, words: &mut [u32], msg: Option<Parsed>) -> Heard {
    let c = code.c;
    let (header, balls) = match msg {
        Some(Parsed::Happy { header, balls }) => (header, balls),
        Some(Parsed::Unhappy(state)) => {
            words[EST] = state[hdr::A].min(c);
            clear_streak(code, words);
            return Heard::Unhappy(state);
        }
        Some(Parsed::Malformed) | None => {
            words[EST] = c;
            clear_streak(code, words);
            return Heard::Unknown;
        }
    };

    let predicted = (words[EST] < c).then(|| (words[EST] + 1) % c);
    let mut estimate = predicted.filter(|&y| expected(code, y) == (header, balls));

    if !extend_streak(code, words, header, balls) {
        clear_streak(code, words);
        let restarted = extend_streak(code, words, header, balls);
        debug_assert!(restarted);
    }
    if words[RUN] == code.kappa {
        if let Some(a) = decode_streak(code, words) {
            estimate = Some(a);
        }
        clear_streak(code, words);
    }

    words[EST] = estimate.unwrap_or(c);
    estimate.map_or(Heard::Unknown, Heard::Happy)
}

/// Record one message; `false` if it cannot continue the current streak.
fn extend_streak(code: &Code, w: &mut [u32], header: bool, balls: u64) -> bool {
    let (k, b) = (code.kappa, code.balls as usize);
    let pos = w[RUN];
    if pos >= k {
        return false;
    }
    if header {
        if w[PHASE] != k {
            return false;
        }
        // positions before the header become phases of the window that ended
        for j in 0..b {
            let idx = w[DIGITS + b + j];
            w[DIGITS + j] = match idx {
                _ if idx == k => k,
                _ if idx < pos => k - (pos - idx),
                _ => return false,
            };
            w[DIGITS + b + j] = k;
        }
        w[PHASE] = 0;
    } else if w[PHASE] + 1 < k {
        w[PHASE] += 1;
    } else if w[PHASE] != k {
        return false;
    }
    let mark = if w[PHASE] == k { pos } else { w[PHASE] };
    for j in (0..b).filter(|&j| balls >> j & 1 == 1) {
        let slot = &mut w[DIGITS + b + j];
        if *slot != k {
            return false;
        }
        *slot = mark;
    }
    w[RUN] = pos + 1;
    true
}

/// Current value named by a full streak, if it is consistent.
fn decode_streak(code: &Code, w: &[u32]) -> Option<u32> {
    let (k, b) = (code.kappa, code.balls as usize);
    let now = w[PHASE];
    if now == k {
        return None;
    }
    let prev = &w[DIGITS..DIGITS + b];
    let cur = &w[DIGITS + b..DIGITS + 2 * b];
    // the streak covers phases first..k-1 of the old window, 0..=now of the new
    let first = (now + 1) % k;
    let windows = code.c / k;

    let carry_to = (1..b).find(|&j| prev[j] != k - 1).unwrap_or(b);
    let mut start = 0u64;
    for j in (1..b).rev() {
        let digit = if j < carry_to {
            0
        } else if cur[j] != k {
            cur[j]
        } else if j == carry_to {
            if prev[j] != k {
                prev[j] + 1
            } else {
                first
            }
        } else if prev[j] != k {
            prev[j]
        } else {
            return None;
        };
        start = start * u64::from(k) + u64::from(digit);
    }
    if start >= u64::from(windows) {
        return None;
    }
    let start = start as u32;
    let old = (start + windows - 1) % windows;

    // re-encode both windows and compare with what arrived
    let consistent = (0..b).all(|j| {
        let dp = code.digit(old * k, j as u32);
        let dc = code.digit(start * k, j as u32);
        let want_prev = if first > 0 && dp >= first { dp } else { k };
        let want_cur = if dc <= now { dc } else { k };
        prev[j] == want_prev && cur[j] == want_cur
    });
    consistent.then_some(start * k + now)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn feed(code: &Code, words: &mut [u32], a: u32) -> Heard {
        let (header, balls) = expected(code, a);
        observe(code, words, Some(Parsed::Happy { header, balls }))
    }

    #[test]
    fn locks_within_one_window() {
        let code = Code::new(64, 8);
        for start in 0..64 {
            let mut words = cleared(&code);
            for r in 0..40u32 {
                let a = (start + r) % 64;
                let heard = feed(&code, &mut words, a);
                if r + 1 >= code.kappa {
                    assert_eq!(heard, Heard::Happy(a), "start {start} round {r}");
                }
            }
        }
    }

    #[test]
    fn unhappy_seeds_prediction() {
        let code = Code::new(64, 8);
        let mut words = cleared(&code);
        let mut state = vec![0; hdr::LEN];
        state[hdr::A] = 41;
        assert_eq!(observe(&code, &mut words, Some(Parsed::Unhappy(state))).value(), Some(41));
        assert_eq!(feed(&code, &mut words, 42), Heard::Happy(42));
    }

    #[test]
    fn wrong_estimate_is_replaced() {
        let code = Code::new(48, 4);
        let mut words = cleared(&code);
        words[EST] = 17;
        let mut last = Heard::Unknown;
        for r in 0..4 {
            last = feed(&code, &mut words, (30 + r) % 48);
        }
        assert_eq!(last, Heard::Happy(33));
    }
}
