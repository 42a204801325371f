//! Threshold voting.

use crate::error::ConfigError;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

/// Result of a strong-majority vote: a value or bottom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Vote<T> {
    Value(T),
    Bottom,
}

impl<T> Vote<T> {
    pub fn value(self) -> Option<T> {
        match self {
            Vote::Value(v) => Some(v),
            Vote::Bottom => None,
        }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Vote::Bottom)
    }
}

/// Returns the value with at least `n - f` of the `n` votes, else bottom.
///
/// At most one such value exists whenever `n - f > n / 2`.
pub fn strong_majority<T: Eq + Copy>(votes: &[T], n: usize, f: usize) -> Result<Vote<T>, ConfigError> {
    if n == 0 {
        return Err(ConfigError::EmptySystem(n));
    }
    if f >= n {
        return Err(ConfigError::Resilience { n, f, why: "f must be below n" });
    }
    if votes.len() != n {
        return Err(ConfigError::VoteArity { got: votes.len(), want: n });
    }
    // Boyer-Moore candidate, then verify; a strong majority is a strict majority.
    let mut cand = votes[0];
    let mut count = 0usize;
    for &v in votes {
        if count == 0 {
            cand = v;
            count = 1;
        } else if v == cand {
            count += 1;
        } else {
            count -= 1;
        }
    }
    let support = votes.iter().filter(|&&v| v == cand).count();
    Ok(if support >= n - f { Vote::Value(cand) } else { Vote::Bottom })
}

/// Weighted histogram over `u32` values, kept sorted by value.
///
/// Weights let the same code serve broadcast (weight 1 per sender) and
/// sampled multisets (weight = number of draws of a sender).
#[derive(Clone, Debug, Default)]
pub struct Tally {
    entries: SmallVec<[(u32, u32); 32]>,
    total: u32,
}

impl Tally {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
        self.total = 0;
    }

    pub fn add(&mut self, value: u32, weight: u32) {
        if weight == 0 {
            return;
        }
        self.total += weight;
        match self.entries.binary_search_by_key(&value, |e| e.0) {
            Ok(i) => self.entries[i].1 += weight,
            Err(i) => self.entries.insert(i, (value, weight)),
        }
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    pub fn count(&self, value: u32) -> u32 {
        self.entries.binary_search_by_key(&value, |e| e.0).map_or(0, |i| self.entries[i].1)
    }

    /// Most frequent value, smallest on ties; `None` when empty.
    pub fn mode(&self) -> Option<u32> {
        let mut best: Option<(u32, u32)> = None;
        for &(v, c) in &self.entries {
            if best.is_none_or(|(_, bc)| c > bc) {
                best = Some((v, c));
            }
        }
        best.map(|b| b.0)
    }

    /// Smallest value whose count reaches `threshold`.
    pub fn first_reaching(&self, threshold: u32) -> Option<u32> {
        self.entries.iter().find(|e| e.1 >= threshold).map(|e| e.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.entries.iter().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn four_nodes_one_fault() {
        assert_eq!(strong_majority(&[2, 2, 2, 7], 4, 1).unwrap(), Vote::Value(2));
        assert_eq!(strong_majority(&[2, 2, 1, 1], 4, 1).unwrap(), Vote::Bottom);
    }

    #[test]
    fn seven_nodes_two_faults() {
        assert_eq!(strong_majority(&[5, 5, 5, 5, 5, 0, 1], 7, 2).unwrap(), Vote::Value(5));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(strong_majority::<u8>(&[], 0, 0), Err(ConfigError::EmptySystem(0))));
        assert!(strong_majority(&[1, 1], 2, 2).is_err());
        assert!(strong_majority(&[1, 1, 1], 4, 1).is_err());
    }

    #[test]
    fn tally_mode_breaks_ties_low() {
        let mut t = Tally::new();
        for v in [5, 3, 5, 3, 9] {
            t.add(v, 1);
        }
        assert_eq!(t.mode(), Some(3));
        assert_eq!(t.count(5), 2);
        assert_eq!(t.first_reaching(2), Some(3));
        assert_eq!(t.first_reaching(3), None);
        assert_eq!(t.total(), 5);
    }

    /// Two receivers share the correct votes and may see different faulty
    /// entries; they never decide distinct values. Exhaustive for n <= 6 over
    /// a 3-symbol alphabet.
    #[test]
    fn uniqueness_exhaustive_small() {
        for n in 1..=6usize {
            let f = (n - 1) / 3;
            let correct = n - f;
            let combos = |len: usize| 3usize.pow(len as u32);
            for cv in 0..combos(correct) {
                let base: Vec<u8> = (0..correct).map(|i| ((cv / 3usize.pow(i as u32)) % 3) as u8).collect();
                let mut decided = None;
                for fv in 0..combos(f) {
                    let mut votes = base.clone();
                    votes.extend((0..f).map(|i| ((fv / 3usize.pow(i as u32)) % 3) as u8));
                    if let Vote::Value(x) = strong_majority(&votes, n, f).unwrap() {
                        assert!(decided.is_none_or(|d| d == x), "n={n} split decision");
                        decided = Some(x);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn agrees_with_counting(votes in prop::collection::vec(0u8..4, 1..20), f_frac in 0usize..100) {
            let n = votes.len();
            let f = f_frac % n.div_ceil(3).max(1);
            let got = strong_majority(&votes, n, f).unwrap();
            let naive = (0u8..4).find(|x| votes.iter().filter(|v| *v == x).count() >= n - f);
            prop_assert_eq!(got.value(), naive);
        }

        #[test]
        fn tally_matches_naive(vals in prop::collection::vec((0u32..6, 1u32..4), 0..30)) {
            let mut t = Tally::new();
            for &(v, w) in &vals { t.add(v, w); }
            for x in 0..6 {
                let c: u32 = vals.iter().filter(|e| e.0 == x).map(|e| e.1).sum();
                prop_assert_eq!(t.count(x), c);
            }
        }
    }
}
