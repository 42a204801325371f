//! Packed state layouts.
//!
//! A state is a vector of words, one per [`Field`], each in `[0, range)`. The
//! encoded width of a field is `ceil(log2(range))`; decoding reduces every raw
//! value modulo its range, so every bit pattern of the full width is a legal
//! state.

use crate::bits::{BitReader, BitString};
use rand::RngCore;
use std::sync::Arc;

/// What a field means, so adversaries can forge plausible values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldKind {
    /// A counter value in `[modulus]`.
    Counter { modulus: u32 },
    /// A counter value in `[modulus]` or the reset marker `modulus` (bottom or infinity).
    Marked { modulus: u32 },
    Flag,
    /// A countdown in `[0, max]`.
    Cooldown { max: u32 },
    /// Bookkeeping without counter semantics.
    Aux,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Field {
    pub name: &'static str,
    pub range: u32,
    pub kind: FieldKind,
}

impl Field {
    pub fn counter(name: &'static str, modulus: u32) -> Self {
        Field { name, range: modulus, kind: FieldKind::Counter { modulus } }
    }

    pub fn marked(name: &'static str, modulus: u32) -> Self {
        Field { name, range: modulus + 1, kind: FieldKind::Marked { modulus } }
    }

    pub fn flag(name: &'static str) -> Self {
        Field { name, range: 2, kind: FieldKind::Flag }
    }

    pub fn cooldown(name: &'static str, max: u32) -> Self {
        Field { name, range: max + 1, kind: FieldKind::Cooldown { max } }
    }

    pub fn aux(name: &'static str, range: u32) -> Self {
        Field { name, range, kind: FieldKind::Aux }
    }

    pub fn width(&self) -> u32 {
        bits_for(self.range)
    }
}

/// `ceil(log2(range))`, with ranges 0 and 1 needing no bits.
pub fn bits_for(range: u32) -> u32 {
    if range <= 1 {
        0
    } else {
        32 - (range - 1).leading_zeros()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Schema {
    fields: Vec<Field>,
    width: u32,
}

impl Schema {
    pub fn new(fields: Vec<Field>) -> Self {
        let width = fields.iter().map(Field::width).sum();
        Schema { fields, width }
    }

    /// `self` followed by `tail`.
    pub fn concat(&self, tail: &Schema) -> Self {
        let mut fields = self.fields.clone();
        fields.extend(tail.fields.iter().cloned());
        Schema::new(fields)
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    /// Encoded width in bits.
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn check(&self, words: &[u32]) -> Result<(), String> {
        if words.len() != self.fields.len() {
            return Err(format!("{} words, layout has {}", words.len(), self.fields.len()));
        }
        for (w, fd) in words.iter().zip(&self.fields) {
            if *w >= fd.range {
                return Err(format!("{} = {} outside [0, {})", fd.name, w, fd.range));
            }
        }
        Ok(())
    }

    pub fn encode_into(&self, words: &[u32], out: &mut BitString) {
        for (w, fd) in words.iter().zip(&self.fields) {
            out.push(u64::from(*w), fd.width());
        }
    }

    pub fn encode(&self, words: &[u32]) -> BitString {
        let mut b = BitString::new();
        self.encode_into(words, &mut b);
        b
    }

    /// Total decoder: consumes exactly `width()` bits, reducing each field
    /// modulo its range. `None` only if too few bits remain.
    pub fn decode(&self, r: &mut BitReader<'_>) -> Option<Vec<u32>> {
        self.fields
            .iter()
            .map(|fd| r.read(fd.width()).map(|raw| (raw % u64::from(fd.range.max(1))) as u32))
            .collect()
    }

    /// Decode a uniformly random bit pattern of full width.
    pub fn random_state(&self, rng: &mut dyn RngCore) -> Vec<u32> {
        self.fields
            .iter()
            .map(|fd| {
                let w = fd.width();
                let raw = if w == 0 { 0 } else { rng.next_u64() & (u64::MAX >> (64 - w)) };
                (raw % u64::from(fd.range.max(1))) as u32
            })
            .collect()
    }
}

pub type SharedSchema = Arc<Schema>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;
    use proptest::prelude::*;

    #[test]
    fn widths() {
        assert_eq!(bits_for(1), 0);
        assert_eq!(bits_for(2), 1);
        assert_eq!(bits_for(3), 2);
        assert_eq!(bits_for(1024), 10);
        assert_eq!(bits_for(1025), 11);
        assert_eq!(Field::marked("a", 128).width(), 8);
    }

    fn sample() -> Schema {
        Schema::new(vec![
            Field::marked("a", 10),
            Field::flag("b"),
            Field::counter("m", 18),
            Field::cooldown("w", 108),
        ])
    }

    #[test]
    fn random_states_are_legal() {
        let s = sample();
        let mut rng = seeded_rng(3);
        for _ in 0..200 {
            assert!(s.check(&s.random_state(&mut rng)).is_ok());
        }
    }

    proptest! {
        #[test]
        fn every_pattern_decodes(raw in prop::collection::vec(any::<bool>(), 20)) {
            let s = sample();
            let mut b = BitString::new();
            for bit in raw.iter().take(s.width() as usize) {
                b.push_bit(*bit);
            }
            let st = s.decode(&mut b.reader()).unwrap();
            prop_assert!(s.check(&st).is_ok());
        }

        #[test]
        fn legal_states_round_trip(a in 0u32..11, b in 0u32..2, m in 0u32..18, w in 0u32..109) {
            let s = sample();
            let st = vec![a, b, m, w];
            let enc = s.encode(&st);
            prop_assert_eq!(enc.len() as u32, s.width());
            prop_assert_eq!(s.decode(&mut enc.reader()).unwrap(), st);
        }
    }
}
