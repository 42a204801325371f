//! Bit-exact message payloads.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Growable bit string. Bits are appended most-significant first within each
/// pushed field; the length is exact, so wire accounting never rounds to bytes.
#[derive(Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push_bit(&mut self, bit: bool) {
        let (w, o) = (self.len / 64, self.len % 64);
        if w == self.words.len() {
            self.words.push(0);
        }
        if bit {
            self.words[w] |= 1 << o;
        }
        self.len += 1;
    }

    /// Append the low `width` bits of `value`, high bit first.
    pub fn push(&mut self, value: u64, width: u32) {
        debug_assert!(width == 64 || value >> width == 0, "value {value} wider than {width}");
        if width == 0 {
            return;
        }
        // Storage is least-significant first, so reverse the field once.
        let rev = value.reverse_bits() >> (64 - width);
        let (w, o) = (self.len / 64, (self.len % 64) as u32);
        let end = self.len + width as usize;
        self.words.resize(end.div_ceil(64), 0);
        self.words[w] |= rev << o;
        if o + width > 64 {
            self.words[w + 1] |= rev >> (64 - o);
        }
        self.len = end;
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        (i < self.len).then(|| (self.words[i / 64] >> (i % 64)) & 1 == 1)
    }

    pub fn extend(&mut self, other: &BitString) {
        for i in 0..other.len {
            self.push_bit(other.get(i).unwrap_or(false));
        }
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader { bits: self, pos: 0 }
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.len).map(|i| if self.get(i) == Some(true) { '1' } else { '0' }).collect()
    }

    pub fn from_bits(s: &str) -> Option<Self> {
        let mut b = BitString::new();
        for ch in s.chars() {
            match ch {
                '0' => b.push_bit(false),
                '1' => b.push_bit(true),
                _ => return None,
            }
        }
        Some(b)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({})", self.to_bit_string())
    }
}

/// Sequential reader over a [`BitString`].
#[derive(Clone, Debug)]
pub struct BitReader<'a> {
    bits: &'a BitString,
    pos: usize,
}

impl BitReader<'_> {
    pub fn remaining(&self) -> usize {
        self.bits.len - self.pos
    }

    pub fn read_bit(&mut self) -> Option<bool> {
        let b = self.bits.get(self.pos)?;
        self.pos += 1;
        Some(b)
    }

    pub fn read(&mut self, width: u32) -> Option<u64> {
        if self.remaining() < width as usize {
            return None;
        }
        if width == 0 {
            return Some(0);
        }
        let (w, o) = (self.pos / 64, (self.pos % 64) as u32);
        let mut raw = self.bits.words[w] >> o;
        if o + width > 64 {
            raw |= self.bits.words[w + 1] << (64 - o);
        }
        let mask = u64::MAX >> (64 - width);
        self.pos += width as usize;
        Some((raw & mask).reverse_bits() >> (64 - width))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_string_has_no_bits() {
        let b = BitString::new();
        assert_eq!(b.len(), 0);
        assert_eq!(b.reader().read_bit(), None);
    }

    #[test]
    fn text_round_trip() {
        let b = BitString::from_bits("0110").unwrap();
        assert_eq!(b.to_bit_string(), "0110");
        assert_eq!(b.reader().read(4), Some(0b0110));
    }

    proptest! {
        #[test]
        fn push_then_read(fields in prop::collection::vec((0u64..1 << 20, 0u32..21), 0..40)) {
            let mut b = BitString::new();
            let mut total = 0;
            for &(v, w) in &fields {
                let v = if w == 0 { 0 } else { v & ((1 << w) - 1) };
                b.push(v, w);
                total += w as usize;
            }
            prop_assert_eq!(b.len(), total);
            let mut r = b.reader();
            for &(v, w) in &fields {
                let v = if w == 0 { 0 } else { v & ((1 << w) - 1) };
                prop_assert_eq!(r.read(w), Some(v));
            }
            prop_assert_eq!(r.remaining(), 0);
        }
    }
}
