//! Bit-exact wire format of the wrapper.
//!
//! ```text
//! unhappy:  0 1 <wrapped state, field by field>
//! happy:    [0 0] <ball>*          header only when a ≡ 0 (mod kappa)
//! ball:     1 <label, ceil(log2 B) bits>
//! ```
//!
//! A happy sender spreads the window-start value `w = a - (a mod kappa)` over
//! the `kappa` rounds of a window: ball `j` travels in the round whose phase
//! equals base-`kappa` digit `j` of `w`. Labels within a message ascend.

use synccount_core::schema::bits_for;
use synccount_core::{BitString, Schema};

/// Code parameters for period `c` and window `kappa`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Code {
    pub c: u32,
    pub kappa: u32,
    /// Number of base-`kappa` digits, the least `B` with `kappa^B >= c`.
    pub balls: u32,
    pub label_bits: u32,
}

impl Code {
    pub fn new(c: u32, kappa: u32) -> Self {
        assert!(kappa >= 2 && c >= 2, "degenerate code");
        let mut balls = 1;
        let mut span = u64::from(kappa);
        while span < u64::from(c) {
            span *= u64::from(kappa);
            balls += 1;
        }
        Code { c, kappa, balls, label_bits: bits_for(balls) }
    }

    pub fn digit(&self, value: u32, j: u32) -> u32 {
        (u64::from(value) / u64::from(self.kappa).pow(j) % u64::from(self.kappa)) as u32
    }

    /// Bits a happy sender puts on the wire over one window.
    pub fn window_bits(&self) -> u64 {
        2 + u64::from(self.balls) * (1 + u64::from(self.label_bits))
    }

    /// Per-phase messages of a window encoding `value`.
    pub fn encode_window(&self, value: u32) -> Vec<BitString> {
        (0..self.kappa).map(|p| self.happy_message(value, p)).collect()
    }

    fn happy_message(&self, value: u32, phase: u32) -> BitString {
        let mut out = BitString::new();
        if phase == 0 {
            out.push(0b00, 2);
        }
        for j in (0..self.balls).filter(|&j| self.digit(value, j) == phase) {
            out.push_bit(true);
            out.push(u64::from(j), self.label_bits);
        }
        out
    }

    /// This round's message of a happy sender whose counter reads `a`.
    pub fn encode_happy(&self, a: u32) -> BitString {
        let phase = a % self.kappa;
        self.happy_message(a - phase, phase)
    }

    pub fn encode_unhappy(&self, schema: &Schema, state: &[u32]) -> BitString {
        let mut out = BitString::new();
        out.push(0b01, 2);
        schema.encode_into(state, &mut out);
        out
    }

    /// Parse a message; `schema` describes the sender's wrapped state.
    pub fn parse(&self, schema: &Schema, msg: &BitString) -> Parsed {
        let mut r = msg.reader();
        let header = match (msg.get(0), msg.get(1)) {
            (Some(false), Some(true)) => {
                r.read(2);
                if r.remaining() != schema.width() as usize {
                    return Parsed::Malformed;
                }
                return schema.decode(&mut r).map_or(Parsed::Malformed, Parsed::Unhappy);
            }
            (Some(false), Some(false)) => {
                r.read(2);
                true
            }
            (Some(false), None) => return Parsed::Malformed,
            _ => false,
        };
        let mut balls = 0u64;
        let mut last: Option<u32> = None;
        while r.remaining() > 0 {
            if r.read_bit() != Some(true) {
                return Parsed::Malformed;
            }
            let Some(label) = r.read(self.label_bits) else { return Parsed::Malformed };
            let label = label as u32;
            if label >= self.balls || last.is_some_and(|l| label <= l) {
                return Parsed::Malformed;
            }
            last = Some(label);
            balls |= 1 << label;
        }
        Parsed::Happy { header, balls }
    }
}

/// A message as the receiver reads it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Parsed {
    Unhappy(Vec<u32>),
    /// Ball labels as a bit set.
    Happy { header: bool, balls: u64 },
    Malformed,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_counts() {
        assert_eq!(Code::new(16, 16).balls, 1);
        assert_eq!(Code::new(1024, 64).balls, 2);
        assert_eq!(Code::new(4096, 64).balls, 2);
        assert_eq!(Code::new(4097, 64).balls, 3);
        assert_eq!(Code::new(1024, 64).window_bits(), 6);
    }

    #[test]
    fn single_ball_window() {
        let code = Code::new(16, 16);
        let w = code.encode_window(13);
        assert_eq!(w[0].to_bit_string(), "00");
        assert_eq!(w[13].to_bit_string(), "1");
        assert!(w.iter().enumerate().all(|(p, m)| p == 0 || p == 13 || m.is_empty()));
    }

    #[test]
    fn two_ball_window() {
        let kappa = 16;
        let code = Code::new(kappa * kappa, kappa);
        let w = code.encode_window(3 + 7 * kappa);
        assert_eq!(w[3].to_bit_string(), "10");
        assert_eq!(w[7].to_bit_string(), "11");
        let total: usize = w.iter().map(BitString::len).sum();
        assert_eq!(total as u64, code.window_bits());
    }

    #[test]
    fn parse_rejects_junk() {
        let code = Code::new(1024, 64);
        let schema = Schema::new(vec![synccount_core::Field::counter("x", 8)]);
        let junk = |s: &str| code.parse(&schema, &BitString::from_bits(s).unwrap());
        assert_eq!(junk("0"), Parsed::Malformed);
        assert_eq!(junk("0110"), Parsed::Malformed);
        assert_eq!(junk("01101"), Parsed::Unhappy(vec![5]));
        assert_eq!(junk("0010"), Parsed::Happy { header: true, balls: 1 });
        assert_eq!(junk("1110"), Parsed::Malformed);
        assert_eq!(junk("1011"), Parsed::Happy { header: false, balls: 3 });
        assert_eq!(junk("10"), Parsed::Happy { header: false, balls: 1 });
        assert_eq!(junk("101"), Parsed::Malformed);
        assert_eq!(junk(""), Parsed::Happy { header: false, balls: 0 });
    }
}
