use proptest::prelude::*;
use rand::SeedableRng;
use synccount_silencing::shim::{cleared, expected, observe, shim_schema};
use synccount_silencing::{Code, Heard, Parsed};

fn happy(code: &Code, a: u32) -> Option<Parsed> {
    let msg = code.encode_happy(a);
    let schema = synccount_core::Schema::new(vec![]);
    Some(code.parse(&schema, &msg))
}

/// Feed `rounds` messages of a happy sender starting at `start`; return the
/// first message index from which the decoder tracks the sender exactly.
fn lock_round(code: &Code, words: &mut [u32], start: u32, rounds: u32) -> Option<u32> {
    let mut locked = None;
    for r in 0..rounds {
        let a = (start + r) % code.c;
        if observe(code, words, happy(code, a)) == Heard::Happy(a) {
            locked.get_or_insert(r);
        } else {
            locked = None;
        }
    }
    locked
}

#[test]
fn decode_of_encode_is_identity_exhaustive() {
    for kappa in 2..=5u32 {
        let mut periods = vec![kappa, kappa * kappa, kappa * kappa * kappa];
        periods.push(3 * kappa);
        for c in periods {
            let code = Code::new(c, kappa);
            for start in 0..c {
                let mut words = cleared(&code);
                let lock = lock_round(&code, &mut words, start, 3 * kappa + 1);
                assert!(lock.is_some_and(|r| r < kappa), "kappa {kappa} c {c} start {start}: {lock:?}");
            }
        }
    }
}

#[test]
fn parse_inverts_encode() {
    let code = Code::new(1024, 64);
    for a in 0..1024 {
        let (header, balls) = expected(&code, a);
        assert_eq!(happy(&code, a), Some(Parsed::Happy { header, balls }));
    }
}

#[test]
fn window_cost_matches_declared_bound() {
    use synccount_counters::constants::C_ENC;
    for (c, kappa) in [(16, 16), (256, 16), (1024, 64), (4096, 16), (600, 300)] {
        let code = Code::new(c, kappa);
        let b = f64::from(code.balls);
        let bound = C_ENC * (1.0 + b * b.log2());
        for start in (0..c).step_by(kappa as usize) {
            let bits: usize = code.encode_window(start).iter().map(|m| m.len()).sum();
            assert_eq!(bits as u64, code.window_bits());
            assert!(bits as f64 <= bound, "c {c} kappa {kappa}: {bits} > {bound}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn arbitrary_decoder_state_locks_within_two_windows(
        kappa in 2u32..12,
        windows in 1u32..40,
        start in any::<u32>(),
        seed in any::<u64>(),
    ) {
        let code = Code::new(kappa * windows, kappa);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut words = shim_schema(&code).random_state(&mut rng);
        let lock = lock_round(&code, &mut words, start % code.c, 4 * kappa);
        prop_assert!(lock.is_some_and(|r| r < 2 * kappa), "{:?}", lock);
    }
}
