use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use synccount_core::NodeId;
use synccount_pulling::{
    multinomial_counts, sample_contacts, sample_size, sampled_majority, PullParams, SampledVote,
};

#[test]
fn contacts_replay_from_seed() {
    let draw = || sample_contacts(4, NodeId(2), 32, 500, &mut ChaCha8Rng::seed_from_u64(11));
    assert_eq!(draw(), draw());
    let single = sample_contacts(0, NodeId(0), 1, 50, &mut ChaCha8Rng::seed_from_u64(1));
    assert!(single.targets.iter().all(|&t| t == 0));
    assert_eq!(single.weights(1), vec![50]);
}

#[test]
fn sample_size_is_linear_in_k_ln_eta() {
    let base = f64::from(sample_size(64, 1, 1.0).unwrap());
    for k in 2..6 {
        let ratio = f64::from(sample_size(64, k, 1.0).unwrap()) / base;
        assert!((ratio - f64::from(k)).abs() < 0.01, "{ratio}");
    }
    let ratio = f64::from(sample_size(64 * 64, 1, 1.0).unwrap()) / base;
    assert!((ratio - 2.0).abs() < 0.01);
}

/// All correct responders agree; faulty ones answer something else.
#[test]
fn agreeing_majority_survives_sampling() {
    let params = PullParams::new(32, 2, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let trials = 2000;
    let failures = (0..trials)
        .filter(|&t| {
            let contacts = sample_contacts(t, NodeId(0), 32, params.samples, &mut rng);
            let vote = SampledVote::collect(&contacts, |u| Some(if u < 7 { 1 } else { 0 }));
            sampled_majority(&vote) != Some(0)
        })
        .count();
    assert_eq!(failures, 0);
}

proptest! {
    #[test]
    fn multinomial_counts_sum_to_samples(pop in 1usize..64, samples in 0u32..5000, seed in any::<u64>()) {
        let mut out = Vec::new();
        multinomial_counts(pop, samples, &mut ChaCha8Rng::seed_from_u64(seed), &mut out);
        prop_assert_eq!(out.len(), pop);
        prop_assert_eq!(out.iter().sum::<u32>(), samples);
    }
}

#[test]
fn multinomial_counts_are_uniform_on_average() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut totals = [0u64; 8];
    let mut out = Vec::new();
    for _ in 0..2000 {
        multinomial_counts(8, 100, &mut rng, &mut out);
        totals.iter_mut().zip(&out).for_each(|(t, &x)| *t += u64::from(x));
    }
    // mean 25000 per member, sd about 150
    assert!(totals.iter().all(|&t| t.abs_diff(25_000) < 1_000), "{totals:?}");
}
