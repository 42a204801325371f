use proptest::prelude::*;
use synccount_core::{
    rng::seeded_rng, run_execution, step_round, BitString, Configuration, FaultFree, NodeId, Protocol, RunOptions,
    StepCtx, Tally,
};
use synccount_counters::{build_recursive, phase_king_update, Counter, Instruction, KingState, Thresholds};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    /// Agreement on `(x, b = 1)` survives one round of any instruction mix and
    /// any faulty values.
    #[test]
    fn agreement_persists(
        n in 4usize..12,
        c in 2u32..12,
        x_seed in any::<u32>(),
        instrs in prop::collection::vec(0usize..3, 12),
        forged in prop::collection::vec(prop::collection::vec(0u32..13, 4), 12),
        kings in prop::collection::vec(prop::option::of(0u32..13), 12),
    ) {
        let f = (n - 1) / 3;
        let x = x_seed % c;
        let th = Thresholds::broadcast(n, f);
        for v in 0..n - f {
            let mut tally = Tally::new();
            tally.add(x, (n - f) as u32);
            for &m in &forged[v][..f] {
                tally.add(m.min(c), 1);
            }
            let king = kings[v].map(|k| k.min(c));
            let next = phase_king_update(Instruction::ALL[instrs[v]], KingState { a: x, b: true }, &tally, king, th, c);
            prop_assert_eq!(next, KingState { a: (x + 1) % c, b: true });
        }
    }

    /// Every bit pattern of the state width decodes to a state the counter
    /// accepts and steps from.
    #[test]
    fn every_pattern_is_a_state(words in prop::collection::vec(any::<u64>(), 4), v in 0usize..7) {
        let counter = Counter::new(build_recursive(7, 2, 100).unwrap());
        let schema = counter.schema(NodeId(v)).clone();
        let mut bits = BitString::new();
        for w in &words {
            bits.push(*w, 64);
        }
        let state = schema.decode(&mut bits.reader()).unwrap();
        prop_assert!(schema.check(&state).is_ok());
        let msgs: Vec<Vec<u32>> = (0..7).map(|u| {
            let s = counter.schema(NodeId(u));
            s.decode(&mut bits.reader()).unwrap()
        }).collect();
        let inbox: Vec<Option<&Vec<u32>>> = msgs.iter().map(Some).collect();
        let next = counter.transition(NodeId(v), &state, &inbox, &mut StepCtx::new(1, 0));
        prop_assert!(schema.check(&next).is_ok());
    }
}

#[test]
fn runs_are_deterministic() {
    let counter = Counter::new(build_recursive(7, 2, 16).unwrap());
    let run = || run_execution(&counter, &mut FaultFree::new(9), RunOptions::new(300, 9)).unwrap();
    assert_eq!(run(), run());
}

#[test]
fn stabilised_round_advances_outputs() {
    let counter = Counter::new(build_recursive(4, 1, 10).unwrap());
    let mut opts = RunOptions::new(counter.time_bound(), 4);
    opts.keep_states = true;
    let trace = run_execution(&counter, &mut FaultFree::new(4), opts).unwrap();
    assert!(trace.stabilisation().round().is_some());
    let last = trace.rounds.last().unwrap();
    let config = Configuration { round: last.round, states: last.states.clone().unwrap() };
    let (_, rec) = step_round(&counter, &config, &mut FaultFree::new(4), &[false; 4], 4, false).unwrap();
    for v in 0..4 {
        assert_eq!(rec.outputs[v], last.outputs[v].map(|o| (o + 1) % 10));
    }
}

#[test]
fn random_states_stay_legal() {
    let counter = Counter::new(build_recursive(16, 5, 128).unwrap());
    let mut rng = seeded_rng(5);
    for v in 0..16 {
        let s = counter.schema(NodeId(v)).random_state(&mut rng);
        let msgs: Vec<Vec<u32>> = (0..16).map(|u| counter.schema(NodeId(u)).random_state(&mut rng)).collect();
        let inbox: Vec<Option<&Vec<u32>>> = msgs.iter().map(Some).collect();
        let next = counter.transition(NodeId(v), &s, &inbox, &mut StepCtx::new(1, 0));
        assert!(counter.schema(NodeId(v)).check(&next).is_ok());
    }
}
