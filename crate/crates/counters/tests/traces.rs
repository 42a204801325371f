use synccount_core::rng::{derive, seeded_rng, SimRng};
use synccount_core::{run_execution, Adversary, FaultFree, NodeId, Protocol, RunOptions, Trace, View};
use synccount_counters::checks::{block_settle_round, check_block_counts, check_settled_consistency, first_clock_window};
use synccount_counters::constants::GUARD_TAUS;
use synccount_counters::{build_recursive, Counter, Tree};

/// Faulty nodes spread over both blocks, sending fresh random states to
/// every recipient.
struct Noise {
    rng: SimRng,
    faults: Vec<NodeId>,
}

impl<P: Protocol> Adversary<P> for Noise {
    fn name(&self) -> String {
        "noise".into()
    }
    fn select_faults(&mut self, _p: &P) -> Vec<NodeId> {
        self.faults.clone()
    }
    fn initial_state(&mut self, p: &P, v: NodeId) -> Vec<u32> {
        p.schema(v).random_state(&mut self.rng)
    }
    fn emit(&mut self, _view: &View<'_, P>, sender: NodeId, _recipient: NodeId) -> Option<P::Msg> {
        Some(_view.protocol.garbage(sender, &mut self.rng))
    }
}

fn run(n: usize, f: usize, c: u32, seed: u64, faults: Vec<NodeId>) -> (Counter, Trace) {
    let counter = Counter::new(build_recursive(n, f, c).unwrap());
    let Tree::Boost { params, .. } = counter.tree() else { panic!() };
    let horizon = counter.time_bound() + GUARD_TAUS * u64::from(params.tau);
    let trace = if faults.is_empty() {
        run_execution(&counter, &mut FaultFree::new(seed), RunOptions::new(horizon, seed))
    } else {
        let mut adv = Noise { rng: seeded_rng(derive(seed, &[1])), faults };
        run_execution(&counter, &mut adv, RunOptions::new(horizon, seed))
    }
    .unwrap();
    (counter, trace)
}

fn check_all(counter: &Counter, trace: &Trace) {
    let Tree::Boost { params: p, children, .. } = counter.tree() else { panic!() };
    check_settled_consistency(trace, p).unwrap();
    let start = first_clock_window(trace, p.tau).expect("no clock window");
    assert!(start + u64::from(p.tau) - 1 <= counter.time_bound());
    for i in 0..2 {
        let block = p.block_offset(i)..p.block_offset(i) + p.block_size(i);
        let faults = trace.faulty.iter().filter(|v| block.contains(&v.index())).count();
        if faults <= p.block_resilience(i) {
            check_block_counts(trace, p, i, block_settle_round(p, children[i].time_bound())).unwrap();
        }
    }
    let t = trace.stabilisation().round().expect("not stabilised");
    assert!(t <= counter.time_bound());
}

#[test]
fn fault_free_traces_satisfy_weak_counter_invariants() {
    for &(n, f) in &[(4, 1), (7, 2), (16, 5)] {
        for seed in 0..5 {
            let (counter, trace) = run(n, f, 64, seed, vec![]);
            check_all(&counter, &trace);
        }
    }
}

#[test]
fn noisy_traces_satisfy_weak_counter_invariants() {
    let cases: [(usize, usize, Vec<usize>); 3] = [(4, 1, vec![3]), (7, 2, vec![0, 6]), (16, 5, vec![0, 1, 2, 9, 15])];
    for (n, f, faulty) in cases {
        for seed in 0..5 {
            let (counter, trace) = run(n, f, 64, seed, faulty.iter().map(|&v| NodeId(v)).collect());
            check_all(&counter, &trace);
        }
    }
}

#[test]
fn consistency_check_catches_disagreement() {
    let (counter, mut trace) = run(4, 1, 64, 1, vec![]);
    let Tree::Boost { params: p, .. } = counter.tree() else { panic!() };
    let r = trace.rounds.len() - 3;
    let probe = trace.rounds[r].probes[0].as_mut().unwrap();
    let d = probe.block_view[0].unwrap();
    probe.block_view[0] = Some((d + 1) % p.c0);
    assert!(check_settled_consistency(&trace, p).is_err());
}
