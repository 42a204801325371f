use synccount_core::schema::bits_for;
use synccount_core::{run_execution, Adversary, NodeId, Protocol, RunOptions, StepCtx, View};
use synccount_counters::constants::{ALPHA, BETA, KAPPA_BOOST, STATE_CURVATURE};
use synccount_counters::tree::{header_schema, hdr};
use synccount_counters::{
    analytic_bounds, boost, boost_overhead, build_recursive, extend_followers, trivial_counter, BoostParams,
    BuildError, Counter, Tree,
};

/// Fixed initial states, no faults.
struct Start(Vec<Vec<u32>>);

impl<P: Protocol> Adversary<P> for Start {
    fn name(&self) -> String {
        "fixed-start".into()
    }
    fn select_faults(&mut self, _p: &P) -> Vec<NodeId> {
        vec![]
    }
    fn initial_state(&mut self, _p: &P, v: NodeId) -> Vec<u32> {
        self.0[v.index()].clone()
    }
    fn emit(&mut self, _: &View<'_, P>, _: NodeId, _: NodeId) -> Option<P::Msg> {
        None
    }
}

fn outputs(counter: &Counter, start: Vec<Vec<u32>>, horizon: u64) -> Vec<Vec<u32>> {
    let trace = run_execution(counter, &mut Start(start), RunOptions::new(horizon, 0)).unwrap();
    trace.output_rows().iter().map(|row| row.iter().map(|o| o.unwrap()).collect()).collect()
}

#[test]
fn trivial_counter_counts() {
    let c3 = Counter::new(trivial_counter(3).unwrap());
    let rows = outputs(&c3, vec![vec![2]], 3);
    assert_eq!(rows, vec![vec![2], vec![0], vec![1], vec![2]]);
    let c2 = Counter::new(trivial_counter(2).unwrap());
    assert_eq!(outputs(&c2, vec![vec![0]], 3), vec![vec![0], vec![1], vec![0], vec![1]]);
    assert_eq!(Counter::new(trivial_counter(1024).unwrap()).state_bits(), 10);
    assert!(trivial_counter(1).is_err());
    assert_eq!(analytic_bounds(&trivial_counter(1024).unwrap()), (0, 10));
}

#[test]
fn trivial_step_from_five() {
    let c8 = Counter::new(trivial_counter(8).unwrap());
    let next = c8.transition(NodeId(0), &[5], &[None], &mut StepCtx::new(1, 0));
    assert_eq!(next, vec![6]);
    assert_eq!(c8.output(NodeId(0), &next), 6);
}

#[test]
fn followers_copy_core_majority() {
    let core = build_recursive(4, 1, 8).unwrap();
    let core_bound = core.time_bound();
    let extended = extend_followers(core.clone(), 6).unwrap();
    assert_eq!(extended.time_bound(), core_bound + 1);
    assert!(matches!(extend_followers(core.clone(), 4), Err(BuildError::NoFollowers { core: 4, total: 4 })));

    // A leaf core of one node and three followers: followers lag one round
    // behind the core's previous output, so they agree from round 1.
    let leaf = Counter::new(extend_followers(trivial_counter(5).unwrap(), 4).unwrap());
    let rows = outputs(&leaf, vec![vec![3], vec![0], vec![4], vec![1]], 4);
    for row in &rows[1..] {
        assert!(row.iter().all(|&o| o == row[0]), "{row:?}");
    }
    assert_eq!(rows[1][0], 4);
}

#[test]
fn boost_params_examples() {
    let p = BoostParams::new(4, 1, 3).unwrap();
    assert_eq!((p.n0, p.n1, p.f0, p.f1, p.tau, p.c0, p.c1), (2, 2, 0, 0, 9, 18, 54));
    let p = BoostParams::new(16, 5, 128).unwrap();
    assert_eq!((p.tau, p.c0, p.c1, p.f0, p.f1), (21, 42, 126, 2, 2));
}

#[test]
fn recursive_shapes() {
    let t = build_recursive(4, 1, 3).unwrap();
    let Tree::Boost { children, .. } = &t else { panic!("expected boost root") };
    for child in children.iter() {
        assert_eq!((child.n(), child.f()), (2, 0));
        assert!(matches!(child, Tree::Followers { .. }));
    }

    // 16 nodes, 5 faults: two 8-node 2-resilient blocks, each splitting into a
    // 0-resilient and a 1-resilient 4-node block; the latter boosts two
    // 2-node leaves.
    let t = build_recursive(16, 5, 128).unwrap();
    assert_eq!(t.depth(), 4);
    let Tree::Boost { children, .. } = &t else { panic!() };
    for (j, child) in children.iter().enumerate() {
        assert_eq!((child.n(), child.f(), child.c()), (8, 2, [42, 126][j]));
        let Tree::Boost { children: grand, .. } = child else { panic!() };
        assert_eq!([grand[0].n(), grand[0].f(), grand[1].n(), grand[1].f()], [4, 0, 4, 1]);
        assert!(matches!(grand[1], Tree::Boost { .. }));
    }

    let leaf = build_recursive(1, 0, 10).unwrap();
    assert_eq!(leaf, Tree::Trivial { c: 10 });
    assert_eq!(leaf.time_bound(), 0);

    assert!(build_recursive(4, 2, 8).is_err());
    assert!(build_recursive(0, 0, 8).is_err());
}

#[test]
fn boost_checks_children() {
    let p = BoostParams::new(4, 1, 8).unwrap();
    let good = || [build_recursive(2, 0, 18).unwrap(), build_recursive(2, 0, 54).unwrap()];
    assert!(boost(good(), p).is_ok());
    let wrong_c = [build_recursive(2, 0, 17).unwrap(), build_recursive(2, 0, 54).unwrap()];
    assert!(matches!(boost(wrong_c, p), Err(BuildError::ChildMismatch { block: 0, .. })));
    let p = BoostParams::new(7, 2, 8).unwrap();
    let weak = [build_recursive(3, 0, p.c0).unwrap(), build_recursive(4, 0, p.c1).unwrap()];
    assert!(matches!(boost(weak, p), Err(BuildError::ChildResilience { block: 1, got: 0, want: 1 })));
}

#[test]
fn boost_overhead_is_documented_constant() {
    for f in 1..200u32 {
        let tau = 3 * (f + 2);
        let c1 = 6 * u64::from(tau);
        // R = T + 2 + 2 c1; leader window ends before R + 3 c1; then tau + 4.
        let expected = 2 + 2 * c1 + 3 * c1 + u64::from(tau) + 4;
        assert_eq!(boost_overhead(tau), expected);
        assert!(expected <= KAPPA_BOOST * u64::from(tau));
    }
}

#[test]
fn state_bits_add_header_fields() {
    for &(n, f, c) in &[(4, 1, 3), (7, 2, 100), (16, 5, 128), (31, 10, 1024)] {
        let t = build_recursive(n, f, c).unwrap();
        let Tree::Boost { params: p, children, .. } = &t else { panic!() };
        let fields = bits_for(c + 1)
            + 1
            + bits_for(p.c0)
            + bits_for(p.c1)
            + bits_for(p.c0 + 1)
            + bits_for(p.c1 + 1)
            + 2 * bits_for(2 * p.c1 + 1);
        assert_eq!(header_schema(p).width(), fields);
        assert_eq!(t.state_bits(), fields + children[0].state_bits().max(children[1].state_bits()));
        assert_eq!(header_schema(p).len(), hdr::LEN);
        let counter = Counter::new(t.clone());
        assert_eq!(counter.state_bits(), t.state_bits());
    }
}

#[test]
fn time_bound_within_alpha_recursion() {
    for f in 1..=400usize {
        let t = build_recursive(3 * f + 1, f, 64).unwrap();
        let levels = (f as f64).log2().ceil() as i32;
        let series: f64 = (0..=levels).map(|k| 2f64.powi(-k)).sum();
        let bound = 1.0 + (ALPHA * f as u64) as f64 * series;
        assert!((t.time_bound() as f64) <= bound, "f={f}: {} > {bound}", t.time_bound());
        assert!(t.depth() as i32 <= levels + 2);
    }
}

#[test]
fn state_bits_within_beta() {
    for f in 1..=300usize {
        for k in 1..=31u32 {
            let c = ((1u64 << k) - 1).max(2) as u32;
            for c in [c, c.saturating_add(1)] {
                let t = build_recursive(3 * f + 1, f, c).unwrap();
                let lf = (f as f64).log2();
                let target = BETA * (lf * lf + f64::from(c).log2());
                assert!(f64::from(t.state_bits()) <= target, "f={f} c={c}: {} > {target}", t.state_bits());
            }
        }
    }
}

#[test]
fn state_bits_grow_quadratically_in_log_f() {
    let bits: Vec<i64> =
        (0..11).map(|k| build_recursive(3 * (1 << k) + 1, 1 << k, 128).unwrap().state_bits() as i64).collect();
    for w in bits.windows(3) {
        let second = w[2] - 2 * w[1] + w[0];
        assert!(second.unsigned_abs() <= u64::from(STATE_CURVATURE), "{bits:?}");
    }
}

#[test]
fn analytic_bounds_monotone() {
    let mut prev = (0, 0);
    for f in 1..60usize {
        let b = analytic_bounds(&build_recursive(3 * f + 1, f, 64).unwrap());
        assert!(b.0 >= prev.0 && b.1 >= prev.1, "f={f}");
        prev = b;
    }
    for c in 2..300u32 {
        let a = analytic_bounds(&build_recursive(7, 2, c).unwrap());
        let b = analytic_bounds(&build_recursive(7, 2, c + 1).unwrap());
        assert!(b.1 >= a.1);
        assert_eq!(a.0, b.0);
    }
}
