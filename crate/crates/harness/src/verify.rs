//! Invariant suites behind `verify`.

use crate::error::HarnessError;
use crate::metrics::RunContext;
use crate::run::{evaluate, for_seeds};
use crate::traces::write_trace;
use crate::{config::AdversaryConfig, ExperimentConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};
use synccount_adversary::{phase_king_suite, Strategy};
use synccount_core::{run_execution, strong_majority, RunOptions, Tally, Trace, Vote};
use synccount_counters::checks::{block_settle_round, check_block_counts, check_settled_consistency, first_clock_window};
use synccount_counters::constants::{C_ENC, GUARD_TAUS};
use synccount_counters::{build_recursive, phase_king_update, Counter, Instruction, KingState, Thresholds, Tree};
use synccount_pulling::{build_recursive_probabilistic, PullParams, Sampler, Topology};
use synccount_silencing::shim::{cleared, observe};
use synccount_silencing::{Code, Heard};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Majority,
    WeakCounter,
    PhaseKingExhaustive,
    PersistenceFuzz,
    SilencingRoundtrip,
    PullingOracle,
    Bounds,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Majority,
        Suite::WeakCounter,
        Suite::PhaseKingExhaustive,
        Suite::PersistenceFuzz,
        Suite::SilencingRoundtrip,
        Suite::PullingOracle,
        Suite::Bounds,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Majority => "majority",
            Suite::WeakCounter => "weak-counter",
            Suite::PhaseKingExhaustive => "phase-king-exhaustive",
            Suite::PersistenceFuzz => "persistence-fuzz",
            Suite::SilencingRoundtrip => "silencing-roundtrip",
            Suite::PullingOracle => "pulling-oracle",
            Suite::Bounds => "bounds",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
            HarnessError::Config(format!("unknown suite {s:?}; expected one of {}", names.join(", ")))
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub checks: u64,
    pub failures: Vec<String>,
    /// Trace files of failing runs.
    pub witnesses: Vec<PathBuf>,
    pub notes: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

pub fn run_suite(suite: Suite, witness_dir: &Path) -> Result<SuiteReport, HarnessError> {
    match suite {
        Suite::Majority => Ok(majority()),
        Suite::WeakCounter => weak_counter(witness_dir),
        Suite::PhaseKingExhaustive => phase_king_exhaustive(),
        Suite::PersistenceFuzz => Ok(persistence_fuzz(20_000, 0)),
        Suite::SilencingRoundtrip => Ok(silencing_roundtrip()),
        Suite::PullingOracle => pulling_oracle(witness_dir),
        Suite::Bounds => bounds(witness_dir),
    }
}

fn strategies() -> impl Iterator<Item = AdversaryConfig> {
    Strategy::ALL.into_iter().map(|strategy| AdversaryConfig { strategy, oblivious: false })
}

fn save_witness(dir: &Path, name: &str, trace: &Trace, bound: u64) -> Result<PathBuf, HarnessError> {
    let path = dir.join(format!("witness-{name}-{}-seed{}.jsonl", trace.adversary, trace.seed));
    let io = |source| HarnessError::Io { run: name.into(), path: path.clone(), source };
    std::fs::create_dir_all(dir).map_err(io)?;
    let file = std::fs::File::create(&path).map_err(io)?;
    let ctx = RunContext { bound, state_bits: 0, kappa: None };
    write_trace(file, trace, ctx, &ExperimentConfig::default()).map_err(io)?;
    Ok(path)
}

/// Count-based oracle against the Boyer-Moore implementation, every vote
/// vector over three values for n <= 7.
fn majority() -> SuiteReport {
    let mut rep = SuiteReport::default();
    for n in 1..=7usize {
        let vectors = 3usize.pow(n as u32);
        for f in 0..n.div_ceil(2) {
            for code in 0..vectors {
                let votes: Vec<u32> = (0..n).map(|i| (code / 3usize.pow(i as u32) % 3) as u32).collect();
                let want = (0..3u32).find(|&x| votes.iter().filter(|&&v| v == x).count() >= n - f);
                let got = strong_majority(&votes, n, f).map(Vote::value);
                rep.check(got == Ok(want), || format!("n={n} f={f} votes={votes:?}: got {got:?}, want {want:?}"));
            }
        }
    }
    rep
}

/// Weak-counter trace assertions on a boost root: settled block votes are
/// pairwise consistent, a `tau` window of agreeing clocks starts before the
/// bound, and blocks within their resilience count from their settle round.
pub fn check_weak_counter(tree: &Tree, trace: &Trace) -> Result<(), String> {
    let Tree::Boost { params: p, children, .. } = tree else {
        return Err("no boost root".into());
    };
    check_settled_consistency(trace, p).map_err(|v| format!("pairwise consistency: {v}"))?;
    let start = first_clock_window(trace, p.tau).ok_or("no agreeing clock window")?;
    if start + u64::from(p.tau) - 1 > tree.time_bound() {
        return Err(format!("clock window starts at {start}, after the bound"));
    }
    for i in 0..2 {
        let block = p.block_offset(i)..p.block_offset(i) + p.block_size(i);
        let faults = trace.faulty.iter().filter(|v| block.contains(&v.index())).count();
        if faults <= p.block_resilience(i) {
            check_block_counts(trace, p, i, block_settle_round(p, children[i].time_bound()))
                .map_err(|v| format!("block count: {v}"))?;
        }
    }
    Ok(())
}

fn weak_counter(dir: &Path) -> Result<SuiteReport, HarnessError> {
    let mut rep = SuiteReport::default();
    let seeds: Vec<u64> = (0..4).collect();
    for (n, f) in [(7, 2), (16, 5)] {
        let counter = Counter::new(build_recursive(n, f, 64).map_err(HarnessError::config)?);
        let horizon = guarded_horizon(counter.tree());
        for adv in strategies() {
            let results = evaluate(&counter, &adv, &seeds, horizon, |t| check_weak_counter(counter.tree(), t))?;
            for (seed, r) in seeds.iter().zip(results) {
                rep.check(r.is_ok(), || format!("({n},{f}) {} seed {seed}: {}", adv.strategy.name(), r.clone().unwrap_err()));
                if r.is_err() {
                    let trace = crate::run::execute(&counter, &adv, *seed, horizon)?;
                    rep.witnesses.push(save_witness(dir, "weak-counter", &trace, counter.time_bound())?);
                }
            }
        }
    }
    Ok(rep)
}

fn phase_king_exhaustive() -> Result<SuiteReport, HarnessError> {
    let mut rep = SuiteReport::default();
    let reports = phase_king_suite(None).map_err(|e| HarnessError::Config(format!("{e:?}")))?;
    let mut branches = 0;
    for r in reports {
        branches += r.branches;
        rep.check(r.holds, || format!("{}: {}", r.instance, r.witness.clone().unwrap_or_default()));
    }
    rep.notes.push(format!("{branches} adversary branches explored"));
    Ok(rep)
}

/// From an agreed configuration, any instruction, king value and faulty votes
/// (equivocating per receiver) lead every correct node to `x + 1`.
pub fn persistence_fuzz(trials: u64, seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = Tally::new();
    for _ in 0..trials {
        let f = rng.random_range(1..=10usize);
        let n = 3 * f + 1 + rng.random_range(0..3usize);
        let c = rng.random_range(2..=64u32);
        let th = Thresholds::broadcast(n, f);
        let mut x = rng.random_range(0..c);
        for _ in 0..rng.random_range(1..=3 * (f + 2)) {
            let instr = Instruction::ALL[rng.random_range(0..3)];
            let king = rng.random_bool(0.2).then(|| rng.random_range(0..=c));
            for _ in 0..n - f {
                tally.clear();
                tally.add(x, (n - f) as u32);
                for _ in 0..f {
                    tally.add(rng.random_range(0..=c), 1);
                }
                let next = phase_king_update(instr, KingState { a: x, b: true }, &tally, king, th, c);
                let want = KingState { a: (x + 1) % c, b: true };
                rep.check(next == want, || format!("n={n} f={f} c={c} x={x} {instr:?} king={king:?}: {next:?}"));
            }
            x = (x + 1) % c;
        }
    }
    rep
}

fn silencing_roundtrip() -> SuiteReport {
    let mut rep = SuiteReport::default();
    let empty = synccount_core::Schema::new(vec![]);
    for kappa in 2..=5u32 {
        for c in [kappa, kappa * kappa, kappa * kappa * kappa, 3 * kappa] {
            let code = Code::new(c, kappa);
            for start in 0..c {
                let mut words = cleared(&code);
                let mut locked: Option<u32> = None;
                for r in 0..3 * kappa + 1 {
                    let a = (start + r) % c;
                    let heard = observe(&code, &mut words, Some(code.parse(&empty, &code.encode_happy(a))));
                    if heard == Heard::Happy(a) {
                        locked.get_or_insert(r);
                    } else {
                        locked = None;
                    }
                }
                rep.check(locked.is_some_and(|r| r < kappa), || format!("kappa={kappa} c={c} start={start}: {locked:?}"));
            }
        }
    }
    for (c, kappa) in [(16, 16), (256, 16), (1024, 64), (4096, 16)] {
        let code = Code::new(c, kappa);
        let b = f64::from(code.balls);
        let bound = C_ENC * (1.0 + b * b.log2());
        rep.check(code.window_bits() as f64 <= bound, || format!("c={c} kappa={kappa}: {} bits > {bound}", code.window_bits()));
    }
    rep
}

fn guarded_horizon(tree: &Tree) -> u64 {
    let tau = match tree {
        Tree::Boost { params, .. } => u64::from(params.tau),
        _ => 1,
    };
    tree.time_bound() + GUARD_TAUS * tau
}

/// Sample-all traces must equal deterministic ones in everything but the
/// protocol label. Returns the first difference, if any.
pub fn sample_all_mismatch(
    det: &Counter,
    all: &Counter<Sampler>,
    strategy: Strategy,
    seed: u64,
    horizon: u64,
) -> Result<Option<String>, HarnessError> {
    let run = |p: &dyn Fn(&mut synccount_adversary::Catalog) -> Result<Trace, synccount_core::SimFault>| {
        p(&mut synccount_adversary::Catalog::new(strategy, seed))
            .map_err(|source| HarnessError::Sim { run: format!("{}/seed {seed}", strategy.name()), source })
    };
    let opts = RunOptions { horizon, seed, keep_states: true };
    let a = run(&|adv| run_execution(det, adv, opts))?;
    let b = run(&|adv| run_execution(all, adv, opts))?;
    Ok(first_difference(&a, &b))
}

fn first_difference(a: &Trace, b: &Trace) -> Option<String> {
    if (&a.adversary, a.seed, &a.faulty) != (&b.adversary, b.seed, &b.faulty) {
        return Some("run identity or faulty set".into());
    }
    if a.initial != b.initial {
        return Some("initial configuration".into());
    }
    if a.rounds.len() != b.rounds.len() {
        return Some("horizon".into());
    }
    a.rounds.iter().zip(&b.rounds).find(|(x, y)| x != y).map(|(x, _)| format!("round {}", x.round))
}

pub fn sample_all_pair(n: usize, f: usize, c: u32) -> Result<(Counter, Counter<Sampler>), HarnessError> {
    let det = Counter::new(build_recursive(n, f, c).map_err(HarnessError::config)?);
    let params = PullParams::new(n.max(2), 2, 1.0).map_err(HarnessError::config)?;
    let sampler = Sampler::new(params, Topology::SampleAll).map_err(HarnessError::config)?;
    let all = build_recursive_probabilistic(n, f, c, sampler).map_err(HarnessError::config)?;
    Ok((det, all))
}

fn pulling_oracle(dir: &Path) -> Result<SuiteReport, HarnessError> {
    let mut rep = SuiteReport::default();
    let (det, all) = sample_all_pair(16, 5, 128)?;
    let seeds: Vec<u64> = (0..4).collect();
    for strategy in Strategy::ALL {
        let diffs = for_seeds(&seeds, |seed| sample_all_mismatch(&det, &all, strategy, seed, 200))?;
        for (seed, diff) in seeds.iter().zip(diffs) {
            rep.check(diff.is_none(), || format!("{} seed {seed}: traces differ at {}", strategy.name(), diff.clone().unwrap()));
            if diff.is_some() {
                let adv = AdversaryConfig { strategy, oblivious: false };
                let trace = crate::run::execute(&all, &adv, *seed, 200)?;
                rep.witnesses.push(save_witness(dir, "pulling-oracle", &trace, all.time_bound())?);
            }
        }
    }
    Ok(rep)
}

fn bounds(dir: &Path) -> Result<SuiteReport, HarnessError> {
    let mut rep = SuiteReport::default();
    let seeds: Vec<u64> = (0..5).collect();
    for f in [1usize, 2, 5] {
        let n = 3 * f + 1;
        let counter = Counter::new(build_recursive(n, f, 128).map_err(HarnessError::config)?);
        let (bound, _) = synccount_counters::analytic_bounds(counter.tree());
        let horizon = guarded_horizon(counter.tree());
        let mut worst = 0;
        for adv in strategies() {
            let stab = evaluate(&counter, &adv, &seeds, horizon, |t| t.stabilisation().round())?;
            for (seed, t) in seeds.iter().zip(stab) {
                worst = worst.max(t.unwrap_or(u64::MAX));
                rep.check(t.is_some_and(|t| t <= bound), || {
                    format!("({n},{f}) {} seed {seed}: stabilised {t:?}, bound {bound}", adv.strategy.name())
                });
                if !t.is_some_and(|t| t <= bound) {
                    let trace = crate::run::execute(&counter, &adv, *seed, horizon)?;
                    rep.witnesses.push(save_witness(dir, "bounds", &trace, bound)?);
                }
            }
        }
        rep.notes.push(format!("({n},{f}) c=128: analytic bound {bound}, worst measured {worst}"));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_suites_pass() {
        for rep in [majority(), persistence_fuzz(500, 1), silencing_roundtrip()] {
            assert!(rep.passed(), "{:?}", rep.failures);
            assert!(rep.checks > 0);
        }
    }

    #[test]
    fn suite_names_parse() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }
}
