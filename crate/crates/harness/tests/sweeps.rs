use synccount_adversary::Strategy;
use synccount_harness::metrics::read_csv;
use synccount_harness::sweep::{trace_path, METRICS_FILE};
use synccount_harness::traces::rederive;
use synccount_harness::{run_sweep, ExperimentConfig, Mode};

fn config(dir: &std::path::Path, n: usize, f: usize, c: u32, seeds: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.construction.n = n;
    cfg.construction.f = f;
    cfg.construction.c = c;
    cfg.run.seeds = seeds;
    cfg.output.dir = dir.to_str().unwrap().into();
    cfg
}

fn assert_rederivable(cfg: &ExperimentConfig) {
    let dir = std::path::Path::new(&cfg.output.dir);
    let rows = read_csv(&dir.join(METRICS_FILE)).unwrap();
    assert_eq!(rows.len() as u64, cfg.run.seeds);
    for row in rows {
        assert_eq!(rederive(&trace_path(dir, row.seed)).unwrap(), row);
    }
}

#[test]
fn metrics_are_rederived_from_trace_files() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = config(&tmp.path().join("det"), 7, 2, 32, 3);
    cfg.adversary.strategy = Strategy::ResetSpammer;
    let sweep = run_sweep(&cfg).unwrap();
    assert!(sweep.all_within_bound());
    assert_rederivable(&cfg);

    let mut cfg = config(&tmp.path().join("silenced"), 4, 1, 600, 2);
    cfg.construction.mode = Mode::Silenced;
    cfg.construction.kappa = 300;
    let sweep = run_sweep(&cfg).unwrap();
    assert!(sweep.rows.iter().all(|r| r.windows.is_some_and(|w| w > 0)));
    assert_rederivable(&cfg);

    let mut cfg = config(&tmp.path().join("all"), 7, 2, 32, 2);
    cfg.construction.mode = Mode::SampleAll;
    run_sweep(&cfg).unwrap();
    assert_rederivable(&cfg);
}

#[test]
fn hundred_seed_sweep_stays_within_the_bound() {
    let tmp = tempfile::tempdir().unwrap();
    let mut cfg = config(tmp.path(), 16, 5, 128, 100);
    cfg.output.traces = false;
    let sweep = run_sweep(&cfg).unwrap();
    assert_eq!(sweep.rows.len(), 100);
    assert!(sweep.rows.windows(2).all(|w| w[0].seed < w[1].seed));
    assert!(sweep.all_within_bound(), "{:?}", sweep.rows.iter().find(|r| !r.within_bound));
    assert_eq!(read_csv(&tmp.path().join(METRICS_FILE)).unwrap(), sweep.rows);
}

#[test]
fn worker_count_does_not_change_results() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config(&tmp.path().join("a"), 7, 2, 32, 6);
    let a = run_sweep(&cfg).unwrap();
    std::env::set_var(synccount_harness::run::WORKERS_VAR, "3");
    let b = run_sweep(&config(&tmp.path().join("b"), 7, 2, 32, 6)).unwrap();
    std::env::remove_var(synccount_harness::run::WORKERS_VAR);
    assert_eq!(a.rows, b.rows);
}
