use std::path::Path;
use std::process::{Command, Output};

fn synccount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_synccount")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn build_reports_shape_and_rejects_infeasible_resilience() {
    let out = synccount(&["build", "16", "5", "128", "--json"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["boost_levels"], 3);
    assert_eq!(report["tree"]["params"]["n0"], 8);
    assert_eq!(report["time_bound"], 1321);

    let out = synccount(&["build", "4", "2", "8"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("f < n/3"));

    let out = synccount(&["build", "32", "7", "64", "--mode", "pulled", "--gamma", "1", "--json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["samples"], 2995);
    assert_eq!(code(&synccount(&["build", "32", "8", "64", "--mode", "pulled"])), 2);
}

fn read_dir(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    for entry in walk(dir) {
        files.push((entry.strip_prefix(dir).unwrap().display().to_string(), std::fs::read(&entry).unwrap()));
    }
    files.sort();
    files
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    std::fs::read_dir(dir)
        .unwrap()
        .flat_map(|e| {
            let path = e.unwrap().path();
            if path.is_dir() {
                walk(&path)
            } else {
                vec![path]
            }
        })
        .collect()
}

#[test]
fn rerun_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let out = out.to_str().unwrap();
    let args = ["sweep", "--n", "7", "--f", "2", "--c", "32", "--seeds", "4", "--adversary", "equivocator", "--out", out];
    assert_eq!(code(&synccount(&args)), 0);
    let first = read_dir(Path::new(out));
    assert_eq!(first.len(), 5);
    std::fs::remove_dir_all(out).unwrap();
    assert_eq!(code(&synccount(&args)), 0);
    assert_eq!(read_dir(Path::new(out)), first);
}

#[test]
fn configuration_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    let short = synccount(&["run", "--n", "7", "--f", "2", "--horizon", "100", "--out", out]);
    assert_eq!(code(&short), 2);
    assert!(String::from_utf8_lossy(&short.stderr).contains("guard band"));
    let overridden = synccount(&["run", "--n", "7", "--f", "2", "--horizon", "100", "--allow-short-horizon", "--out", out]);
    assert_ne!(code(&overridden), 2);

    let frozen = synccount(&["run", "--n", "32", "--f", "7", "--c", "64", "--mode", "frozen", "--out", out]);
    assert_eq!(code(&frozen), 2);
    assert_eq!(code(&synccount(&["verify", "nope"])), 2);
    assert_eq!(code(&synccount(&["run", "--adversary", "nope"])), 2);
}

#[test]
fn print_config_round_trips() {
    let out = synccount(&["sweep", "--n", "10", "--f", "3", "--seeds", "7", "--print-config"]);
    assert_eq!(code(&out), 0);
    let cfg = synccount_harness::ExperimentConfig::from_toml(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!((cfg.construction.n, cfg.construction.f, cfg.run.seeds), (10, 3, 7));

    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("exp.toml");
    std::fs::write(&path, cfg.to_toml()).unwrap();
    let again = synccount(&["sweep", "--config", path.to_str().unwrap(), "--print-config"]);
    assert_eq!(String::from_utf8(again.stdout).unwrap(), cfg.to_toml());
}

#[test]
fn verify_runs_a_suite() {
    let out = synccount(&["verify", "majority"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("majority: pass"));
}
