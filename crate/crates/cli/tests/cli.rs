use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multicache")).args(args).output().expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_owned()
}

#[test]
fn coverage_writes_csv_and_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["coverage", "--trials", "500", "--gamma-db=-60,0", "--out", &out_arg(dir.path()), "--plot"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(dir.path(), "coverage.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "scheme,k,gamma_db,mc,mc_stderr,exact,lower,upper");
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').skip(2).map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 2 * 2 * 2);
    for r in &rows {
        assert!(r[4] <= r[5], "lower ≤ upper");
        if r[0] == -60.0 {
            assert!(r[1] >= 0.999 && r[3] >= 0.999 && r[4] >= 0.999 && r[5] >= 0.999, "{r:?}");
        }
    }
    let resolved = read(dir.path(), "config.resolved.toml");
    assert!(resolved.contains("trials = 500"));
    assert!(resolved.contains("zipf_delta = 0.9"));
    assert!(read(dir.path(), "coverage.gp").contains("coverage.csv"));
}

#[test]
fn csv_is_byte_stable_across_workers() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, w) in [(&a, "1"), (&b, "3")] {
        let o = run(&["coverage", "--trials", "4500", "--seed", "9", "--workers", w, "--gamma-db", "0,5", "--out", &out_arg(dir.path())]);
        assert!(o.status.success());
    }
    assert_eq!(read(a.path(), "coverage.csv"), read(b.path(), "coverage.csv"));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(&cfg, "trials = 50\nschemes = [\"zf\"]\n[content]\nzipf_delta = 0.0\n").unwrap();
    let o = run(&["optimize", "--config", cfg.to_str().unwrap(), "--gamma-db", "10", "--out", &out_arg(dir.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let policy = read(dir.path(), "policy.csv");
    assert!(policy.starts_with("gamma_db,n,popularity,mpc,opc_zf\n"));
    for line in policy.lines().skip(1) {
        assert_eq!(line.rsplit(',').next().unwrap(), "0.100000000");
    }
    assert!(read(dir.path(), "stp.csv").contains("zf,10.00,opc,"));
}

#[test]
fn unknown_config_key_exits_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "seed = 1\n\n[network]\nantenas = 3\n").unwrap();
    let o = run(&["coverage", "--config", cfg.to_str().unwrap(), "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 4") && err.contains("antenas"), "{err}");
}

#[test]
fn physical_violation_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[network]\nantennas = 1\n").unwrap();
    let o = run(&["coverage", "--config", cfg.to_str().unwrap(), "--out", &out_arg(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("schemes"));
}

#[test]
fn bad_flags_exit_2() {
    assert_eq!(run(&["coverage", "--scheme", "mmse"]).status.code(), Some(2));
    assert_eq!(run(&["validate", "--level", "slow"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn compare_and_simulate_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["compare", "--gamma-db=-10,10", "--out", &out_arg(dir.path())]);
    assert!(o.status.success());
    let antennas = read(dir.path(), "compare_antennas.csv");
    assert!(antennas.starts_with("scheme,antennas,gamma_db,stp_opc,stp_mpc\n"));
    assert_eq!(antennas.lines().count(), 1 + 2 * 2 * 2);
    assert!(read(dir.path(), "compare_delta.csv").lines().count() > 1);

    let o = run(&["simulate", "--trials", "300", "--scheme", "mf", "--gamma-db", "0", "--out", &out_arg(dir.path())]);
    assert!(o.status.success());
    assert_eq!(read(dir.path(), "simulate.csv").lines().count(), 3);
}
