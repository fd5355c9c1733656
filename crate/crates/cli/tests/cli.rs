use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const SMALL_SWEEP: &str = r#"
[geometry]
sensors = 3
antennas = 2

[sweep]
values = [4.0, 8.0]
replications = 2
seed = 11

[solver]
search_budget = 200
search_restarts = 2
"#;

fn beamgame(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_beamgame"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn run_ok(args: &[&str]) {
    let out = beamgame(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn lines(p: &Path) -> Vec<String> {
    fs::read_to_string(p)
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect()
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn single_node_writes_csv_and_summary() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("single.csv");
    run_ok(&["single-node", "--out", out.to_str().unwrap()]);
    let rows = lines(&out);
    assert!(rows[0].starts_with("sweep_value,"));
    assert_eq!(rows.len(), 1 + 10);
    assert!(rows[1].contains(",closed_form,"));
    assert_eq!(lines(&dir.path().join("single_summary.csv")).len(), 1 + 10);
}

#[test]
fn m1_exact_reference_config() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("m1.csv");
    let cfg = configs().join("single_antenna.toml");
    run_ok(&[
        "m1-exact",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let rows = lines(&out);
    assert_eq!(rows.len(), 1 + 20);
    assert_eq!(rows.iter().filter(|r| r.contains(",m1_exact,")).count(), 10);
}

#[test]
fn sweep_distance_is_byte_identical_across_runs() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "small.toml", SMALL_SWEEP);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        run_ok(&[
            "sweep-distance",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(
        fs::read(dir.path().join("a_summary.csv")).unwrap(),
        fs::read(dir.path().join("b_summary.csv")).unwrap()
    );
    // 2 distances x 2 replications x 4 solvers
    assert_eq!(lines(&a).len(), 1 + 16);
}

#[test]
fn seed_flag_overrides_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "small.toml", SMALL_SWEEP);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    run_ok(&[
        "sweep-distance",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        a.to_str().unwrap(),
    ]);
    run_ok(&[
        "sweep-distance",
        "--config",
        cfg.to_str().unwrap(),
        "--seed",
        "12",
        "--out",
        b.to_str().unwrap(),
    ]);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn sweep_uncertainty_reports_antenna_powers() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "u.toml", "[sweep]\nvalues = [1.0, 10.0]\n");
    let out = dir.path().join("u.csv");
    run_ok(&[
        "sweep-uncertainty",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let rows = lines(&out);
    assert_eq!(rows.len(), 1 + 2);
    assert!(rows[0].ends_with(",antenna_powers"));
    // five antennas, semicolon separated, in the last column
    let last = rows[1].rsplit(',').next().unwrap();
    assert_eq!(last.split(';').count(), 5);
}

#[test]
fn validate_bound_reports_rows() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "v.toml",
        "[sweep]\nvalues = [6.0]\nreplications = 2\nmc_samples = 10000\n",
    );
    let out = dir.path().join("v.csv");
    let res = beamgame(&[
        "validate-bound",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("0 violations"));
    let rows = lines(&out);
    assert!(rows[0].starts_with("sweep_value,replication,seed,sensor,"));
    assert_eq!(rows.len(), 1 + 2);
}

#[test]
fn bad_config_exits_one() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.csv");
    for text in ["[game]\nalpha = -1.0\n", "[game]\nalpah = 1.0\n", "not toml ["] {
        let cfg = write(&dir, "bad.toml", text);
        let res = beamgame(&[
            "single-node",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(res.status.code(), Some(1), "{text}");
        assert!(!out.exists());
    }
    let res = beamgame(&[
        "single-node",
        "--config",
        "/nonexistent/x.toml",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(beamgame(&["sweep-distance"]).status.code(), Some(1));
    assert_eq!(beamgame(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(beamgame(&["--help"]).status.code(), Some(0));
}

#[test]
fn numeric_failure_exits_two() {
    let dir = TempDir::new().unwrap();
    let text = fs::read_to_string(configs().join("single_antenna.toml"))
        .unwrap()
        .replace("alpha = 1e3", "alpha = 1e-6");
    let cfg = write(&dir, "tiny.toml", &text);
    let out = dir.path().join("x.csv");
    let res = beamgame(&[
        "m1-exact",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("no interior equilibrium"));
}
