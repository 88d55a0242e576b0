use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qel::{parse, Format};

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn scenario(name: &str) -> PathBuf {
    scenarios_dir().join(name)
}

fn qel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qel")).args(args).env("QEL_LOG", "error").output().unwrap()
}

fn run_to_stdout(file: &Path, extra: &[&str]) -> Vec<u8> {
    let mut args = vec!["run", "--scenario", file.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = qel(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn every_shipped_scenario_validates() {
    let files: Vec<PathBuf> = std::fs::read_dir(scenarios_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    assert!(files.len() >= 4);
    let mut args = vec!["validate", "--scenario"];
    args.extend(files.iter().map(|p| p.to_str().unwrap()));
    let out = qel(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), files.len());
}

#[test]
fn bec_scenario_keeps_ninety_percent() {
    let csv = run_to_stdout(&scenario("bec_ten_percent.json"), &["--format", "csv"]);
    let table = parse(&csv, Format::Csv).unwrap();
    assert_eq!(table.columns, ["t", "N", "N_over_N0"]);
    let ratio = table.last("N_over_N0").unwrap();
    assert!((ratio - 0.90).abs() <= 0.01, "{ratio}");
}

#[test]
fn ground_state_cooling_has_unit_fidelity() {
    let csv = run_to_stdout(&scenario("cooling_ground.json"), &[]);
    let table = parse(&csv, Format::Csv).unwrap();
    assert!(table.column("fidelity").unwrap().iter().all(|&f| f == 1.0));
    assert!(table.column("p_g").unwrap().iter().all(|&p| (p - 1.0).abs() < 1e-12));
}

#[test]
fn seeds_change_means_but_not_covariances() {
    let file = scenario("gaussian_monitored.json");
    let a = parse(&run_to_stdout(&file, &["--seed", "1"]), Format::Csv).unwrap();
    let b = parse(&run_to_stdout(&file, &["--seed", "2"]), Format::Csv).unwrap();
    for name in ["sigma_0_0", "sigma_0_1", "sigma_1_1", "S", "dS", "Phi", "Pi", "I", "Pi_c"] {
        assert_eq!(a.column(name), b.column(name), "{name}");
    }
    assert_ne!(a.column("x_0"), b.column("x_0"));
    // Only q is monitored and σ stays diagonal, so p never sees the noise.
    assert_eq!(a.column("x_1"), b.column("x_1"));
}

#[test]
fn same_seed_gives_identical_bytes() {
    for name in ["gaussian_two_modes.json", "cooling_duffing.json", "decoherence_lab.json"] {
        let file = scenario(name);
        let first = run_to_stdout(&file, &["--format", "csv", "--seed", "5"]);
        let second = run_to_stdout(&file, &["--format", "csv", "--seed", "5"]);
        assert_eq!(first, second, "{name}");
    }
}

#[test]
fn json_output_echoes_the_scenario() {
    let file = scenario("bec_retention_target.json");
    let json = run_to_stdout(&file, &["--format", "json", "--seed", "9"]);
    let table = parse(&json, Format::Json).unwrap();
    let meta = table.metadata.unwrap();
    let source: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(meta.scenario, source);
    assert_eq!(meta.seed, 9);
    assert_eq!(meta.version, env!("CARGO_PKG_VERSION"));
    let kt = meta.summary["required_ktilde"];
    assert!((kt / 4.245e-14 - 1.0).abs() < 1e-3, "{kt}");
}

#[test]
fn validation_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"kind": "bec", "grid": {"start": 0, "stop": 10, "points": 11},
            "parameters": {"k1": 1e-3, "n0": 1e5, "retention": 1.5}}"#,
    );
    for sub in ["validate", "run"] {
        let out = qel(&[sub, "--scenario", bad.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2));
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.contains("parameters.retention") && err.contains("retention ∈ (0,1)"), "{err}");
    }
    let unknown = write(dir.path(), "unknown.json", r#"{"kind": "laser", "parameters": {}}"#);
    assert_eq!(qel(&["validate", "--scenario", unknown.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(qel(&["run"]).status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let heavy_tail = write(
        dir.path(),
        "tail.json",
        r#"{"kind": "cooling", "parameters": {"omega": 1, "lambda": 0.05, "n_max": 10, "n_th": 1, "n_rep": 3}}"#,
    );
    let out = qel(&["run", "--scenario", heavy_tail.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().contains("increase n_max"));

    let coarse = write(
        dir.path(),
        "coarse.json",
        r#"{"kind": "gaussian", "grid": {"start": 0, "stop": 10, "points": 3},
            "parameters": {"bath": {"gamma_th": 1, "n_bar": 0}, "omega": 1, "c": [[3, 0]]}}"#,
    );
    let out = qel(&["run", "--scenario", coarse.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn unwritable_destination_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let dest = dir.path().join("missing/dir/out.csv");
    let out = qel(&["run", "--scenario", scenario("bec_ten_percent.json").to_str().unwrap(), "--out", dest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn parallel_sweep_matches_serial_runs() {
    let dir = tempfile::tempdir().unwrap();
    let names = ["bec_ten_percent.json", "cooling_ground.json", "gaussian_monitored.json", "decoherence_blackbody.json"];
    let files: Vec<String> = names.iter().map(|n| scenario(n).to_str().unwrap().to_string()).collect();
    let mut args = vec!["run", "--jobs", "4", "--out", dir.path().to_str().unwrap(), "--scenario"];
    args.extend(files.iter().map(String::as_str));
    let out = qel(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for (name, file) in names.iter().zip(&files) {
        let stem = name.trim_end_matches(".json");
        let swept = std::fs::read(dir.path().join(format!("{stem}.csv"))).unwrap();
        assert_eq!(swept, run_to_stdout(Path::new(file), &["--format", "csv"]), "{name}");
    }
}
