//! End-to-end checks of the batch front-end: strict config parsing, report
//! files, determinism of the numeric payloads, exit codes.

use std::fs;
use std::path::Path;
use std::process::Command;

fn chaos_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chaos"))
}

fn uniform_rho() -> &'static str {
    r#"{"m":1,"d":1,"M":4,"real_tag":true,"coeffs":[[[0],1.0,0.0]]}"#
}

fn cosine_rho() -> String {
    format!(
        r#"{{"m":1,"d":1,"M":4,"real_tag":true,"coeffs":[[[0],1.0,0.0],[[1],0.25,0.0],[[-1],0.25,0.0]]}}"#
    )
}

fn kuramoto_kernel() -> &'static str {
    r#"{"d":1,"modes":[[[-1],[1],[[0.0,-0.5]]],[[1],[-1],[[0.0,0.5]]]]}"#
}

fn simulate_config() -> String {
    format!(
        r#"{{
  "command": "simulate",
  "sim": {{
    "n": 16, "d": 1, "sigma": 0.5, "dt": 0.01, "t_end": 0.05,
    "obs_times": [0.0, 0.05], "replicas": 3, "seed": 7,
    "kernel": {kernel},
    "rho0": {rho}
  }}
}}"#,
        kernel = kuramoto_kernel(),
        rho = cosine_rho()
    )
}

fn run_in(dir: &Path, config: &str, extra: &[&str]) -> std::process::Output {
    let config_path = dir.join("config.json");
    fs::write(&config_path, config).unwrap();
    chaos_bin()
        .arg("--config")
        .arg(&config_path)
        .arg("--out")
        .arg(dir)
        .args(extra)
        .output()
        .unwrap()
}

#[test]
fn simulate_roundtrip_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &simulate_config(), &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let entries: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    let summary = entries.iter().find(|e| e.ends_with("_summary.json")).unwrap();
    assert_eq!(
        entries.iter().filter(|e| e.contains("_snapshot_")).count(),
        2
    );
    // summary parses and echoes the config hash it is named after
    let text = fs::read_to_string(dir.path().join(summary)).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let hash = value["config_hash"].as_str().unwrap();
    assert!(summary.starts_with(&hash[..12]));
    assert_eq!(value["config"]["command"], "simulate");
}

#[test]
fn dt_zero_is_rejected_naming_the_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let config = simulate_config().replace(r#""dt": 0.01"#, r#""dt": 0.0"#);
    let out = run_in(dir.path(), &config, &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("dt > 0"), "stderr: {err}");
}

#[test]
fn unknown_key_is_rejected_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let config = simulate_config().replace(r#""sigma": 0.5"#, r#""sigam": 0.5"#);
    let out = run_in(dir.path(), &config, &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("sigam"), "stderr: {err}");
}

#[test]
fn multiple_violations_reported_together() {
    let dir = tempfile::tempdir().unwrap();
    let config = simulate_config()
        .replace(r#""dt": 0.01"#, r#""dt": 0.0"#)
        .replace(r#""n": 16"#, r#""n": 1"#);
    let out = run_in(dir.path(), &config, &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("dt > 0") && err.contains("N ≥ 2"), "stderr: {err}");
}

fn payload_files_digest(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| {
            let name = e.file_name().into_string().unwrap();
            (name.ends_with(".csv") || name.ends_with(".jsonl")) && name != "config.json"
        })
        .map(|e| {
            (
                e.file_name().into_string().unwrap(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn identical_config_gives_identical_numeric_payload() {
    let config = simulate_config();
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    // different thread counts must not change the numbers
    let out_a = run_in(dir_a.path(), &config, &["--threads", "1"]);
    let out_b = run_in(dir_b.path(), &config, &["--threads", "2"]);
    assert!(out_a.status.success() && out_b.status.success());
    assert_eq!(
        payload_files_digest(dir_a.path()),
        payload_files_digest(dir_b.path())
    );
}

#[test]
fn seed_override_changes_the_payload() {
    let config = simulate_config();
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let _ = run_in(dir_a.path(), &config, &[]);
    let _ = run_in(dir_b.path(), &config, &["--seed", "12345"]);
    assert_ne!(
        payload_files_digest(dir_a.path()),
        payload_files_digest(dir_b.path())
    );
}

#[test]
fn partition_audit_runs_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{"command": "partition-audit", "m_max": 5, "n_values": [1, 2, 16, 128]}"#;
    let out = run_in(dir.path(), config, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let entries: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    let csv = entries
        .iter()
        .find(|e| e.ends_with("_partition_audit.csv"))
        .unwrap();
    let text = fs::read_to_string(dir.path().join(csv)).unwrap();
    assert!(text.lines().count() > 4);
    assert!(text.lines().skip(1).all(|l| l.contains("true")));
}

#[test]
fn operator_audit_runs_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    let config = r#"{"command": "operator-audit", "trials": 40, "seed": 3}"#;
    let out = run_in(dir.path(), config, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.to_string_lossy().ends_with("_summary.json"))
        .unwrap();
    let value: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(summary).unwrap()).unwrap();
    assert_eq!(value["payload"]["all_pass"], true);
    assert_eq!(value["payload"]["trials"], 40);
}

#[test]
fn mv_solve_writes_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let config = format!(
        r#"{{
  "command": "mv-solve",
  "solve_b": true,
  "pde": {{
    "sigma": 1.0, "dt": 0.01, "t_end": 0.1, "obs_times": [0.05, 0.1],
    "cutoff": 6,
    "kernel": {kernel},
    "rho0": {rho}
  }}
}}"#,
        kernel = kuramoto_kernel(),
        rho = cosine_rho()
    );
    let out = run_in(dir.path(), &config, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let entries: Vec<String> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    let rho_file = entries.iter().find(|e| e.ends_with("_rho.jsonl")).unwrap();
    let text = fs::read_to_string(dir.path().join(rho_file)).unwrap();
    assert_eq!(text.lines().count(), 2);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["field"]["coeffs"].is_array());
    }
    assert!(entries.iter().any(|e| e.ends_with("_b.jsonl")));
}

#[test]
fn chaos_command_estimates_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let config = format!(
        r#"{{
  "command": "chaos",
  "sim": {{
    "n": 32, "d": 1, "sigma": 1.0, "dt": 0.02, "t_end": 0.1,
    "obs_times": [0.1], "replicas": 40, "seed": 5,
    "kernel": {kernel},
    "rho0": {rho}
  }},
  "probe": {{"m": 2, "radius": 1, "include_zero_planes": true}}
}}"#,
        kernel = kuramoto_kernel(),
        rho = uniform_rho()
    );
    let out = run_in(dir.path(), &config, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.to_string_lossy().ends_with("_chaos.csv"))
        .unwrap();
    let text = fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("n,m,t,xi,re,im,se_re,se_im"));
    // 3^2 tuples in the radius-1 box
    assert_eq!(text.lines().count(), 1 + 9);
    // zero-containing tuples cancel exactly
    for line in text.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let xi = cols[3];
        if xi.split(':').any(|c| c == "0") {
            let re: f64 = cols[4].parse().unwrap();
            let im: f64 = cols[5].parse().unwrap();
            assert!(re.abs() < 1e-12 && im.abs() < 1e-12, "line {line}");
        }
    }
}

#[test]
fn missing_sections_are_each_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), r#"{"command": "clt"}"#, &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("\"sim\" section") && err.contains("phi"), "{err}");
}
