//! End-to-end runs of the binary on the job files in `configs/`.

use std::path::{Path, PathBuf};
use std::process::Command;

use plasmonic::bem::read_operator;
use plasmonic::validate::{run_all, ValidateConfig};
use serde_json::Value;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str], config: Option<&Path>, out: &Path) -> i32 {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_plasmonic"));
    cmd.args(args).arg("--out").arg(out);
    if let Some(c) = config {
        cmd.arg("--config").arg(c);
    }
    cmd.output().unwrap().status.code().unwrap()
}

fn job(command: &str, file: &str) -> (i32, Value, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let code = run(&[command], Some(&configs().join(file)), dir.path());
    let name = if command == "dn-derivative" { "dn_derivative" } else { command };
    let text = std::fs::read_to_string(dir.path().join(format!("{name}.json"))).unwrap_or_default();
    (code, serde_json::from_str(&text).unwrap_or(Value::Null), dir)
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

#[test]
fn circle_spectrum_is_degenerate() {
    let (code, rec, dir) = job("spectrum", "circle_spectrum.json");
    assert_eq!(code, 0);
    let eps = floats(&rec["outputs"]["eigenvalues"]);
    assert_eq!(eps.len(), 10);
    assert!(eps.iter().all(|e| (e - 1.0).abs() <= 1e-8));
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert!(csv.starts_with("k,epsilon,residual"));
    assert_eq!(csv.lines().count(), 11);
    assert!(dir.path().join("timing.json").exists());
}

#[test]
fn ellipse_spectrum_matches_oracle_and_ignores_scale() {
    let (_, a, _d1) = job("spectrum", "ellipse_spectrum.json");
    let (_, b, _d2) = job("spectrum", "ellipse_spectrum_scaled.json");
    let (x, y) = (floats(&a["outputs"]["eigenvalues"]), floats(&b["outputs"]["eigenvalues"]));
    let mut exact = plasmonic::validate::oracles::ellipse_plasmonic_eigenvalues(2.0, 1.0, 10);
    exact.sort_by(f64::total_cmp);
    for i in 0..10 {
        assert!((x[i] - exact[i]).abs() < 1e-8);
        assert!((x[i] - y[i]).abs() < 1e-9);
    }
}

#[test]
fn identical_jobs_give_identical_bytes() {
    let (_, _, d1) = job("spectrum", "ellipse_spectrum.json");
    let (_, _, d2) = job("spectrum", "ellipse_spectrum.json");
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("spectrum.json")).unwrap();
    assert_eq!(read(&d1), read(&d2));
}

#[test]
fn operator_dump_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("job.json");
    std::fs::write(&cfg, r#"{"curve":{"kind":"ellipse","a":2,"b":1},"N":32,"num_eigs":4,"dump_operators":true}"#).unwrap();
    assert_eq!(run(&["spectrum"], Some(&cfg), dir.path()), 0);
    let (header, m) = read_operator(&dir.path().join("nminus.bin")).unwrap();
    assert_eq!(header.n, 32);
    assert_eq!(m.nrows(), 32);
}

#[test]
fn uniform_sphere_shift_is_neutral() {
    let (code, rec, _d) = job("perturb", "sphere_uniform.json");
    assert_eq!(code, 0);
    for b in rec["outputs"]["branches"].as_array().unwrap() {
        assert!(b["epsdot"].as_f64().unwrap().abs() < 1e-10);
        assert!(b["epsddot"].as_f64().unwrap().abs() < 1e-8);
    }
}

#[test]
fn y20_splits_into_a_pair_and_a_single() {
    let (code, rec, _d) = job("perturb", "sphere_y20.json");
    assert_eq!(code, 0);
    let v: Vec<f64> = rec["outputs"]["branches"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b["epsdot"].as_f64().unwrap())
        .collect();
    assert_eq!(v.len(), 3);
    assert!((v[0] - v[1]).abs() < 1e-12);
    assert!((v[2] + 2.0 * v[0]).abs() < 1e-12);
}

#[test]
fn planar_fd_job_reports_second_order() {
    let (code, rec, _d) = job("perturb", "ellipse_fd.json");
    assert_eq!(code, 0);
    let slope = rec["outputs"]["branches"][0]["diagnostics"]["fd"]["slope"].as_f64().unwrap();
    assert!((slope - 2.0).abs() < 0.2);
}

#[test]
fn dn_derivative_jobs() {
    assert_eq!(job("dn-derivative", "circle_dn.json").0, 0);
    let (code, rec, _d) = job("dn-derivative", "ellipse_dn.json");
    assert_eq!(code, 0);
    assert!(rec["outputs"]["slopes"]["central"].as_f64().unwrap() >= 1.8);
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("zero.json");
    std::fs::write(&cfg, r#"{"curve":{"kind":"ellipse","a":2,"b":1},"shape":{},"N":32}"#).unwrap();
    assert_eq!(run(&["dn-derivative"], Some(&cfg), dir.path()), 0);
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"curve":{"kind":"circle","radius":1},"N":64,"num_eigs":4,"colour":"red"}"#).unwrap();
    assert_eq!(run(&["spectrum"], Some(&cfg), dir.path()), 2);
    assert_eq!(run(&["spectrum"], None, dir.path()), 2);
    std::fs::write(&cfg, r#"{"geometry":"sphere","k":1,"shape":{"cos":[1]}}"#).unwrap();
    assert_eq!(run(&["perturb"], Some(&cfg), dir.path()), 2);
    // ε = 1 on the disk has no branch to differentiate
    std::fs::write(&cfg, r#"{"geometry":{"kind":"circle","radius":1},"N":32,"shape":{"cos":[0,0,1]}}"#).unwrap();
    assert_eq!(run(&["perturb"], Some(&cfg), dir.path()), 2);
}

#[test]
fn numerical_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("fold.json");
    // h·a folds the curve
    std::fs::write(&cfg, r#"{"curve":{"kind":"ellipse","a":2,"b":1},"shape":{"cos":[5]},"N":32,"h_list":[0.5,0.25]}"#).unwrap();
    assert_eq!(run(&["dn-derivative"], Some(&cfg), dir.path()), 3);
}

#[test]
fn coarse_validation_fails() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(&["validate"], Some(&configs().join("validate_coarse.json")), dir.path());
    assert_eq!(code, 1);
    let rec: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("validation.json")).unwrap()).unwrap();
    assert_eq!(rec["outputs"][1]["id"], 2);
    assert_eq!(rec["outputs"][1]["passed"], false);
}

#[test]
fn seed_changes_no_verdict() {
    let a = run_all(&ValidateConfig::default());
    let b = run_all(&ValidateConfig { seed: 7, ..Default::default() });
    let pattern = |v: &[plasmonic::validate::CheckOutcome]| v.iter().map(|c| c.passed).collect::<Vec<_>>();
    assert_eq!(pattern(&a), pattern(&b));
}
