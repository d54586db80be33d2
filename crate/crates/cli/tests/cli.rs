use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn sbprk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbprk"))
        .args(args)
        .env_remove("SBPRK_TOL_OVERRIDE")
        .output()
        .expect("binary runs")
}

fn sbprk_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sbprk"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

fn write_tableau(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let p = path(dir, name);
    let mut full = vec!["tableau"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", s(&p)]);
    let o = sbprk(&full);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    p
}

fn write_operator(dir: &TempDir, name: &str, args: &[&str]) -> PathBuf {
    let p = path(dir, name);
    let mut full = vec!["operator"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", s(&p)]);
    let o = sbprk(&full);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    p
}

#[test]
fn zero_eigenvalue_operator_file() {
    let dir = TempDir::new().unwrap();
    let op = write_operator(&dir, "op.json", &["--family", "counterexample-thm3"]);
    let v = json(&op);
    assert_eq!(v["s"], 4);
    let m = floats(&v["M"]);
    let mut want = vec![0.0; 16];
    for k in 0..4 {
        want[5 * k] = 0.25;
    }
    assert_eq!(m, want);
    assert!(close(&floats(&v["nodes"]), &[0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0], 1e-16));
}

#[test]
fn lobatto_two_nodes() {
    let dir = TempDir::new().unwrap();
    let op = write_operator(&dir, "op.json", &["--family", "lobatto", "--stages", "2"]);
    assert_eq!(floats(&json(&op)["D"]), vec![-1.0, 1.0, -1.0, 1.0]);
    let o = sbprk(&["operator", "--family", "lobatto", "--stages", "2"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["norm_kind"], "diagonal");
    assert!(stderr(&o).contains("verification: PASS"));
}

#[test]
fn invalid_operator_flags() {
    assert_eq!(code(&sbprk(&["operator", "--family", "lobatto", "--stages", "1"])), 2);
    assert_eq!(code(&sbprk(&["operator", "--family", "gauss"])), 2);
    assert_eq!(code(&sbprk(&["operator", "--family", "hermite", "--stages", "3"])), 2);
    assert_eq!(code(&sbprk(&["operator", "--family", "fd2", "--stages", "4", "--T", "-1"])), 2);
    assert_eq!(code(&sbprk(&[])), 2);
}

#[test]
fn verification_failure_exit() {
    let o = sbprk_env(&["operator", "--family", "gauss", "--stages", "5"], "SBPRK_TOL_OVERRIDE", "1e-30");
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("verification: FAIL"));
}

#[test]
fn singular_sat_matrix_exit() {
    let dir = TempDir::new().unwrap();
    let op = write_operator(&dir, "op.json", &["--family", "counterexample-thm3"]);
    let o = sbprk(&["tableau", "--operator", s(&op)]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("SAT matrix singular (Assumption 1 fails)"), "{}", stderr(&o));
}

#[test]
fn non_sbp_tableau_weights() {
    let dir = TempDir::new().unwrap();
    let t = write_tableau(&dir, "t.json", &["--classical", "thm4"]);
    let v = json(&t);
    assert!(close(&floats(&v["b"]), &[0.125, 0.375, 0.375, 0.125], 1e-15));
    assert_eq!(v["s"], 4);
}

#[test]
fn ssp_example_tableau() {
    let dir = TempDir::new().unwrap();
    let op = write_operator(&dir, "op.json", &["--family", "example-ssp"]);
    let t = write_tableau(&dir, "t.json", &["--operator", s(&op)]);
    let want: Vec<f64> = [2725.0, 2180.0, 95.0, 4390.0, 5512.0, 98.0, 3495.0, 6796.0, 4709.0]
        .iter()
        .map(|x| x / 20000.0)
        .collect();
    assert!(close(&floats(&json(&t)["A"]), &want, 1e-11));
}

#[test]
fn analyze_reports() {
    let dir = TempDir::new().unwrap();
    let t4 = write_tableau(&dir, "t4.json", &["--classical", "thm4"]);
    let o = sbprk(&["analyze", s(&t4), "--format", "json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["a_stable"], true);
    assert_eq!(v["l_stable"], true);
    assert!(close(&floats(&v["alg_stability_eigenvalues"]), &[0.0, 0.0, 0.375, 0.625], 1e-10));

    let op = write_operator(&dir, "g2.json", &["--family", "gauss", "--stages", "2"]);
    let g2 = write_tableau(&dir, "g2t.json", &["--operator", s(&op)]);
    let report = path(&dir, "report.json");
    assert_eq!(code(&sbprk(&["analyze", s(&g2), "--out", s(&report)])), 0);
    let v = json(&report);
    assert_eq!(v["ssp_coefficient"].as_f64(), Some(0.0));
    assert_eq!(v["a_entries_nonneg"], false);

    let ee = write_tableau(&dir, "ee.json", &["--classical", "explicit-euler"]);
    let o = sbprk(&["analyze", s(&ee), "--eta", "1", "--zeta", "1"]);
    let text = stdout(&o);
    assert!(text.contains("SSP coefficient: 1\n"), "{text}");
    assert!(text.contains("C(1): true"));

    let ie = write_tableau(&dir, "ie.json", &["--classical", "implicit-euler"]);
    let o = sbprk(&["analyze", s(&ie), "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["ssp_coefficient"], "inf");
}

#[test]
fn analyze_rejects_malformed_input() {
    let dir = TempDir::new().unwrap();
    let bad = path(&dir, "bad.json");
    std::fs::write(&bad, "{\"label\": \"x\", \"s\": 2, \"A\": [1], \"b\": [1], \"c\": [0]}").unwrap();
    assert_eq!(code(&sbprk(&["analyze", s(&bad)])), 2);
    assert_eq!(code(&sbprk(&["analyze", s(&path(&dir, "missing.json"))])), 2);
}

#[test]
fn assumption_verdicts() {
    let dir = TempDir::new().unwrap();
    let zero = write_operator(&dir, "zero.json", &["--family", "counterexample-thm3"]);
    let o = sbprk(&["assumption", s(&zero), "--sigma-min", "0.6", "--sigma-max", "2", "--samples", "16"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("verdict: FAIL"));
    let o = sbprk(&["assumption", s(&zero), "--sigma-min", "0.6", "--sigma-max", "2", "--samples", "16", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["witness_eigenvalue"]["re"].as_f64().unwrap().abs() < 1e-10);
    assert!(v["witness_eigenvalue"]["im"].as_f64().unwrap().abs() < 1e-10);

    let ssp = write_operator(&dir, "ssp.json", &["--family", "example-ssp"]);
    let o = sbprk(&["assumption", s(&ssp), "--sigma-min", "0.501", "--sigma-max", "2", "--samples", "64"]);
    assert!(stdout(&o).contains("verdict: PASS"));

    let fd = write_operator(&dir, "fd.json", &["--family", "fd2", "--stages", "10"]);
    let o = sbprk(&["assumption", s(&fd), "--sigma-min", "1", "--sigma-max", "1", "--samples", "1"]);
    assert!(stdout(&o).contains("verdict: PASS"));

    assert_eq!(code(&sbprk(&["assumption", s(&fd), "--sigma-min", "0.5"])), 2);
    assert_eq!(code(&sbprk(&["assumption", s(&fd), "--sigma-min", "0.3", "--sigma-max", "2"])), 2);
}

#[test]
fn equivalence_cases() {
    for (family, stages) in [("lobatto", "4"), ("radau-right", "3"), ("radau-left", "1")] {
        let o = sbprk(&["equivalence", "--family", family, "--stages", stages]);
        assert_eq!(code(&o), 0, "{family} {stages}: {}", stdout(&o));
        assert!(stdout(&o).trim_end().ends_with("match"));
    }
    // a 1e-16 threshold is below the round-off difference of the two constructions
    let o = sbprk_env(&["equivalence", "--family", "lobatto", "--stages", "3"], "SBPRK_TOL_OVERRIDE", "1e-7");
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    assert!(stdout(&o).contains("mismatch"));
    assert_eq!(code(&sbprk(&["equivalence", "--family", "gauss", "--stages", "2"])), 2);
}

#[test]
fn bad_tolerance_override() {
    let o = sbprk_env(&["equivalence", "--family", "lobatto", "--stages", "2"], "SBPRK_TOL_OVERRIDE", "zero");
    assert_eq!(code(&o), 2);
}

#[test]
fn integrate_dahlquist() {
    let dir = TempDir::new().unwrap();
    let ie = write_tableau(&dir, "ie.json", &["--classical", "implicit-euler"]);
    let o = sbprk(&["integrate", s(&ie), "--problem", "dahlquist", "--lambda", "-1", "--blocks", "10"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,u_1");
    assert_eq!(lines.len(), 12);
    let last: Vec<f64> = lines[11].split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 1.0);
    assert!((last[1] - 0.385543).abs() < 5e-7);
    assert!((last[1] - (1.0 / 1.1f64).powi(10)).abs() < 1e-14);
}

#[test]
fn divergence_exit() {
    let dir = TempDir::new().unwrap();
    let ie = write_tableau(&dir, "ie.json", &["--classical", "implicit-euler"]);
    // λ dt = 1 makes the stage Jacobian 1 − λ dt singular
    let o = sbprk(&["integrate", s(&ie), "--problem", "dahlquist", "--lambda", "10", "--blocks", "10"]);
    assert_eq!(code(&o), 5, "{}", stderr(&o));
    assert!(stderr(&o).contains("block 0"));
}

#[test]
fn convergence_order() {
    let dir = TempDir::new().unwrap();
    let t = write_tableau(&dir, "t.json", &["--classical", "radau-iia", "--stages", "2"]);
    let o = sbprk(&["convergence", s(&t), "--problem", "forced-linear", "--blocks", "10,20,40,80", "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["order"].as_f64().unwrap() - 3.0).abs() <= 0.2);
    assert_eq!(v["samples"].as_array().unwrap().len(), 4);
    assert_eq!(code(&sbprk(&["convergence", s(&t), "--problem", "forced-linear", "--blocks", "10,20"])), 2);
    assert_eq!(code(&sbprk(&["convergence", s(&t), "--problem", "nope"])), 2);
}

#[test]
fn contractivity_ratio() {
    let dir = TempDir::new().unwrap();
    let t = write_tableau(&dir, "t.json", &["--classical", "lobatto-iiic", "--stages", "2"]);
    let o = sbprk(&["contractivity", s(&t), "--problem", "cubic", "--dts", "100", "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v[0]["ratio"].as_f64().unwrap() <= 1.0);

    let ee = write_tableau(&dir, "ee.json", &["--classical", "explicit-euler"]);
    let o = sbprk(&[
        "contractivity", s(&ee), "--problem", "dahlquist", "--lambda", "-1", "--dts", "3", "--u0", "1", "--v0", "0",
        "--format", "csv",
    ]);
    assert_eq!(stdout(&o), "dt,ratio\n3,2\n");
    assert_eq!(code(&sbprk(&["contractivity", s(&t), "--problem", "dahlquist", "--lambda", "1", "--dts", "1"])), 2);
}

#[test]
fn reconstruct_verdicts() {
    let dir = TempDir::new().unwrap();
    let t4 = write_tableau(&dir, "t4.json", &["--classical", "thm4"]);
    let o = sbprk(&["reconstruct", s(&t4)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("SBP form with positive definite M: NO"));
    let o = sbprk(&["reconstruct", s(&t4), "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let min_abs = floats(&v["m_eigenvalues"]).iter().fold(f64::INFINITY, |m, e| m.min(e.abs()));
    assert!(min_abs < 1e-6);

    for (args, m) in [
        (["--classical", "lobatto-iiic", "--stages", "2"], [0.5, 0.0, 0.0, 0.5]),
        (["--classical", "radau-iia", "--stages", "2"], [0.75, 0.0, 0.0, 0.25]),
    ] {
        let t = write_tableau(&dir, "t.json", &args);
        let o = sbprk(&["reconstruct", s(&t), "--starts", "4", "--seed", "7", "--format", "json"]);
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["sbp_exists_with_pd_norm"], true);
        assert!(close(&floats(&v["m"]), &m, 1e-8));
    }

    let ee = write_tableau(&dir, "ee.json", &["--classical", "explicit-euler"]);
    assert_eq!(code(&sbprk(&["reconstruct", s(&ee)])), 2);
}

#[test]
fn outputs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let op = write_operator(&dir, "op.json", &["--family", "radau-right", "--stages", "4"]);
    let t = write_tableau(&dir, "t.json", &["--operator", s(&op)]);
    let t2 = write_tableau(&dir, "t2.json", &["--operator", s(&op)]);
    assert_eq!(std::fs::read(&t).unwrap(), std::fs::read(&t2).unwrap());
    for args in [
        vec!["analyze", s(&t)],
        vec!["assumption", s(&op)],
        vec!["reconstruct", s(&t)],
        vec!["convergence", s(&t), "--problem", "forced-linear"],
    ] {
        assert_eq!(stdout(&sbprk(&args)), stdout(&sbprk(&args)), "{args:?}");
    }
    // the written operator reproduces the in-memory verification summary
    let from_flags = sbprk(&["operator", "--family", "radau-right", "--stages", "4", "--out", s(&path(&dir, "again.json"))]);
    assert_eq!(std::fs::read(&op).unwrap(), std::fs::read(path(&dir, "again.json")).unwrap());
    assert!(stdout(&from_flags).contains("verification: PASS"));
}
