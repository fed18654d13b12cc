use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const AB_LINES: &str = "2094.84,2093.20,2061.80,2060.16";
const AB2_LINES: &str = "1502.9,1498.0,1492.6,1487.8,1484.6,1484.2,1479.1,1474.4";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nmr-vqe"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn analyze_two_spin_lines() {
    let v = json(&run(&["analyze", "--system", "AB", "--lines", AB_LINES]));
    assert_eq!(v["kind"], "AB");
    assert!((v["j_ab"].as_f64().unwrap() - 1.64).abs() < 1e-9);
    assert!((v["c_value"].as_f64().unwrap() - 16.52).abs() < 1e-9);
    assert!(v["nu_a"].as_f64().unwrap() > v["nu_b"].as_f64().unwrap());
}

#[test]
fn analyze_three_spin_lines() {
    let v = json(&run(&["analyze", "--system", "AB2", "--lines", AB2_LINES]));
    assert_eq!(v["nu_a"].as_f64().unwrap(), 1492.6);
    assert!((v["nu_b"].as_f64().unwrap() - 1481.85).abs() < 1e-9);
    assert!((v["j_ab"].as_f64().unwrap() - 8.3).abs() < 1e-9);
}

#[test]
fn ascending_lines_are_a_usage_error() {
    let out = run(&["analyze", "--system", "AB", "--lines", "1,2,3,4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("descending"));
}

#[test]
fn spacing_mismatch_is_a_data_error() {
    let out = run(&["analyze", "--system", "AB", "--lines", "100,98,90,87"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["vqe", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    // two sources at once
    let out = run(&["exact", "--system", "AB", "--lines", AB_LINES, "--nu-a", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["vqe", "--system", "AB", "--lines", AB_LINES, "--ansatz", "ring"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, "{ not json").unwrap();
    let out = run(&["analyze", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn build_ham_emits_pauli_terms() {
    let v = json(&run(&["build-ham", "--system", "AB", "--nu-a", "2094.007", "--nu-b", "2060.99", "--j", "1.64"]));
    assert_eq!(v["n_qubits"], 2);
    let terms = v["terms"].as_array().unwrap();
    let names: Vec<&str> = terms.iter().map(|t| t["paulis"].as_str().unwrap()).collect();
    assert_eq!(names, ["ZI", "IZ", "XX", "YY", "ZZ"]);
    assert!((terms[0]["coeff"].as_f64().unwrap() + 1047.0035).abs() < 1e-9);
    assert!((terms[2]["coeff"].as_f64().unwrap() - 0.41).abs() < 1e-12);
}

#[test]
fn exact_eigenvalues() {
    let v = json(&run(&["exact", "--system", "AB", "--nu-a", "2094.007", "--nu-b", "2060.99", "--j", "1.64"]));
    let e: Vec<f64> = v["eigenvalues_hz"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    let want = [-2077.0885, -16.93885, 16.11885, 2077.9085];
    for (got, w) in e.iter().zip(want) {
        assert!((got - w).abs() < 1e-4, "{got} vs {w}");
    }
    assert_eq!(v["ground_energy_hz"].as_f64().unwrap(), e[0]);
}

#[test]
fn vqe_writes_result_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("result.json");
    let trace = dir.path().join("trace.csv");
    let status = run(&[
        "vqe", "--system", "AB2", "--lines", AB2_LINES,
        "--out", out.to_str().unwrap(), "--trace", trace.to_str().unwrap(),
    ]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let v = read_json(&out);
    let energy = v["ground_energy_hz"].as_f64().unwrap();
    assert!((energy - -2224.04).abs() <= 0.05);
    assert!(v["gap_hz"].as_f64().unwrap() < 1e-6);
    assert_eq!(v["theta"].as_array().unwrap().len(), 6);
    assert_eq!(v["trace_csv"].as_str().unwrap(), trace.to_str().unwrap());

    let csv = fs::read_to_string(&trace).unwrap();
    let mut rows = csv.lines();
    assert_eq!(
        rows.next().unwrap(),
        "iteration,evaluations,energy_hz,theta_0,theta_1,theta_2,theta_3,theta_4,theta_5"
    );
    assert_eq!(rows.count() as u64, v["iterations"].as_u64().unwrap());
}

#[test]
fn trace_defaults_next_to_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ab.json");
    assert!(run(&["vqe", "--system", "AB", "--lines", AB_LINES, "--out", out.to_str().unwrap()]).status.success());
    let v = read_json(&out);
    assert!(dir.path().join("ab.csv").exists());
    assert!((v["ground_energy_hz"].as_f64().unwrap() - v["oracle_energy_hz"].as_f64().unwrap()).abs() < 1e-3);
}

#[test]
fn seeded_shot_runs_are_identical() {
    let args = [
        "vqe", "--system", "AB", "--lines", AB_LINES, "--shots", "100000", "--seed", "7", "--max-iter", "40",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let m = &json(&a)["measurement"];
    assert_eq!(m["mode"], "shots");
    assert_eq!(m["seed"], 7);
}

#[test]
fn compare_flags_reference_discrepancy() {
    let v = json(&run(&["compare", "--system", "AB", "--lines", AB_LINES, "--reference", "reported_vqe=-2077.907"]));
    let oracle = v["oracle_energy_hz"].as_f64().unwrap();
    let analytic = v["analytic_energy_hz"].as_f64().unwrap();
    assert!((analytic - oracle).abs() < 1e-8);
    assert!(v["deltas"]["vqe_minus_oracle_hz"].as_f64().unwrap().abs() < 1e-3);
    let r = &v["references"][0];
    assert_eq!(r["label"], "reported_vqe");
    assert!((r["delta_hz"].as_f64().unwrap() - (-2077.907 - oracle)).abs() < 1e-12);
    assert!(r["delta_hz"].as_f64().unwrap().abs() > 0.8);
    assert_eq!(r["flagged"], true);
    assert!(v["convention_variants"].as_array().is_some_and(|a| !a.is_empty()));
}

#[test]
fn compare_three_spin_agreement() {
    let v = json(&run(&["compare", "--system", "AB2", "--lines", AB2_LINES]));
    let vqe = v["vqe_energy_hz"].as_f64().unwrap();
    let analytic = v["analytic_energy_hz"].as_f64().unwrap();
    assert!((vqe - analytic).abs() <= 0.05);
    assert!(v["deltas"]["vqe_minus_analytic_hz"].as_f64().unwrap().abs() <= 0.05);
}

#[test]
fn custom_hamiltonian_omits_analytic() {
    let dir = tempfile::tempdir().unwrap();
    let ham = dir.path().join("h.json");
    fs::write(
        &ham,
        r#"{"n_qubits": 2, "terms": [{"coeff": 1.0, "paulis": "ZI"}, {"coeff": 0.5, "paulis": "XX"}]}"#,
    )
    .unwrap();
    let v = json(&run(&["compare", "--hamiltonian", ham.to_str().unwrap()]));
    assert_eq!(v["system"], "custom");
    assert!(v.get("analytic_energy_hz").is_none());
    assert!(v["deltas"].get("analytic_minus_oracle_hz").is_none());
    let ground = -(1.0f64 + 0.25).sqrt();
    assert!((v["oracle_energy_hz"].as_f64().unwrap() - ground).abs() < 1e-10);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"system": "AB2", "lines_hz": [1502.9, 1498.0, 1492.6, 1487.8, 1484.6, 1484.2, 1479.1, 1474.4],
            "optimizer": {"method": "nelder_mead", "max_iterations": 3}}"#,
    )
    .unwrap();
    let from_file = json(&run(&["vqe", "--config", cfg.to_str().unwrap()]));
    assert_eq!(from_file["converged"], false);
    assert_eq!(from_file["iterations"], 4);

    let overridden = json(&run(&["vqe", "--config", cfg.to_str().unwrap(), "--max-iter", "5000"]));
    assert_eq!(overridden["converged"], true);

    let params = json(&run(&["analyze", "--config", cfg.to_str().unwrap(), "--system", "AB2", "--lines", AB2_LINES]));
    assert_eq!(params["nu_a"].as_f64().unwrap(), 1492.6);
}
