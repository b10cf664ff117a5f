//! End-to-end behavior of the binary: exit codes, artifacts, round trips,
//! and reproducibility of the CSV bodies.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nsn_ddu_core::{EquilibriumCertificate, Verdict};

const BIN: &str = env!("CARGO_BIN_EXE_nsn-ddu");

fn scenario() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/scenarios/paper_sec5.json")
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut full: Vec<&str> = args.to_vec();
    let dir_str = dir.to_str().unwrap();
    full.push("--out");
    full.push(dir_str);
    run(&full)
}

fn read_cert(dir: &Path) -> EquilibriumCertificate {
    serde_json::from_str(&std::fs::read_to_string(dir.join("certificate.json")).unwrap()).unwrap()
}

#[test]
fn missing_scenario_is_an_input_error() {
    let out = run(&["solve", "/nonexistent/missing.json", "--lambda", "0.2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));
}

#[test]
fn malformed_scenario_is_an_input_error() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let out = run(&["solve", bad.to_str().unwrap(), "--lambda", "0.2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn out_of_range_lambda_is_an_input_error() {
    let out = run(&["solve", scenario().to_str().unwrap(), "--lambda", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn zero_step_sweep_is_a_usage_error() {
    let out = run(&["sweep", scenario().to_str().unwrap(), "--step", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("step"));
}

#[test]
fn exhausted_iterations_exit_as_solver_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(
        tmp.path(),
        &[
            "solve",
            scenario().to_str().unwrap(),
            "--lambda",
            "0.7",
            "--max-iter",
            "1",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    // The trace is still persisted for the failed run.
    let trace = std::fs::read_to_string(tmp.path().join("trace.csv")).unwrap();
    assert!(trace.lines().count() >= 2);
}

#[test]
fn solve_then_verify_round_trips_the_verdict_and_margins() {
    let solve_dir = tempfile::tempdir().unwrap();
    let out = run_in(
        solve_dir.path(),
        &["solve", scenario().to_str().unwrap(), "--lambda", "0.2"],
    );
    assert_eq!(out.status.code(), Some(0));
    let solved = read_cert(solve_dir.path());

    let verify_dir = tempfile::tempdir().unwrap();
    let cert_path = solve_dir.path().join("certificate.json");
    let out = run_in(
        verify_dir.path(),
        &[
            "verify",
            scenario().to_str().unwrap(),
            cert_path.to_str().unwrap(),
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let reverified = read_cert(verify_dir.path());
    assert_eq!(solved, reverified, "verify must reproduce the certificate exactly");
}

#[test]
fn verify_rejects_out_of_interval_candidates() {
    let solve_dir = tempfile::tempdir().unwrap();
    run_in(
        solve_dir.path(),
        &["solve", scenario().to_str().unwrap(), "--lambda", "0.2"],
    );
    let mut cert = read_cert(solve_dir.path());
    cert.candidate.w = 3.0;
    let tampered = solve_dir.path().join("tampered.json");
    std::fs::write(&tampered, serde_json::to_string(&cert.candidate).unwrap()).unwrap();

    let verify_dir = tempfile::tempdir().unwrap();
    let out = run_in(
        verify_dir.path(),
        &[
            "verify",
            scenario().to_str().unwrap(),
            tampered.to_str().unwrap(),
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    let reverified = read_cert(verify_dir.path());
    assert!(!reverified.cond_b.pass);
    assert_eq!(reverified.verdict, Verdict::NotEquilibrium);
}

#[test]
fn sweep_csv_bodies_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = run_in(
            dir.path(),
            &[
                "sweep",
                scenario().to_str().unwrap(),
                "--from",
                "0",
                "--to",
                "1",
                "--step",
                "0.1",
                "--both",
            ],
        );
        assert_eq!(out.status.code(), Some(0));
    }
    let csv_a = std::fs::read(a.path().join("sweep.csv")).unwrap();
    let csv_b = std::fs::read(b.path().join("sweep.csv")).unwrap();
    assert_eq!(csv_a, csv_b, "identical inputs must give byte-identical bodies");
}

#[test]
fn sweep_degenerate_range_gives_one_row_per_regime() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(
        tmp.path(),
        &[
            "sweep",
            scenario().to_str().unwrap(),
            "--from",
            "0.2",
            "--to",
            "0.2",
            "--step",
            "0.01",
            "--both",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(tmp.path().join("sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 3, "header plus one row per regime: {csv}");
    assert!(rows[0].starts_with("lambda,regime,x1_1,x1_2,x2_1,x2_2,w,y1,y2,f1,f2,weighted,verdict,ddu_ge_diu"));
    assert!(rows[1].ends_with("true"));
}

#[test]
fn sweep_parallel_matches_serial() {
    let serial = tempfile::tempdir().unwrap();
    let parallel = tempfile::tempdir().unwrap();
    let base = [
        "sweep".to_string(),
        scenario().to_str().unwrap().to_string(),
        "--step".into(),
        "0.05".into(),
        "--both".into(),
    ];
    let out = Command::new(BIN)
        .args(&base)
        .args(["--out", serial.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let out = Command::new(BIN)
        .args(&base)
        .args(["--jobs", "4", "--out", parallel.path().to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        std::fs::read(serial.path().join("sweep.csv")).unwrap(),
        std::fs::read(parallel.path().join("sweep.csv")).unwrap(),
        "parallel sweep must merge deterministically"
    );
}

#[test]
fn pareto_header_and_two_point_front() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(
        tmp.path(),
        &[
            "pareto",
            scenario().to_str().unwrap(),
            "--lambda",
            "0.2",
            "--at",
            "ddu",
            "--grid-n",
            "2",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(tmp.path().join("pareto.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "w,f1,f2,nondominated");
    assert_eq!(rows.len(), 3, "two-point front: {csv}");
    let star: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("pareto_star.json")).unwrap()).unwrap();
    assert_eq!(star["w"], 2.0);
}

#[test]
fn trace_columns_follow_the_contract() {
    let tmp = tempfile::tempdir().unwrap();
    run_in(
        tmp.path(),
        &["solve", scenario().to_str().unwrap(), "--lambda", "0.2"],
    );
    let trace = std::fs::read_to_string(tmp.path().join("trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next().unwrap(), "iter,x1_1,x1_2,x2_1,x2_2,w,displacement");
    let first = lines.next().unwrap();
    assert!(first.starts_with("0,"));
    assert!(first.ends_with(','), "initial row has no displacement: {first}");
}

#[test]
fn output_root_env_is_honored() {
    let root = tempfile::tempdir().unwrap();
    let out = Command::new(BIN)
        .args(["solve", scenario().to_str().unwrap(), "--lambda", "0.2"])
        .env("NSN_DDU_OUT", root.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let entries: Vec<_> = std::fs::read_dir(root.path()).unwrap().collect();
    assert_eq!(entries.len(), 1, "one run directory under the root");
    let dir = entries[0].as_ref().unwrap().path();
    assert!(dir.file_name().unwrap().to_str().unwrap().starts_with("solve-"));
    assert!(dir.join("run.json").exists());
    assert!(dir.join("certificate.json").exists());
}

#[test]
fn run_record_echoes_the_scenario() {
    let tmp = tempfile::tempdir().unwrap();
    run_in(
        tmp.path(),
        &["solve", scenario().to_str().unwrap(), "--lambda", "0.2"],
    );
    let record: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("run.json")).unwrap()).unwrap();
    assert_eq!(record["command"], "solve");
    assert_eq!(record["scenario"]["leaders"][0]["a"][0], 1.3);
    assert_eq!(record["config"]["lambda"], 0.2);
    let outputs: Vec<String> = record["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    assert!(outputs.contains(&"certificate.json".to_string()));
    assert!(outputs.contains(&"trace.csv".to_string()));
}

#[test]
fn audit_writes_its_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(
        tmp.path(),
        &["audit", scenario().to_str().unwrap(), "--samples", "500"],
    );
    assert_eq!(out.status.code(), Some(0));
    let audit: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("audit.json")).unwrap()).unwrap();
    assert_eq!(audit["report"]["verdict"], "strong_exists");
    assert_eq!(audit["clause"], "strong_all_concave");
}

#[test]
fn br_myopic_requires_a_w() {
    let out = run(&[
        "br",
        scenario().to_str().unwrap(),
        "--leader",
        "1",
        "--profile",
        "0,0,1,1",
        "--mode",
        "myopic",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn br_prints_the_tie_set() {
    let out = run(&[
        "br",
        scenario().to_str().unwrap(),
        "--leader",
        "1",
        "--profile",
        "0,0,1,1",
        "--mode",
        "myopic",
        "--w",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("coordinates {2}"), "stdout: {stdout}");
}

#[test]
fn followers_check_passes_on_the_bundled_scenario() {
    let out = run(&["followers", "check", scenario().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("pass"));
}

#[test]
fn multistart_reports_distinct_outcomes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(
        tmp.path(),
        &[
            "solve",
            scenario().to_str().unwrap(),
            "--lambda",
            "0.2",
            "--multistart",
        ],
    );
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("multistart:"), "stdout: {stdout}");
}
