//! End-to-end tests of the `valdisc` binary: flag grammar, config-file
//! merging, JSON/CSV outputs, determinism, and exit codes.

use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_valdisc"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn fmt_example_passes_within_tolerance() {
    let out = run(&[
        "fmt",
        "--map",
        "1 | 0,0,0,1",
        "--divisor",
        "1; (1,0)=1",
        "--r",
        "0.9",
        "--no-timestamp",
    ]);
    assert_eq!(exit_code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["command"], "fmt");
    assert_eq!(doc["verdict"], "PASS");
    assert_eq!(doc["convention"], "ddc=laplacian/2pi");
    assert!(doc.get("timestamp").is_none());
    let rows = doc["results"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    let t = rows[0]["T_geom"].as_f64().unwrap();
    let residual = rows[0]["residual"].as_f64().unwrap();
    assert!(residual.abs() <= 1e-6 * (1.0 + t.abs()));
    // seed is recorded even though this command draws nothing
    assert_eq!(doc["config"]["seed"], "0");
}

#[test]
fn mason_example_has_zero_slack() {
    let out = run(&["mason", "--a", "0,0,1", "--b", "1,-2", "--no-timestamp"]);
    assert_eq!(exit_code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["verdict"], "PASS");
    assert_eq!(doc["results"]["slack"], 0);
    assert_eq!(doc["results"]["max_degree"], 2);
    assert_eq!(doc["results"]["radical_degree"], 3);
}

#[test]
fn corrupted_map_is_an_input_error() {
    let out = run(&["rh", "--map", "0,0,| 1"]);
    assert_eq!(exit_code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("input error"), "stderr: {err}");
}

#[test]
fn unknown_flag_is_an_input_error() {
    let out = run(&["rh", "--map", "0,0,1 | 1", "--frobnicate"]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn missing_required_setting_is_an_input_error() {
    let out = run(&["fmt", "--r", "0.9"]);
    assert_eq!(exit_code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("--map"), "stderr: {err}");
}

#[test]
fn tolerance_floor_is_enforced() {
    let out = run(&[
        "fmt",
        "--map",
        "1 | 0,1",
        "--divisor",
        "1; (1,0)=1",
        "--r",
        "0.5",
        "--tol",
        "1e-13",
    ]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn radius_outside_disc_is_an_input_error() {
    for bad in ["0", "1", "1.5", "-0.3"] {
        let out = run(&[
            "fmt",
            "--map",
            "1 | 0,1",
            "--divisor",
            "1; (1,0)=1",
            "--r",
            bad,
        ]);
        assert_eq!(exit_code(&out), 1, "radius {bad} accepted");
    }
}

#[test]
fn identical_runs_emit_identical_bytes() {
    let args = [
        "jensen",
        "--atom",
        "0.3+0.1i",
        "--bipoly",
        "0,0,1;0,0;1",
        "--r-grid",
        "0.3,0.6,0.9",
        "--no-timestamp",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(exit_code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn timestamp_present_by_default() {
    let out = run(&["mason", "--a", "0,0,1", "--b", "1,-2"]);
    assert_eq!(exit_code(&out), 0);
    let doc = stdout_json(&out);
    assert!(doc["timestamp"].is_string());
}

#[test]
fn config_file_merges_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(
        &conf,
        "# growth check\nmap = 1 | 0,0,0,1\ndivisor = 1; (1,0)=1\nr = 0.3\ntol = 1e-7\n",
    )
    .unwrap();
    let out = run(&[
        "fmt",
        "--config",
        conf.to_str().unwrap(),
        "--r",
        "0.9",
        "--no-timestamp",
    ]);
    assert_eq!(exit_code(&out), 0);
    let doc = stdout_json(&out);
    // flag overrides the file; file supplies the rest
    assert_eq!(doc["config"]["r"], "0.9");
    assert_eq!(doc["config"]["tol"], "1e-7");
    assert_eq!(doc["config"]["map"], "1 | 0,0,0,1");
    let rows = doc["results"]["rows"].as_array().unwrap();
    assert_eq!(rows[0]["r"].as_f64().unwrap(), 0.9);
}

#[test]
fn csv_and_json_files_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let json = dir.path().join("out.json");
    let out = run(&[
        "rh",
        "--map",
        "0,0,1 | 1",
        "--out-csv",
        csv.to_str().unwrap(),
        "--out-json",
        json.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert_eq!(exit_code(&out), 0);
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("degree,ram_total,lhs,rhs,holds\n"));
    assert!(table.contains("2,2,-4,-4,true"));
    let mirrored: Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(mirrored["verdict"], "PASS");
    // the mirrored file matches stdout byte for byte (plus trailing newline)
    assert_eq!(
        std::fs::read(&json).unwrap(),
        [out.stdout.as_slice(), b""].concat()
    );
}

#[test]
fn logrh_standard_boundary_default() {
    let out = run(&["logrh", "--map", "0,0,1 | 1", "--no-timestamp"]);
    assert_eq!(exit_code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["config"]["boundary"], "0,1,inf");
    assert_eq!(doc["verdict"], "PASS");
    assert_eq!(doc["results"]["boundary"], "0,1,inf");
}

#[test]
fn taut_identity_reports_small_residual() {
    let out = run(&["taut", "--map", "1 | 2,1", "--r", "0.5", "--no-timestamp"]);
    assert_eq!(exit_code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["verdict"], "PASS");
    let residual = doc["results"]["residual"].as_f64().unwrap();
    assert!(residual.abs() <= 1e-5, "residual {residual}");
}

#[test]
fn taut_trend_violation_exits_two_with_report() {
    // three-point boundary: the normalized tail sits near +1, far above
    // the default 1e-2 ceiling, so the run completes but fails
    let out = run(&[
        "taut",
        "--seq",
        "geom:[1:(2z)^n+0.5],n=2,4,8,16",
        "--r-grid",
        "0.6",
        "--no-timestamp",
    ]);
    assert_eq!(exit_code(&out), 2);
    let doc = stdout_json(&out);
    assert_eq!(doc["verdict"], "FAIL");
    let tail = doc["results"]["report"]["rows"][0]["tail_max"].as_f64().unwrap();
    assert!(tail > 0.5, "tail {tail}");
}

#[test]
fn taut_needs_exactly_one_mode() {
    let out = run(&["taut", "--r", "0.5"]);
    assert_eq!(exit_code(&out), 1);
    let out = run(&[
        "taut",
        "--map",
        "1 | 2,1",
        "--seq",
        "lin:[1:nz],n=1..4",
        "--r",
        "0.5",
    ]);
    assert_eq!(exit_code(&out), 1);
}

#[test]
fn bubble_scan_finds_origin_concentration() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("conc.csv");
    let out = run(&[
        "bubble",
        "--seq",
        "lin:[1:nz],n=5,10,20",
        "--r",
        "0.9",
        "--eps",
        "0.1",
        "--out-csv",
        csv.to_str().unwrap(),
        "--no-timestamp",
    ]);
    assert_eq!(exit_code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["verdict"], "REPORT");
    let found = doc["results"]["concentrations"].as_array().unwrap();
    assert_eq!(found.len(), 1);
    let re = found[0]["re"].as_f64().unwrap();
    let im = found[0]["im"].as_f64().unwrap();
    assert!((re * re + im * im).sqrt() <= 1e-3);
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("re,im,mass\n"));
}

#[test]
fn bubble_model_splits_energy_terms() {
    let out = run(&[
        "bubble",
        "--map",
        "1 | 0,1",
        "--divisor",
        "1; (1,0)=1",
        "--bubble",
        "0.5:2",
        "--r",
        "0.9",
        "--no-timestamp",
    ]);
    assert_eq!(exit_code(&out), 0);
    let doc = stdout_json(&out);
    let total = doc["results"]["total"].as_f64().unwrap();
    let base = doc["results"]["base_term"].as_f64().unwrap();
    let b = &doc["results"]["bubbles"][0];
    let expected = base + b["energy"].as_f64().unwrap() * b["green_weight"].as_f64().unwrap();
    assert!((total - expected).abs() <= 1e-12);
}

#[test]
fn gromov_linear_family_passes() {
    let out = run(&[
        "gromov",
        "--seq",
        "lin:[1:nz],n=1,4,16,64,256,1024,4096,16384",
        "--r-grid",
        "0.5",
        "--mesh",
        "16",
        "--bound",
        "12",
        "--no-timestamp",
    ]);
    assert_eq!(exit_code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["verdict"], "PASS");
    let v = &doc["results"]["verdict"];
    assert!(v["violations"].as_array().unwrap().is_empty());
    assert_eq!(v["bubbles_detected"].as_array().unwrap().len(), 1);
}

#[test]
fn currents_family_certifies_normalization() {
    let out = run(&[
        "currents",
        "--seq",
        "geom:[1:(2z)^n+1],n=1..8",
        "--r-grid",
        "0.6",
        "--no-timestamp",
    ]);
    assert_eq!(exit_code(&out), 0);
    let doc = stdout_json(&out);
    assert_eq!(doc["verdict"], "PASS");
    assert_eq!(doc["results"]["self_pairing_exact"], true);
    assert_eq!(doc["results"]["exactness"]["all_compliant"], true);
    // every sample's normalizer self-pairing is exactly 1
    for s in doc["results"]["samples"].as_array().unwrap() {
        assert_eq!(s["pairings"][0].as_f64().unwrap(), 1.0);
    }
}

#[test]
fn seq_grammar_rejects_malformed_specs() {
    for bad in [
        "geom:1:(2z)^n,n=1..4",
        "geom:[1:(2z)^n],n=4..1",
        "geom:[1:(0z)^n],n=1..4",
        "pow:[1:(2z)^n],n=1..4",
        "lin:[1:nz],n=0,1",
        "geom:[1:(2z)^n],n=",
    ] {
        let out = run(&["gromov", "--seq", bad, "--r-grid", "0.5"]);
        assert_eq!(exit_code(&out), 1, "accepted {bad:?}");
    }
}

#[test]
fn seq_overflow_is_an_input_error() {
    let out = run(&["bubble", "--seq", "geom:[1:(2z)^n],n=2000", "--r", "0.9"]);
    assert_eq!(exit_code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("overflow"), "stderr: {err}");
}
