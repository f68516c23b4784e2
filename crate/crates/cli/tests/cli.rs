use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn seqmeas(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqmeas"))
        .args(args)
        .env_remove("SEQMEAS_SEED")
        .env_remove("SEQMEAS_EQ_TOL")
        .env_remove("SEQMEAS_FORMAT")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn close(v: &Value, want: f64) -> bool {
    (v.as_f64().expect("number") - want).abs() < 1e-9
}

#[test]
fn verify_passes_by_default() {
    let out = seqmeas(&["verify", "--samples", "20"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert_eq!(v["schemaVersion"], 1);
    assert_eq!(v["command"], "verify");
    assert_eq!(v["passed"], true);
    assert_eq!(v["result"]["suites"].as_array().unwrap().len(), 8);
}

#[test]
fn verify_fails_below_rounding_noise() {
    let out = seqmeas(&["verify", "--samples", "20", "--tolerance", "1e-18"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["passed"], false);
}

#[test]
fn verify_is_deterministic_per_seed() {
    let a = seqmeas(&["--seed", "7", "verify", "--samples", "10"]);
    let b = seqmeas(&["verify", "--samples", "10", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["seed"], 7);
}

#[test]
fn example_at_quarter_pi() {
    let out = seqmeas(&["example", "--theta", "pi/4"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["result"];
    assert!(close(&r["pAB"], 0.5));
    assert!(close(&r["pBA"], 1.0));
    assert!(close(&r["abaConditional"], 1.0));
    assert!(close(&r["babConditional"], 0.5));
    let c = &r["criteria"];
    for name in ["aaA", "aaB", "aba"] {
        assert_eq!(c[name]["holds"], true, "{name}");
    }
    assert_eq!(c["bab"]["holds"], false);
    assert!(close(&c["orderEffectMagnitude"], 0.5f64.sqrt()));
}

#[test]
fn example_at_endpoints() {
    let r0 = json(&seqmeas(&["example", "--theta", "0"]))["result"].clone();
    assert!(close(&r0["pAB"], 1.0) && close(&r0["pBA"], 1.0));
    assert!(close(&r0["criteria"]["orderEffectMagnitude"], 0.0));
    assert_eq!(r0["criteria"]["bab"]["holds"], true);

    let r = json(&seqmeas(&["example", "--theta", "pi/2"]))["result"].clone();
    assert!(close(&r["pAB"], 0.0));
    assert!(close(&r["criteria"]["orderEffectMagnitude"], 1.0));
    assert!(r["babConditional"].is_null() || close(&r["babConditional"], 0.0));
}

#[test]
fn check_round_trips_the_exported_example() {
    let dir = tempfile::tempdir().unwrap();
    let ex = json(&seqmeas(&["example", "--theta", "pi/3"]));
    let path = dir.path().join("pair.json");
    fs::write(
        &path,
        serde_json::to_string(&ex["result"]["instance"]).unwrap(),
    )
    .unwrap();

    let out = seqmeas(&["check", path.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let c = &json(&out)["result"]["criteria"];
    for name in ["aaA", "aaB", "aba", "bab"] {
        assert_eq!(
            c[name]["holds"], ex["result"]["criteria"][name]["holds"],
            "{name}"
        );
    }
    assert!(close(
        &c["orderEffectMagnitude"],
        ex["result"]["criteria"]["orderEffectMagnitude"]
            .as_f64()
            .unwrap()
    ));
}

#[test]
fn check_rejects_non_unitary_factor() {
    let dir = tempfile::tempdir().unwrap();
    let mut inst = json(&seqmeas(&["example"]))["result"]["instance"].clone();
    inst["A"]["U"][0][0] = serde_json::json!([2.0, 0.0]);
    let path = dir.path().join("bad.json");
    fs::write(&path, inst.to_string()).unwrap();

    let out = seqmeas(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("A.U is not unitary"), "{err}");
}

#[test]
fn check_reports_missing_file() {
    let out = seqmeas(&["check", "/nonexistent/pair.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn search_result_checks_as_no_go_pair() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("search.json");
    let trace_path = dir.path().join("trace.csv");
    let args = [
        "search",
        "--dim",
        "3",
        "--restarts",
        "2",
        "--max-iters",
        "800",
        "--seed",
        "3",
        "--out",
        out_path.to_str().unwrap(),
        "--trace",
        trace_path.to_str().unwrap(),
    ];
    let out = seqmeas(&args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out.stdout.is_empty());
    let first = fs::read(&out_path).unwrap();
    let v: Value = serde_json::from_slice(&first).unwrap();
    let trace = fs::read_to_string(&trace_path).unwrap();
    assert!(trace.starts_with("iter,restart,objective,totalPenalty"));

    assert_eq!(seqmeas(&args).status.code(), Some(0));
    assert_eq!(
        fs::read(&out_path).unwrap(),
        first,
        "search is deterministic"
    );

    let pair_path = dir.path().join("pair.json");
    fs::write(&pair_path, v["result"]["result"]["bestPair"].to_string()).unwrap();
    let c = json(&seqmeas(&[
        "check",
        pair_path.to_str().unwrap(),
        "--tolerance",
        "1e-4",
    ]));
    let magnitude = c["result"]["criteria"]["orderEffectMagnitude"]
        .as_f64()
        .unwrap();
    if v["result"]["result"]["feasible"] == true {
        assert!(magnitude < 1e-4, "feasible pair has magnitude {magnitude}");
    }
}

#[test]
fn search_rejects_small_canonical_dimension() {
    let out = seqmeas(&["search", "--dim", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--free-projectors"));
}

#[test]
fn shift_demo_half_amplitude() {
    let out = seqmeas(&["shift-demo", "--a", "0.5", "--n", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["result"];
    let mut eig: Vec<f64> = r["eigenvalues"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let want = [1.0, 1.0, 1.0, 1.0, 0.25, 0.0];
    for (g, w) in eig.iter().zip(want) {
        assert!((g - w).abs() < 1e-9, "{eig:?}");
    }
    assert_eq!(r["isProjector"], false);
    assert!(close(&r["emResidualInterior"], 0.0));
}

#[test]
fn shift_demo_unit_amplitude_is_projector() {
    let r = json(&seqmeas(&["shift-demo", "--a", "1"]))["result"].clone();
    assert_eq!(r["isProjector"], true);
}

#[test]
fn shift_demo_rejects_tiny_truncation() {
    assert_eq!(seqmeas(&["shift-demo", "--n", "2"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(seqmeas(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        seqmeas(&["example", "--theta", "quarter"]).status.code(),
        Some(2)
    );
}

#[test]
fn environment_overrides_flags() {
    let out = Command::new(env!("CARGO_BIN_EXE_seqmeas"))
        .args(["example"])
        .env("SEQMEAS_SEED", "42")
        .env("SEQMEAS_EQ_TOL", "1e-7")
        .output()
        .unwrap();
    let v = json(&out);
    assert_eq!(v["seed"], 42);
    assert!(close(&v["tolerances"]["eqTol"], 1e-7));
}

#[test]
fn csv_format() {
    let out = seqmeas(&["--format", "csv", "example"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows = csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(text.as_bytes());
    assert_eq!(rows.headers().unwrap(), vec!["quantity", "value"]);
    let p_ab = rows
        .records()
        .map(Result::unwrap)
        .find(|r| &r[0] == "pAB")
        .expect("pAB row");
    assert!((p_ab[1].parse::<f64>().unwrap() - 0.5).abs() < 1e-12);
}
