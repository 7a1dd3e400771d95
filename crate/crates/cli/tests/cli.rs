use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sl_extremal::{verify_thm2, RobinBC, SolverConfig};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sl-extremal"));
    cmd.env_remove("SL_EXTREMAL_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn validate(schema: &str, doc: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(format!("{schema}.schema.json"));
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

fn json_ok(schema: &str, args: &[&str]) -> Value {
    let doc: Value = serde_json::from_str(&stdout_ok(args)).unwrap();
    validate(schema, &doc);
    doc
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn expect_failure(args: &[&str], env: Option<(&str, &str)>, code: i32, kind: &str) {
    let mut cmd = bin();
    cmd.args(args);
    if let Some((k, v)) = env {
        cmd.env(k, v);
    }
    let out = cmd.output().unwrap();
    assert_eq!(out.status.code(), Some(code), "{args:?}");
    assert!(out.stdout.is_empty());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.lines().count(), 1, "{stderr}");
    let doc: Value = serde_json::from_str(&stderr).unwrap();
    validate("error", &doc);
    assert_eq!(doc["error"], kind);
}

const ZERO_Q: &str = r#"{"breakpoints":[0,1],"heights":[0]}"#;

#[test]
fn eig_zero_neumann_example() {
    let doc = json_ok("eig", &["eig", "--q-json", ZERO_Q, "--k0sq", "0", "--k1sq", "0"]);
    assert_eq!(doc["lambda1"].as_f64(), Some(0.0));
    assert!(doc.get("eigenfunction_samples").is_none());
}

#[test]
fn verify_thm2_example_matches_library() {
    let text = stdout_ok(&["verify-thm2", "--gamma", "2", "--k0sq", "1", "--k1sq", "1", "--n", "10,100,1000,10000"]);
    let (header, rows) = parse_csv(&text);
    assert_eq!(header, ["n_or_rho", "lambda1", "reference", "gap"]);
    assert_eq!(rows.len(), 4);
    let gaps: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");

    let bc = RobinBC::new(1.0, 1.0).unwrap();
    let table = verify_thm2(2.0, &bc, &[10, 100, 1000, 10_000], &SolverConfig::default()).unwrap();
    for (row, expect) in rows.iter().zip(&table.rows) {
        let parsed: Vec<f64> = row.iter().map(|c| c.parse().unwrap()).collect();
        assert_eq!(parsed, [expect.n_or_rho, expect.lambda1, expect.reference, expect.gap]);
    }

    let doc = json_ok(
        "verify-thm2",
        &["verify-thm2", "--gamma", "2", "--k0sq", "1", "--k1sq", "1", "--n", "10,100", "--format", "json"],
    );
    assert_eq!(doc["below_ceiling"], true);
}

#[test]
fn family_statement1_example() {
    let doc = json_ok("family", &["family", "--statement", "1", "--zeta", "0.5", "--n", "4", "--gamma", "0.5"]);
    assert_eq!(doc["gamma_norm"].as_f64(), Some(0.25));
    assert_eq!(doc["support"], serde_json::json!([0.25, 0.5]));
}

#[test]
fn family_statements_2_and_3() {
    let doc = json_ok("family", &["family", "--statement", "2", "--gamma", "0.5", "--rho", "10"]);
    assert!((doc["gamma_norm"].as_f64().unwrap() - 1.0).abs() < 1e-10);
    assert!(doc["kappa"].as_f64().unwrap() < 1.0);
    let doc = json_ok("family", &["family", "--statement", "3", "--gamma", "2", "--n", "100"]);
    assert!((doc["gamma_norm"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let text = stdout_ok(&["family", "--statement", "3", "--gamma", "2", "--n", "100", "--format", "csv"]);
    let (header, rows) = parse_csv(&text);
    assert_eq!(header, ["a", "b", "height"]);
    assert!(!rows.is_empty());
}

#[test]
fn family_requires_statement_parameters() {
    expect_failure(&["family", "--statement", "1", "--gamma", "0.5", "--n", "4"], None, 2, "InvalidArgument");
    expect_failure(&["family", "--statement", "4", "--gamma", "0.5"], None, 2, "Usage");
}

#[test]
fn eig_zero_and_norms_and_wdist() {
    let doc = json_ok("eig-zero", &["eig-zero", "--k0sq", "1", "--k1sq", "1"]);
    let w = doc["lambda1"].as_f64().unwrap().sqrt();
    assert!((w.tan() * (w * w - 1.0) - 2.0 * w).abs() < 1e-8);

    let q = r#"{"breakpoints":[0,0.5,1],"heights":[1,4]}"#;
    let text = stdout_ok(&["norms", "--q-json", q, "--p", "-1,0,1"]);
    let (_, rows) = parse_csv(&text);
    let norms: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(norms.len(), 3);
    assert!((norms[0] - 1.6).abs() < 1e-14);
    assert!((norms[1] - 2.0).abs() < 1e-14);
    assert!((norms[2] - 2.5).abs() < 1e-14);
    json_ok("norms", &["norms", "--q-json", q, "--p=-1,2", "--format", "json"]);

    let delta = r#"{"breakpoints":[0,1],"heights":[0],"deltas":[{"site":0.5,"weight":1}]}"#;
    let doc = json_ok("wdist", &["wdist", "--f-json", delta, "--g-json", delta, "--grid", "64,128", "--format", "json"]);
    for row in doc["rows"].as_array().unwrap() {
        assert_eq!(row["distance"].as_f64(), Some(0.0));
    }
}

#[test]
fn norms_reject_deltas() {
    let q = r#"{"breakpoints":[0,1],"heights":[1],"deltas":[{"site":0.5,"weight":1}]}"#;
    expect_failure(&["norms", "--q-json", q, "--p", "1"], None, 2, "InvalidArgument");
}

#[test]
fn verify_thm1_json_is_certified() {
    let doc = json_ok("verify-thm1", &["verify-thm1", "--gamma", "0.5", "--rho", "10,100", "--format", "json"]);
    assert_eq!(doc["all_certified"], true);
    assert_eq!(doc["strictly_decreasing"], true);
    let csv = stdout_ok(&["verify-thm1", "--gamma", "0.5", "--rho", "10,100"]);
    assert_eq!(parse_csv(&csv).1.len(), 2);
}

#[test]
fn search_output_and_determinism() {
    let args = ["search", "--gamma", "0.5", "--mode", "min", "--cells", "4", "--iters", "40", "--seed", "3", "--caps", "4,8"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let doc: Value = serde_json::from_slice(&a.stdout).unwrap();
    validate("search", &doc);
    assert_eq!(doc["rounds"].as_array().unwrap().len(), 2);

    let text = stdout_ok(&["search", "--gamma", "2", "--mode", "max", "--iters", "25", "--format", "csv"]);
    assert_eq!(parse_csv(&text).1.len(), 25);
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["verify-thm2", "--gamma", "2", "--k0sq", "1", "--k1sq", "4", "--n", "10,30,100,300,1000"];
    let outputs: Vec<Vec<u8>> = ["1", "2", "7"]
        .iter()
        .map(|t| {
            let out = bin().args(args).env("SL_EXTREMAL_THREADS", t).output().unwrap();
            assert!(out.status.success());
            out.stdout
        })
        .collect();
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
    assert_eq!(outputs[0], run(&args).stdout);
}

#[test]
fn validation_errors_exit_2() {
    expect_failure(&["eig", "--q-json", r#"{"breakpoints":[0,1],"heights":[-1]}"#], None, 2, "InvalidPotential");
    expect_failure(&["eig", "--q-json", "not json"], None, 2, "InvalidPotential");
    expect_failure(&["eig", "--q-json", ZERO_Q, "--k0sq", "-1"], None, 2, "InvalidArgument");
    expect_failure(&["eig", "--k0sq", "1"], None, 2, "Usage");
    expect_failure(&["no-such-command"], None, 2, "Usage");
    expect_failure(&["eig", "--q-file", "/nonexistent/q.json"], None, 2, "InvalidInput");
    expect_failure(&["eig-zero"], Some(("SL_EXTREMAL_THREADS", "0")), 2, "InvalidArgument");
    expect_failure(&["verify-thm1", "--gamma", "2", "--rho", "10"], None, 2, "InvalidArgument");
    expect_failure(&["norms", "--q-json", ZERO_Q, "--p", "0"], None, 2, "NonPositiveExponentOnVanishingFunction");
}

#[test]
fn norm_budget_failure_exits_3() {
    expect_failure(
        &["family", "--statement", "2", "--gamma", "0.5", "--rho", "10", "--spikes", "4", "--spike-height", "10"],
        None,
        3,
        "NormBudgetExceeded",
    );
}

#[test]
fn file_input_and_output() {
    let dir = tempfile::tempdir().unwrap();
    let q_path = dir.path().join("q.json");
    std::fs::write(&q_path, r#"{"breakpoints":[0,0.5,1],"heights":[2,0],"deltas":[{"site":0.25,"weight":1.5}]}"#).unwrap();
    let out_path = dir.path().join("out.json");
    let out = run(&[
        "eig",
        "--q-file",
        q_path.to_str().unwrap(),
        "--k0sq",
        "1",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    validate("eig", &doc);

    let inline = stdout_ok(&["eig", "--q-json", &std::fs::read_to_string(&q_path).unwrap(), "--k0sq", "1"]);
    assert_eq!(inline, std::fs::read_to_string(&out_path).unwrap());
}

#[test]
fn eig_samples_and_integrators() {
    let q = r#"{"breakpoints":[0,0.3,1],"heights":[5,1]}"#;
    let doc = json_ok("eig", &["eig", "--q-json", q, "--k0sq", "1", "--k1sq", "2", "--samples", "50"]);
    let samples = doc["eigenfunction_samples"].as_array().unwrap();
    assert!(samples.len() >= 51);
    assert!(samples.iter().all(|s| s[1].as_f64().unwrap() > 0.0));

    let csv = stdout_ok(&["eig", "--q-json", q, "--samples", "10", "--format", "csv"]);
    let (header, rows) = parse_csv(&csv);
    assert_eq!(header, ["x", "y"]);
    assert_eq!(rows.len(), 11);

    let exact = json_ok("eig", &["eig", "--q-json", q, "--k0sq", "1"]);
    let rk4 = json_ok("eig", &["eig", "--q-json", q, "--k0sq", "1", "--integrator", "rk4", "--ode-steps-per-cell", "64"]);
    let diff = exact["lambda1"].as_f64().unwrap() - rk4["lambda1"].as_f64().unwrap();
    assert!(diff.abs() < 1e-8, "{diff}");
}
