use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> PathBuf {
    repo_root().join("fixtures/golden").join(name)
}

fn fcvt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fcvt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn schema(name: &str) -> jsonschema::Validator {
    let text = std::fs::read_to_string(repo_root().join("schemas").join(name)).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn assert_valid(validator: &jsonschema::Validator, doc: &Value) {
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}\n{doc}");
}

fn assert_json_close(got: &Value, want: &Value, path: &str) {
    match (got, want) {
        (Value::Number(g), Value::Number(w)) => {
            let (g, w) = (g.as_f64().unwrap(), w.as_f64().unwrap());
            assert!((g - w).abs() <= 1e-12 * g.abs().max(w.abs()).max(1e-300), "{path}: {g} vs {w}");
        }
        (Value::Object(g), Value::Object(w)) => {
            assert_eq!(g.keys().collect::<Vec<_>>(), w.keys().collect::<Vec<_>>(), "{path}");
            for (k, v) in w {
                assert_json_close(&g[k], v, &format!("{path}.{k}"));
            }
        }
        _ => assert_eq!(got, want, "{path}"),
    }
}

fn write_temp(dir: &tempfile::TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn golden_reports_are_reproduced() {
    let validator = schema("test_report.schema.json");
    for name in ["null_n512_p4", "model1_n120_p2"] {
        let csv = fixture(&format!("{name}.csv"));
        let out = fcvt(&["test", "--data", csv.to_str().unwrap(), "--response", "y", "--format", "json"]);
        let got = stdout_json(&out);
        assert_valid(&validator, &got);
        let want: Value =
            serde_json::from_str(&std::fs::read_to_string(fixture(&format!("{name}.expected.json"))).unwrap())
                .unwrap();
        assert_json_close(&got, &want, name);
    }
}

#[test]
fn heteroscedastic_fixture_is_rejected() {
    let csv = fixture("model1_n120_p2.csv");
    let got = stdout_json(&fcvt(&["test", "--data", csv.to_str().unwrap(), "--response", "y", "--format", "json"]));
    assert_eq!(got["reject"], Value::Bool(true));
    assert!(got["p_value"].as_f64().unwrap() < 1e-4);
}

#[test]
fn text_and_json_agree_to_six_digits() {
    let csv = fixture("null_n512_p4.csv");
    let csv = csv.to_str().unwrap();
    let json = stdout_json(&fcvt(&["test", "--data", csv, "--response", "1", "--format", "json"]));
    let text = fcvt(&["test", "--data", csv, "--response", "1", "--format", "text"]);
    assert!(text.status.success());
    let text = String::from_utf8(text.stdout).unwrap();
    let field = |label: &str| -> f64 {
        let line = text.lines().find(|l| l.trim_start().starts_with(label)).unwrap();
        line.split_whitespace().nth(1).unwrap().parse().unwrap()
    };
    for (label, key) in [("T", "T"), ("a", "a"), ("b", "b"), ("z", "z"), ("p_value", "p_value"), ("tr(P∘P)", "tr_P_hadamard")] {
        let j = json[key].as_f64().unwrap();
        let t = field(label);
        assert!((t - j).abs() <= 5e-6 * j.abs(), "{label}: text {t} json {j}");
    }
    assert_eq!(json["n"], 512);
    assert_eq!(json["p"], 5);
}

#[test]
fn synthetic_csv_reproduces_first_replication() {
    use fcvt::sim::{replications, SimulationConfig};
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("syn.csv");
    let out = fcvt(&[
        "simulate", "--n", "512", "--p", "4", "--reps", "100", "--seed", "11", "--emit-csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let report = stdout_json(&fcvt(&[
        "test", "--data", csv.to_str().unwrap(), "--response", "y", "--no-intercept", "--format", "json",
    ]));
    let mut config = SimulationConfig::new(512, 4);
    config.reps = 100;
    config.seed = 11;
    let first = replications(&config).unwrap()[0];
    let p = report["p_value"].as_f64().unwrap();
    assert!(p > 0.0 && p < 1.0);
    assert!((p - first.p_value).abs() <= 1e-12, "{p} vs {}", first.p_value);
    assert!((report["T"].as_f64().unwrap() - first.t).abs() <= 1e-12);
}

#[test]
fn crlf_and_lf_inputs_give_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let lf = std::fs::read_to_string(fixture("model1_n120_p2.csv")).unwrap();
    let crlf = write_temp(&dir, "crlf.csv", &lf.replace('\n', "\r\n"));
    let args = |p: &Path| {
        fcvt(&["test", "--data", p.to_str().unwrap(), "--response", "y", "--format", "json"]).stdout
    };
    assert_eq!(args(&fixture("model1_n120_p2.csv")), args(&crlf));
}

#[test]
fn duplicated_column_exits_3_naming_both() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("y,a,b,a_copy\n");
    for i in 0..30 {
        let a = (i as f64 * 0.37).sin();
        let b = (i as f64 * 1.3).cos();
        csv.push_str(&format!("{},{a},{b},{a}\n", a + 0.5 * b + (i as f64).sqrt()));
    }
    let path = write_temp(&dir, "dup.csv", &csv);
    let out = fcvt(&["test", "--data", path.to_str().unwrap(), "--response", "y"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("RankDeficient") && err.contains("a_copy") && err.contains(" a"), "{err}");
}

#[test]
fn input_problems_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = write_temp(&dir, "missing.csv", "y,x\n1,2\n2,\n3,4\n4,1\n");
    let out = fcvt(&["test", "--data", missing.to_str().unwrap(), "--response", "y"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing"));

    let out = fcvt(&["test", "--data", "/nonexistent/file.csv", "--response", "y"]);
    assert_eq!(out.status.code(), Some(2));

    let ok = fixture("model1_n120_p2.csv");
    let out = fcvt(&["test", "--data", ok.to_str().unwrap(), "--response", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    let out = fcvt(&["test", "--data", ok.to_str().unwrap(), "--response", "y", "--moments", "0.5", "1", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = fcvt(&["test", "--data", ok.to_str().unwrap(), "--response", "y", "--alpha", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(fcvt(&["test"]).status.code(), Some(2));
    assert_eq!(fcvt(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn oversized_dataset_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("y,x\n");
    for i in 0..4097 {
        csv.push_str(&format!("{},{}\n", i % 7, (i as f64).sin()));
    }
    let path = write_temp(&dir, "big.csv", &csv);
    let out = fcvt(&["test", "--data", path.to_str().unwrap(), "--response", "y"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("TooLarge"));
}

#[test]
fn exact_fit_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("y,x\n");
    for i in 0..20 {
        csv.push_str(&format!("{},{i}\n", 2.0 * i as f64 + 1.0));
    }
    let path = write_temp(&dir, "fit.csv", &csv);
    let out = fcvt(&["test", "--data", path.to_str().unwrap(), "--response", "y"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("DegenerateResiduals"));
}

#[test]
fn custom_profile_and_two_sided_flags() {
    let csv = fixture("null_n512_p4.csv");
    let csv = csv.to_str().unwrap();
    let upper = stdout_json(&fcvt(&["test", "--data", csv, "--response", "y", "--moments", "1", "1", "1", "--format", "json"]));
    assert_eq!(upper["profile"]["M4"], 1.0);
    let two = stdout_json(&fcvt(&[
        "test", "--data", csv, "--response", "y", "--moments", "1", "1", "1", "--two-sided", "--format", "json",
    ]));
    let z = upper["z"].as_f64().unwrap();
    let (pu, pt) = (upper["p_value"].as_f64().unwrap(), two["p_value"].as_f64().unwrap());
    assert!(z > 0.0);
    assert!((pt - 2.0 * pu).abs() <= 1e-15);
}

#[test]
fn simulate_is_deterministic_and_schema_valid() {
    let args = ["simulate", "--n", "80", "--p", "6", "--model", "model2", "--reps", "150", "--seed", "5"];
    let a = fcvt(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_fcvt"))
        .args(args)
        .env("FCVT_THREADS", "3")
        .output()
        .unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let doc = stdout_json(&a);
    assert_valid(&schema("simulation_result.schema.json"), &doc);
    assert_eq!(doc["reps_used"], 150);
}

#[test]
fn simulate_errors() {
    assert_eq!(fcvt(&["simulate", "--n", "50", "--p", "3", "--model", "model2"]).status.code(), Some(3));
    assert_eq!(fcvt(&["simulate", "--n", "50", "--p", "3", "--reps", "10"]).status.code(), Some(2));
    assert_eq!(fcvt(&["simulate", "--n", "5", "--p", "5"]).status.code(), Some(2));
    assert_eq!(fcvt(&["simulate", "--n", "50", "--p", "3", "--error", "cauchy"]).status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_fcvt"))
        .args(["simulate", "--n", "50", "--p", "3"])
        .env("FCVT_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_subcommand() {
    let validator = schema("validation_report.schema.json");
    for sigma in ["const", "half2"] {
        let out = fcvt(&["validate", "--n", "8", "--p", "2", "--sigma", sigma, "--format", "json"]);
        let doc = stdout_json(&out);
        assert_valid(&validator, &doc);
        assert_eq!(doc["passed"], true);
        let exact: Vec<&Value> = doc["rows"].as_array().unwrap().iter().filter(|r| !r["pass"].is_null()).collect();
        assert_eq!(exact.len(), 3);
    }
    let text = fcvt(&["validate", "--n", "10", "--p", "3", "--seed", "4"]);
    assert!(text.status.success());
    assert!(String::from_utf8(text.stdout).unwrap().contains("VarT1"));
    let big = fcvt(&["validate", "--n", "30", "--p", "2"]);
    assert_eq!(big.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&big.stderr).contains("TooLarge"));
    assert_eq!(fcvt(&["validate", "--n", "8", "--p", "2", "--sigma", "wavy"]).status.code(), Some(2));
}
