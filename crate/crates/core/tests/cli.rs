use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_hardy-certify");

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

fn unit_config(mode: &str, p: f64, band: &str) -> String {
    format!(
        r#"{{
  "schema": 1,
  "mode": "{mode}",
  "interval": {{"a": 0, "b": 1}},
  "exponents": {{"p": {p}, "q": 1, "r": 1, "beta": [0.0]}},
  "weights": {{
    "u": {{"power": {{"c": 1, "alpha": 0}}}},
    "v": {{"power": {{"c": 1, "alpha": 0}}}},
    "w": {{"power": {{"c": 1, "alpha": 0}}}}
  }},
  "band": {band}
}}"#
    )
}

fn run(config: &Path, extra: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.arg("run").arg("--config").arg(config).args(["--cells", "256", "--restarts", "2"]).args(extra);
    if let Some(t) = threads {
        cmd.env("HARDY_CERT_THREADS", t);
    }
    cmd.output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn trivial_config_is_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &unit_config("main", 1.0, "[0.01, 100]"));
    let out = run(&cfg, &["--beta", "0,0.5"], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["verdict"], "CONSISTENT");
    assert_eq!(v["regime"], "i");
    assert_eq!(v["config"]["beta_list"].as_array().unwrap().len(), 2);
    let c = v["constants"][0]["value"].as_f64().unwrap();
    assert!((c - 0.5).abs() < 1e-9);
    for s in v["sandwich"].as_array().unwrap() {
        assert_eq!(s["in_band"], true);
    }
    assert!(String::from_utf8_lossy(&out.stderr).contains("CONSISTENT"));
}

#[test]
fn verdict_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &unit_config("main", 1.0, "[0.999, 1.001]"));
    let out = run(&cfg, &["--beta", "0.5"], None);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["verdict"], "INCONSISTENT");

    let cfg = write_config(dir.path(), &unit_config("main", 0.5, "[0.01, 100]"));
    let out = run(&cfg, &[], None);
    assert_eq!(out.status.code(), Some(3));
    let v = json(&out);
    assert_eq!(v["verdict"], "DEGENERATE");
    assert!(v["reasons"][0].as_str().unwrap().contains("trivial functions"));
}

#[test]
fn config_errors_exit_four() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &unit_config("main", 1.0, "[0.01, 100]"));
    let out = run(&cfg, &["--beta", "1.5"], None);
    assert_eq!(out.status.code(), Some(4));
    let v = json(&out);
    assert_eq!(v["error"]["kind"], "Range");
    assert!(v["error"]["message"].as_str().unwrap().contains("beta must be < 1"));

    let cfg = write_config(dir.path(), "{\"schema\": 1,\n \"mode\": }");
    let out = run(&cfg, &[], None);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(json(&out)["error"]["kind"], "Parse");

    let cfg = write_config(dir.path(), r#"{"schema": 1, "mode": "main", "colour": 1}"#);
    let out = run(&cfg, &[], None);
    assert_eq!(out.status.code(), Some(4));
    assert!(json(&out)["error"]["message"].as_str().unwrap().contains("colour"));

    let out = run(&cfg, &[], Some("zero"));
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn reports_are_byte_stable_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &unit_config("monotone", 2.0, "[0.01, 100]"));
    let a = run(&cfg, &[], Some("1"));
    let b = run(&cfg, &[], Some("3"));
    assert_eq!(a.status.code(), Some(0));
    assert!(a.stdout == b.stdout);

    let path = dir.path().join("r.json");
    let out = run(&cfg, &["--out", path.to_str().unwrap()], None);
    assert!(out.stdout.is_empty());
    assert_eq!(json(&a)["oracle"], serde_json::from_slice::<Value>(&std::fs::read(path).unwrap()).unwrap()["oracle"]);
}

#[test]
fn markdown_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &unit_config("main", 1.0, "[0.01, 100]"));
    let md = dir.path().join("r.md");
    let out = run(&cfg, &["--format", "markdown", "--out", md.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(md).unwrap();
    assert!(text.starts_with("# Certification report"));
    assert!(text.contains("| C1 | 5.000000000000e-01 |"));
    assert!(text.contains("## Sandwich"));
}

#[test]
fn sequence_and_lemma_modes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"schema": 1, "mode": "discrete-embedding", "exponents": {"p": 2, "q": 1},
            "sequence": {"a": [1, 2, 3], "b": [2, 1, 1]}}"#,
    );
    let out = run(&cfg, &[], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let r = v["sandwich"][0]["constant_over_oracle"].as_f64().unwrap();
    assert!((r - 1.0).abs() < 1e-6);

    let out = run(&cfg, &["--mode", "discrete-hardy"], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["regime"], "iii");

    let cfg = write_config(dir.path(), r#"{"schema": 1, "mode": "lemma-checks", "lemma_trials": 4}"#);
    let out = run(&cfg, &[], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["lemmas"].as_array().unwrap().len(), 12);
}
