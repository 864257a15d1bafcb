use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lcsamp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lcsamp")).args(args).output().expect("spawn lcsamp")
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("run.json");
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

const BOX3: &str = r#"{"kind": "axis_box", "n": 3, "params": {"half_width": 1.0}}"#;

#[test]
fn same_seed_gives_identical_report_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!(r#"{{"command": "sample-uniform", "seed": 9, "final_samples": 300, "target": {BOX3}}}"#),
    );
    // the report embeds its config, so both runs write to the same path
    let out = dir.path().join("r.json");
    let outs: Vec<String> = (0..2)
        .map(|_| {
            let o = lcsamp(&["--config", &cfg, "--no-timestamp", "--out", out.to_str().unwrap()]);
            assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
            std::fs::read_to_string(&out).unwrap()
        })
        .collect();
    assert!(outs[0] == outs[1]);
    let v: Value = serde_json::from_str(&outs[0]).unwrap();
    assert_eq!(v["schema"], "lcsamp/1");
    assert_eq!(v["exit_code"], 0);
    assert!(v.get("created_unix").is_none());
    assert_eq!(v["result"]["samples"].as_array().unwrap().len(), 300);
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        &format!(r#"{{"command": "sample-uniform", "seed": 1, "final_samples": 50, "target": {BOX3}}}"#),
    );
    let out = dir.path().join("r.json");
    let o = lcsamp(&["--config", &cfg, "--seed", "77", "--final-samples", "10", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = read_json(&out);
    assert_eq!(v["config"]["seed"], 77);
    assert_eq!(v["result"]["samples"].as_array().unwrap().len(), 10);
    assert!(v["created_unix"].is_u64());
}

#[test]
fn dump_plan_makes_no_queries() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("plan.json");
    let o = lcsamp(&["--command", "dump-plan", "--seed", "3", "--target", BOX3, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = read_json(&out);
    assert_eq!(v["result"]["queries"]["membership_queries"], 0);
    assert!(v["result"]["plan"]["steps"].as_array().unwrap().len() > 1);
}

#[test]
fn csv_output_replaces_inline_samples() {
    let dir = tempfile::tempdir().unwrap();
    let (out, csv) = (dir.path().join("r.json"), dir.path().join("s.csv"));
    let o = lcsamp(&[
        "--command",
        "sample-logconcave",
        "--seed",
        "5",
        "--final-samples",
        "20",
        "--target",
        r#"{"kind": "potential_quadratic", "n": 2, "params": {}}"#,
        "--out",
        out.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("x0,x1,t\n"));
    assert_eq!(text.lines().count(), 21);
    let v = read_json(&out);
    assert!(v["result"]["samples"].as_array().unwrap().is_empty());
}

#[test]
fn usage_errors_exit_with_one() {
    let o = lcsamp(&["--command", "sample-uniform", "--seed", "1", "--eta", "1.5", "--target", BOX3]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("eta"));

    assert_eq!(lcsamp(&["--no-such-flag"]).status.code(), Some(1));
    // sampling without a target
    assert_eq!(lcsamp(&["--command", "sample-uniform", "--seed", "1"]).status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"command": "dump-plan", "seed": 1, "bogus": 2}"#);
    let o = lcsamp(&["--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));
}

#[test]
fn annealing_bounds_command_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"command": "check-annealing-bounds", "seed": 2, "bound_cases": 2}"#);
    let (out, csv) = (dir.path().join("r.json"), dir.path().join("b.csv"));
    let o = lcsamp(&["--config", &cfg, "--out", out.to_str().unwrap(), "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read_json(&out)["result"]["all_hold"], true);
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("lemma,q,alpha,parameter,quadrature,bound,holds\n"));
}
