use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

const PHI0: &str = "OR[i in {EX x0 . ((&)) & (AND[i in {ALL x1 . ~x0 != x1 | ~Le(x1,x0)}])}]";

fn posinf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_posinf")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn neg_twice_is_byte_identical() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.pf", &format!("{PHI0}\n"));
    let g = dir.path().join("g.pf");
    let h = dir.path().join("h.pf");
    assert!(posinf(&["neg", "--formula", s(&f), "--out", s(&g)]).status.success());
    assert!(posinf(&["neg", "--formula", s(&g), "--out", s(&h)]).status.success());
    assert_eq!(std::fs::read(&f).unwrap(), std::fs::read(&h).unwrap());
    assert_ne!(std::fs::read(&f).unwrap(), std::fs::read(&g).unwrap());
}

#[test]
fn parse_and_classify() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "f.pf", PHI0);
    let o = posinf(&["classify", "--formula", s(&f)]);
    assert_eq!(stdout(&o), "Sigma 2\n");
    let n = write(&dir, "n.nf", "D(3) & TRUE");
    let o = posinf(&["parse", "--formula", s(&n)]);
    assert!(o.status.success());
    assert_eq!(posinf(&["classify", "--formula", s(&n)]).status.code(), Some(0));
}

#[test]
fn eval_truth_table() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "phi0.pf", PHI0);
    assert_eq!(stdout(&posinf(&["eval", "--structure", "omega", "--formula", s(&f)])), "true\n");
    assert_eq!(stdout(&posinf(&["eval", "--structure", "omega_star", "--formula", s(&f)])), "false\n");
    assert_eq!(stdout(&posinf(&["eval", "--structure", "tilde(omega)", "--formula", s(&f)])), "false\n");
    let o = posinf(&["eval", "--structure", "omega", "--formula", s(&f), "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["value"], "true");
    assert_eq!(v["witness"]["assignment"]["0"], 0);
}

#[test]
fn eval_table_and_budget() {
    let dir = TempDir::new().unwrap();
    let st = write(
        &dir,
        "two.struct",
        r#"{"vocabulary": {"symbols": [{"name": "=", "arity": 2}, {"name": "!=", "arity": 2}, {"name": "Le", "arity": 2}]},
            "universe": {"finite": 2},
            "table": {"Le": [[0,0],[1,1],[1,0]]}}"#,
    );
    let f = write(&dir, "phi0.pf", PHI0);
    let o = posinf(&["eval", "--structure", s(&st), "--formula", s(&f), "--json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["value"], "true");
    assert_eq!(v["witness"]["assignment"]["0"], 1);
    let g = write(&dir, "e.pf", "OR[i in {EX x0 x1 . Le(x0,x1) & x0 != x1}]");
    let o = posinf(&["eval", "--structure", "omega", "--formula", s(&g), "--budget", "10000"]);
    assert_eq!(stdout(&o), "true\n");
}

#[test]
fn exit_codes() {
    let o = posinf(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    let o = posinf(&["eval", "--structure", "omega"]);
    assert_eq!(o.status.code(), Some(2));
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.pf", "OR[i in {EX x0 . ");
    let o = posinf(&["classify", "--formula", s(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("parse error"));
    let f = write(&dir, "f.pf", PHI0);
    let o = posinf(&["eval", "--structure", "nowhere(3)", "--formula", s(&f)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn forcing_commands() {
    let dir = TempDir::new().unwrap();
    // D(5) is Le(x1,x0) in the order numbering
    let f = write(&dir, "f.nf", "D(5)");
    let o = posinf(&["force-check", "--structure", "fin(2)", "--condition", "1,0", "--formula", s(&f)]);
    assert_eq!(stdout(&o), "true\n");
    let o = posinf(&["force-check", "--structure", "fin(2)", "--condition", "0,1", "--formula", s(&f)]);
    assert_eq!(stdout(&o), "false\n");
    let trace = dir.path().join("g.json");
    let o = posinf(&[
        "force-check",
        "--structure",
        "fin(3)",
        "--formula",
        s(&f),
        "--generic-trace",
        s(&trace),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(v["generic"]["decisions"].as_array().unwrap().len(), 1);
    let o = posinf(&["force-transform", "--formula", s(&f), "--m", "2"]);
    assert_eq!(stdout(&o), "OR[i in {x0 != x1 & x1 != x0 & Le(x1,x0)}]\n");
}

#[test]
fn operator_commands() {
    let dir = TempDir::new().unwrap();
    let op = write(&dir, "g.op", r#"{"pairs": [[[1, 3], 7], [[2], 8]]}"#);
    let o = posinf(&["op-apply", "--op", s(&op), "--set", "1,3"]);
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 1);
    assert_eq!(lines[0]["atom"], 7);
    let tilde = write(&dir, "t.op", r#"{"generator": "tilde"}"#);
    let o = posinf(&["op-apply", "--op", s(&tilde), "--structure", "fin(2)", "--budget", "200"]);
    assert!(!stdout(&o).is_empty());
    let f = write(&dir, "phi0.pf", PHI0);
    let o = posinf(&["pullback", "--op", s(&tilde), "--sentence", s(&f), "--json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let stages = v["stages"].as_array().unwrap();
    assert_eq!(stages.len(), 4);
    assert!(stages.iter().all(|s| s["level"] == 2 && s["tag"] == "Sigma"));
}

#[test]
fn experiment_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let o = posinf(&["experiment", "sigma2-agreement", "--n", "4", "--seed", "7", "--out", s(out)]);
        assert!(o.status.success());
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let v: serde_json::Value = serde_json::from_slice(&ta).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["tilde"]["disagreements"], 0);
    assert_eq!(v["control"]["rows"][0]["truth"], serde_json::json!([true, false]));
}

#[test]
fn selftest_single_criterion() {
    let o = posinf(&["selftest", "--only", "7"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("[PASS]  7"));
}
