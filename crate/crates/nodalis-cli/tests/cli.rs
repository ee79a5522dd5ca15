use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nodalis"))
        .args(args)
        .env_remove("NODALIS_MAX_N")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = run(&full);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn names(v: &Value) -> Vec<String> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|g| g.to_string())
        .collect()
}

#[test]
fn graph_listing() {
    assert_eq!(
        json(&["graphs", "--n", "3"])["graphs"]
            .as_array()
            .unwrap()
            .len(),
        7
    );
    let one = json(&["graphs", "--n", "1"]);
    assert_eq!(one["count"], 1);
    assert_eq!(one["graphs"][0]["adm2"], true);
    assert_eq!(one["graphs"][0]["classes"], serde_json::json!([[1]]));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["graphs", "--n", "99"]).status.code(), Some(2));
    assert_eq!(run(&["graphs", "--n", "0"]).status.code(), Some(2));
    assert_eq!(run(&["count", "--delta", "0"]).status.code(), Some(2));
    assert_eq!(
        run(&["order", "--n", "2", "--mult", "3,1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["tau", "--mult", "2,2", "--edges", "1-2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["tau", "--mult", "2,2", "--edges", "2-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["count", "--delta", "1", "--eval", "L2=1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn env_var_tightens_bounds() {
    let out = Command::new(env!("CARGO_BIN_EXE_nodalis"))
        .args(["graphs", "--n", "3"])
        .env("NODALIS_MAX_N", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn one_node() {
    let v = json(&["count", "--delta", "1"]);
    assert_eq!(
        v["terms"],
        serde_json::json!({"(1,0,0,0)": "3", "(0,1,0,0)": "2", "(0,0,0,1)": "1"})
    );
    assert_eq!(v["parametric"], false);
    assert_eq!(v["provenance"].as_array().unwrap().len(), 1);
    let v = json(&["count", "--delta", "1", "--eval", "L2=4,LK=-6,K2=9,c2=3"]);
    assert_eq!(v["value"], "3");
}

#[test]
fn two_nodes_on_plane_quartics() {
    let v = json(&["count", "--delta", "2", "--eval", "L2=16,LK=-12,K2=9,c2=3"]);
    assert_eq!(v["value"], "225");
    assert_eq!(v["ordered"]["terms"]["(2,0,0,0)"], "9");
}

#[test]
fn order_examples() {
    let v = json(&["order", "--n", "3", "--mult", "2,2,2"]);
    assert_eq!(names(&v["models"]).len(), 2);
    assert_eq!(v["models"][0]["edges"], serde_json::json!([[1, 2], [1, 3]]));
    assert_eq!(v["models"][1]["edges"], serde_json::json!([]));
    let v = json(&["order", "--n", "2", "--mult", "2,2"]);
    assert_eq!(v["delta"].as_array().unwrap().len(), 1);
    let v = json(&["order", "--n", "2", "--mult", "1,2"]);
    assert_eq!(v["models"][0]["edges"], serde_json::json!([[1, 2]]));
    assert_eq!(v["models"][1]["edges"], serde_json::json!([]));
}

#[test]
fn tau_and_invariant() {
    let v = json(&["tau", "--mult", "2,2,2,2", "--edges", "1-2,1-3,1-4"]);
    assert_eq!(v["zero_flag"], false);
    assert_eq!(v["rank"], 0);
    assert_eq!(v["total_chern"], "1");
    let v = json(&["tau", "--mult", "2,2,2", "--edges", "1-2,1-3"]);
    assert_eq!(v["zero_flag"], true);
    let v = json(&["invariant", "--mult", "1,4", "--edges", "1-2"]);
    assert_eq!(v["mixed"]["parametric"], true);
    assert_eq!(v["mixed"]["parameters"], serde_json::json!(["q1"]));
    let v = json(&["invariant", "--n", "2"]);
    assert_eq!(v["mixed"]["parametric"], false);
}

#[test]
fn output_is_deterministic() {
    let a = run(&["--json", "order", "--n", "4"]);
    let b = run(&["--json", "order", "--n", "4"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn quick_verification_passes() {
    let v = json(&["verify", "--level", "quick"]);
    assert_eq!(v["passed"], true);
    assert!(v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["verdict"] == "pass"));
}
