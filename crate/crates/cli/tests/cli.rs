use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn latmax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latmax")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &TempDir, name: &str, v: &Value) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn fig3(dir: &TempDir) -> PathBuf {
    write(dir, "fig3.json", &json!({"function": {"family": "fig3", "params": {"epsilon": 0.1}}}))
}

#[test]
fn solve_fig3_in_three_orders() {
    let dir = TempDir::new().unwrap();
    let f = fig3(&dir);
    let out = latmax(&["solve", "--algo", "dg13", "--instance", s(&f), "--exact"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["run"]["solution"], json!([2, 0, 2]));
    assert_eq!(v["run"]["value"], json!(1.1));
    assert_eq!(v["exact"], json!(3.0));
    assert_eq!(v["verdict"]["pass"], json!(true));

    let v = stdout_json(&latmax(&["solve", "--algo", "dg13", "--instance", s(&f), "--order", "0,2,1"]));
    assert_eq!(v["run"]["solution"], json!([2, 1, 0]));
    assert_eq!(v["run"]["value"], json!(2.0));

    let v = stdout_json(&latmax(&["solve", "--algo", "dg13", "--instance", s(&f), "--order", "greedy"]));
    assert_eq!(v["run"]["value"], json!(1.1));
}

#[test]
fn exact_reports_optimum_and_honours_constraint_override() {
    let dir = TempDir::new().unwrap();
    let f = fig3(&dir);
    let v = stdout_json(&latmax(&["exact", "--instance", s(&f)]));
    assert_eq!(v["value"], json!(3.0));
    let out = latmax(&["exact", "--instance", s(&f), "--constraint", r#"{"type":"cardinality","k":0}"#]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["value"], json!(0.0));
}

#[test]
fn check_exit_codes_follow_the_property() {
    let dir = TempDir::new().unwrap();
    let f = fig3(&dir);
    for mode in [&[][..], &["--exhaustive"][..], &["--exact-arith"][..]] {
        let mut args = vec!["check", "--instance", s(&f), "--property", "submodular"];
        args.extend_from_slice(mode);
        let out = latmax(&args);
        assert_eq!(out.status.code(), Some(0), "{mode:?}");
        assert_eq!(stdout_json(&out)["holds"], json!(true));
    }

    let square = write(
        &dir,
        "square.json",
        &json!({"domain": {"type": "int_lattice", "n": 2, "C": 1},
                "function": {"family": "table", "params": {"values": [0.0, 0.0, 0.0, 1.0]}}}),
    );
    let out = latmax(&["check", "--instance", s(&square), "--property", "submodular"]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["holds"], json!(false));
    assert!(!v["witness"].is_null());
}

#[test]
fn poset_matroid_check_finds_exchange_failure() {
    let dir = TempDir::new().unwrap();
    // ideals of 0<2, 1<3 avoiding both parallel pairs {0,1} and {2,3}
    let inst = write(
        &dir,
        "graphic.json",
        &json!({
            "domain": {"type": "dl", "poset": {"elements": 4, "covers": [[0, 2], [1, 3]]}},
            "function": {"family": "cardinality"},
            "constraint": {"type": "matroid", "kind": "family",
                           "independent": [[], [0], [1], [0, 2], [1, 3]]}
        }),
    );
    let out = latmax(&["check", "--instance", s(&inst), "--property", "poset-matroid"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["holds"], json!(false));
}

#[test]
fn replay_accepts_recorded_trace_and_pinpoints_corruption() {
    let dir = TempDir::new().unwrap();
    let f = fig3(&dir);
    let trace = dir.path().join("trace.json");
    let out = latmax(&["solve", "--algo", "dg13", "--instance", s(&f), "--exact", "--trace", s(&trace)]);
    assert_eq!(out.status.code(), Some(0));
    let out = latmax(&["replay", "--trace", s(&trace)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["ok"], json!(true));

    let mut t: Value = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    t["steps"][2]["f_a"] = json!(0.5);
    let bad = write(&dir, "bad.json", &t);
    let out = latmax(&["replay", "--trace", s(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    let hit = v["violations"]
        .as_array()
        .unwrap()
        .iter()
        .any(|x| x["invariant"] == json!("a-monotone") && x["step"] == json!(3));
    assert!(hit, "{v}");
}

#[test]
fn experiment_outputs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let mut files = Vec::new();
    for run in 0..2 {
        let csv = dir.path().join(format!("rows{run}.csv"));
        let js = dir.path().join(format!("agg{run}.json"));
        let out = latmax(&["experiment", "--preset", "dl-dg", "--trials", "50", "--csv", s(&csv), "--json", s(&js)]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        files.push((std::fs::read(&csv).unwrap(), std::fs::read(&js).unwrap(), out.stdout));
    }
    assert_eq!(files[0], files[1]);
    let csv = String::from_utf8(files[0].0.clone()).unwrap();
    assert_eq!(csv.lines().count(), 1 + 30 * 50);
    assert!(csv.starts_with("instance,label,trial,seed,achieved,exact,ratio"));
}

#[test]
fn failing_verdict_gives_exit_one() {
    let dir = TempDir::new().unwrap();
    let out = latmax(&["experiment", "--preset", "tight-fixed", "--print-config"]);
    let mut cfg = stdout_json(&out);
    cfg["guarantees"] = json!([{"kind": "min_ratio", "bound": 0.5}]);
    let path = write(&dir, "cfg.json", &cfg);
    let out = latmax(&["experiment", "--config", s(&path)]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["passed"], json!(false));
    assert_eq!(v["verdicts"][0]["pass"], json!(false));
}

#[test]
fn dl_double_greedy_on_positive_modular_antichain_always_adds() {
    let dir = TempDir::new().unwrap();
    let weights = [1.0, 2.0, 3.0];
    let entries: Vec<Value> = (0u32..8)
        .map(|m| {
            let set: Vec<usize> = (0..3).filter(|i| m >> i & 1 == 1).collect();
            let v: f64 = set.iter().map(|&i| weights[i]).sum();
            json!([set, v])
        })
        .collect();
    let inst = write(
        &dir,
        "modular.json",
        &json!({"domain": {"type": "dl", "poset": {"elements": 3}},
                "function": {"family": "table", "params": {"entries": entries}}}),
    );
    let trace = dir.path().join("trace.json");
    let out = latmax(&["solve", "--algo", "dl-dg", "--instance", s(&inst), "--seed", "9", "--trace", s(&trace)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["run"]["value"], json!(6.0));
    let t: Value = serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    let steps = t["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 3);
    assert!(steps.iter().all(|s| s["took_a"] == json!(true) && s["prob_a"] == json!(1.0)));
}

#[test]
fn reduce_writes_a_solvable_instance() {
    let dir = TempDir::new().unwrap();
    let h = write(&dir, "h.json", &json!({"vertices": 4, "edges": [[0, 1], [1, 2, 3], [0, 3]]}));
    let out_path = dir.path().join("reduced.json");
    let out = latmax(&["reduce", "--hypergraph", s(&h), "--k", "2", "--out", s(&out_path)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["elements"], json!(4 + 3 * 2));
    let v = stdout_json(&latmax(&["exact", "--instance", s(&out_path)]));
    // the best pair of vertices spans one edge, so the optimum is k (1 + 1)
    assert_eq!(v["value"], json!(4.0));
}

#[test]
fn errors_exit_two_and_enum_limit_is_enforced() {
    let out = latmax(&["exact", "--instance", "/nonexistent/instance.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    let dir = TempDir::new().unwrap();
    let f = fig3(&dir);
    let out = Command::new(env!("CARGO_BIN_EXE_latmax"))
        .args(["exact", "--instance", s(&f)])
        .env("LATMAX_ENUM_LIMIT", "5")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn preset_list_matches_library() {
    let out = latmax(&["experiment", "--list"]);
    let names: Vec<String> = String::from_utf8(out.stdout).unwrap().lines().map(String::from).collect();
    assert_eq!(names, latmax_cli::presets::PRESETS);
}
