use std::process::{Command, Output};

use serde_json::Value;

fn kmatch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kmatch"))
        .args(args)
        .env_remove("KMATCH_BUDGET")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

#[test]
fn verify_wheel_m2_five() {
    let out = kmatch(&["verify", "--family", "wheel-M2", "--n", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["match"], true);
    assert_eq!(r["computed"]["betti"]["3"], 2);
}

#[test]
fn verify_clawed_path_zero() {
    let out = kmatch(&["verify", "--family", "clawed-path", "--n", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["computed"]["betti"]["1"], 1);
}

#[test]
fn edgeless_graph_is_void() {
    let out = kmatch(&["homology", "--graph", ":edgeless:3", "--k", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["kind"], "void complex");
    assert_eq!(r["profile"]["betti"]["-1"], 1);
}

#[test]
fn budget_exceeded_exits_two() {
    let out = kmatch(&["homology", "--graph", "wheel:9", "--budget", "50"]);
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_kmatch"))
        .args(["sequence", "--graph", "wheel:9"])
        .env("KMATCH_BUDGET", "50")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_family_is_a_mismatch() {
    let out = kmatch(&["predict", "--family", "wheel-M2", "--n", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&out)["predicted"]["kind"], "unknown");
}

#[test]
fn reports_are_byte_stable() {
    let a = kmatch(&["sites", "--figure", "progression", "--seed", "7"]);
    let b = kmatch(&["sites", "--figure", "progression", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    let r = report(&a);
    assert_eq!(r["seed"], 7);
    assert_eq!(r["algorithm"]["step_sites"], serde_json::json!([3, 5, 6]));
}

#[test]
fn mta_wheel_cancellation() {
    let out = kmatch(&["mta", "--policy", "wheel:5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["cancellation"]["after"], "c1=3");
    assert_eq!(r["cancellation"]["perfect"], true);
}

#[test]
fn morse_wheel_strata() {
    let r = report(&kmatch(&["morse", "--wheel-m2", "4"]));
    assert_eq!(r["vector_text"], "c2=3");
    assert_eq!(r["acyclic"], true);
}

#[test]
fn caterpillar_tables_flag_sign() {
    let r = report(&kmatch(&["caterpillar-tables", "--m", "3", "--depth", "3"]));
    assert_eq!(r["B"], serde_json::json!(["1", "5", "13"]));
    assert_eq!(r["closed_forms"]["a_minus_sign_agrees"], true);
    assert_eq!(r["closed_forms"]["a_plus_sign_agrees"], false);
}

#[test]
fn sequence_of_wheel_four() {
    let r = report(&kmatch(&["sequence", "--graph", "wheel:4"]));
    let seq = r["sequence"].as_array().unwrap();
    assert_eq!(seq.len(), 3);
    assert_eq!(seq[1]["profile"]["betti"]["2"], 3);
    assert_eq!(r["match"], true);
}

#[test]
fn graph_json_input() {
    let dir = std::env::temp_dir().join(format!("kmatch-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("square.json");
    std::fs::write(
        &path,
        r#"{"vertices":["a","b","c","d"],"edges":[["a","b"],["b","c"],["c","d"],["d","a"]]}"#,
    )
    .unwrap();
    let r = report(&kmatch(&["homology", "--graph", path.to_str().unwrap(), "--k", "1"]));
    assert_eq!(r["profile"]["betti"]["0"], 1);
    let out_path = dir.join("report.json");
    let out = kmatch(&["build", "--graph", path.to_str().unwrap(), "--output", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    // every edge subset of a 4-cycle is a 2-matching
    assert_eq!(written["summary"]["faces"], 16);
    std::fs::remove_dir_all(&dir).unwrap();
}
