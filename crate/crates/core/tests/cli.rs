use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use diffusion_auction::fixtures;
use diffusion_auction::harness::save_instance;
use serde_json::Value;

fn pda(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pda")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn chain3(dir: &Path) -> String {
    let path = dir.join("chain3.json");
    save_instance(&fixtures::chain3(), &path).unwrap();
    path.display().to_string()
}

#[test]
fn run_one_order() {
    let dir = tempfile::tempdir().unwrap();
    let file = chain3(dir.path());
    let out = pda(&["run", "--instance", &file, "--mechanism", "pda", "--order", "s,B,A"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["payments"]["A"], -10);
    assert_eq!(v["sold"], 0);
}

#[test]
fn run_exact_and_vcg() {
    let dir = tempfile::tempdir().unwrap();
    let file = chain3(dir.path());
    let v = json(&pda(&["run", "--instance", &file, "--mechanism", "pda", "--exact"]));
    assert_eq!(v["revenue"], "-19/6");
    assert_eq!(v["unsold_rate"], "2/3");
    let v = json(&pda(&["run", "--instance", &file, "--mechanism", "vcg"]));
    assert_eq!(v["payments"]["A"], -10);
    assert_eq!(v["payments"]["B"], 1);
}

#[test]
fn shapley_exact_and_sampled() {
    let dir = tempfile::tempdir().unwrap();
    let file = chain3(dir.path());
    let v = json(&pda(&["shapley", "--instance", &file]));
    assert_eq!(v["contributions"][0]["phi"], "7/2");
    assert_eq!(v["contributions"][2]["phi"], 3);
    let a = pda(&["shapley", "--instance", &file, "--samples", "500", "--seed", "4"]);
    let b = pda(&["shapley", "--instance", &file, "--samples", "500", "--seed", "4"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn audit_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let file = chain3(dir.path());
    let out = pda(&["audit", "--instance", &file, "--mechanism", "pda", "--checks", "sf,ic,ir,unsold,revenue"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["mechanism"], "pda");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));

    let out = pda(&["audit", "--instance", &file, "--mechanism", "vcg", "--checks", "sf"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["checks"][0]["pass"], false);
}

#[test]
fn experiment_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let status = pda(&[
            "experiment", "--k", "2", "--n", "5", "--count", "15", "--p", "0.3", "--lo", "1", "--hi", "100",
            "--seed", "8", "--out", out.to_str().unwrap(),
        ]);
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().next().unwrap(), "instance,seed,agent,phi,phi_exact,eu,eu_exact,ratio,k,bound,pass");
    assert_eq!(text.lines().count(), 1 + 15 * 5);
}

#[test]
fn gen_then_audit() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("g.json");
    let file = file.to_str().unwrap();
    assert!(pda(&["gen", "--n", "4", "--p", "0.5", "--k", "2", "--seed", "3", "--out", file]).status.success());
    let first = fs::read(file).unwrap();
    assert!(pda(&["gen", "--n", "4", "--p", "0.5", "--k", "2", "--seed", "3", "--out", file]).status.success());
    assert_eq!(first, fs::read(file).unwrap());
    let out = pda(&["audit", "--instance", file, "--mechanism", "pda", "--checks", "sf,ir,unsold,revenue"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn errors_exit_two_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"kind":"homogeneous","k":2,"seller_neighbors":["A"],
        "buyers":[{"id":"A","neighbors":["s"],"marginals":[3,5]}]}"#).unwrap();
    let out = pda(&["run", "--instance", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("non-increasing"));

    let file = chain3(dir.path());
    let out = pda(&["run", "--instance", &file, "--order", "s,A"]);
    assert_eq!(out.status.code(), Some(2));
}
