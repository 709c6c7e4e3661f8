mod common;

use std::io::Write;
use std::process::{Command, Output, Stdio};

use common::*;
use monostack::infquot::TruncatedProfiniteElement;
use serde_json::{json, Value};

const PAPER: &str = r#"{"ambient_rank":3,"generators":[[1,0,0],[0,1,0],[0,0,1],[1,1,-1]]}"#;

fn run(args: &[&str], stdin: &str) -> Output {
    run_env(args, stdin, &[])
}

fn run_env(args: &[&str], stdin: &str, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_monostack"));
    cmd.args(args)
        .env_remove("MONOSTACK_FIELD")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped());
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn payload(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn monoid_info_on_the_paper_monoid() {
    let out = run(&["monoid", "info"], PAPER);
    assert_eq!(out.status.code(), Some(0));
    let v = payload(&out);
    assert_eq!(
        v["flags"],
        json!({"sharp": true, "saturated": true, "simplicial": false})
    );
    assert_eq!(v["hilbert_basis"].as_array().unwrap().len(), 4);
}

#[test]
fn input_from_a_file() {
    let path = std::env::temp_dir().join(format!("monostack-cli-{}.json", std::process::id()));
    std::fs::write(&path, PAPER).unwrap();
    let out = run(&["picard", "--level", "1", path.to_str().unwrap()], "");
    std::fs::remove_file(&path).unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(payload(&out)["invariant_factors"], json!([]));
    assert_eq!(payload(&out)["order"], json!(1));
}

#[test]
fn probe_column_grows_and_round_trips() {
    let input = format!(r#"{{"monoid":{PAPER},"pair":[["1","0","0"],["0","0","1"]]}}"#);
    let out = run(&["probe", "coherence", "--levels", "1,2,3,4", "--pretty"], &input);
    assert_eq!(out.status.code(), Some(0));
    let v = payload(&out);
    let counts: Vec<u64> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["min_gens"].as_u64().unwrap())
        .collect();
    assert!(counts.windows(2).all(|w| w[0] < w[1]), "{counts:?}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("min_gens"));
    // the emitted table is accepted as input and reproduces itself
    let again = run(
        &["probe", "coherence", "--levels", "1,2,3,4"],
        &String::from_utf8(out.stdout.clone()).unwrap(),
    );
    assert_eq!(payload(&again), v);
}

#[test]
fn outputs_are_deterministic_and_reusable() {
    let a = run(&["monoid", "saturate"], PAPER);
    let b = run(&["monoid", "saturate"], PAPER);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let c = run(&["monoid", "saturate"], &text);
    assert_eq!(String::from_utf8(c.stdout).unwrap(), text);
    let d1 = run(&["delta", "--level", "3"], PAPER);
    let d2 = run(&["delta", "--level", "3"], PAPER);
    assert_eq!(d1.stdout, d2.stdout);
}

#[test]
fn exit_code_contract() {
    assert_eq!(run(&["monoid", "info"], "[1,2").status.code(), Some(1));
    assert_eq!(run(&["no-such-command"], "").status.code(), Some(1));
    let line = r#"{"ambient_rank":1,"generators":[[1],[-1]]}"#;
    let out = run(&["monoid", "info"], line);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(payload(&out)["error"]["kind"], "NotSharp");

    // a family whose truncation at N = 12 is ambiguous
    let p = paper_monoid();
    let family = TruncatedProfiniteElement::of_element(&p, 12, &[12, 11, -11])
        .unwrap()
        .to_spec();
    let mut input = serde_json::to_value(&family).unwrap();
    input["monoid"] = serde_json::from_str(PAPER).unwrap();
    let out = run(&["infquot", "check", "--depth", "4"], &input.to_string());
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(payload(&out)["verdict"], "InconclusiveAtLevel");

    let e1 = TruncatedProfiniteElement::of_element(&p, 4, &[1, 0, 0])
        .unwrap()
        .to_spec();
    let mut input = serde_json::to_value(&e1).unwrap();
    input["monoid"] = serde_json::from_str(PAPER).unwrap();
    let out = run(&["infquot", "check"], &input.to_string());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(payload(&out)["element"], json!([1, 0, 0]));
}

#[test]
fn kummer_check() {
    let hom = r#"{"source":{"ambient_rank":2,"generators":[[1,0],[0,1]]},
                  "target":{"ambient_rank":2,"generators":[[1,0],[0,1]]},
                  "matrix":[[2,0],[0,3]]}"#;
    let v = payload(&run(&["kummer", "check"], hom));
    assert_eq!(v["kummer"], true);
    assert_eq!(v["cokernel"], json!([6]));
}

#[test]
fn field_precedence() {
    let sheaf = r#"{"monoid":{"ambient_rank":1,"generators":[[1]]},"level":2,"components":{"(0)":1}}"#;
    let plain = payload(&run(&["parabolic", "to-graded"], sheaf));
    assert_eq!(plain["field"], "Q");
    let env = payload(&run_env(
        &["parabolic", "to-graded"],
        sheaf,
        &[("MONOSTACK_FIELD", "Fp:5")],
    ));
    assert_eq!(env["field"], "Fp:5");
    let flag = payload(&run_env(
        &["--field", "Fp:7", "parabolic", "to-graded"],
        sheaf,
        &[("MONOSTACK_FIELD", "Fp:5")],
    ));
    assert_eq!(flag["field"], "Fp:7");
}

#[test]
fn parabolic_commands() {
    let sheaf = r#"{"monoid":{"ambient_rank":1,"generators":[[1]]},"level":4,"components":{"(0)":1}}"#;
    let v = payload(&run(&["parabolic", "check-induced"], sheaf));
    assert_eq!(v["minimal"], 4);
    let checked: Vec<bool> = v["checked"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["induced"].as_bool().unwrap())
        .collect();
    assert_eq!(checked, vec![false, false, true]);
    let res = run(&["parabolic", "restrict", "--level", "1"], sheaf);
    let ind = run(
        &["parabolic", "induce", "--level", "4"],
        &String::from_utf8(res.stdout).unwrap(),
    );
    assert_eq!(ind.status.code(), Some(0));
    let ind_text = String::from_utf8(ind.stdout).unwrap();
    let again = payload(&run(&["parabolic", "check-induced", "--level", "1"], &ind_text));
    assert_eq!(again["minimal"], 1);
    let hom = format!(r#"{{"source":{ind_text},"target":{sheaf}}}"#);
    assert_eq!(payload(&run(&["parabolic", "hom"], &hom))["dimension"], 1);
    assert_eq!(
        run(&["parabolic", "restrict", "--level", "3"], sheaf).status.code(),
        Some(2)
    );
}
