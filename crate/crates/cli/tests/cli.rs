use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ramseyforge"));
    c.env_remove("RAMSEYFORGE_BUDGET");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn dir(name: &str) -> PathBuf {
    let d = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn construct_er(d: &std::path::Path, q: &str) -> String {
    let path = d.join(format!("er{q}.txt"));
    let o = run(&["construct", "er", "--q", q, "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    path.to_str().unwrap().to_string()
}

#[test]
fn check_c4_on_er7() {
    let d = dir("check");
    let er7 = construct_er(&d, "7");
    let o = run(&["check", "--pattern", "c4", "--in", &er7]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["free"], true);
    let o = run(&["check", "--pattern", "triangle", "--in", &er7]);
    assert_eq!(o.status.code(), Some(1));
    let w = json(&o)["witness"].as_array().unwrap().len();
    assert_eq!(w, 3);
}

#[test]
fn undecided_exit_code_and_env_budget() {
    let d = dir("undecided");
    let er13 = construct_er(&d, "13");
    let o = run(&["check", "--pattern", "k4", "--in", &er13, "--budget", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(json(&o)["free"], Value::Null);
    let o = bin().args(["check", "--pattern", "k4", "--in", &er13]).env("RAMSEYFORGE_BUDGET", "1").output().unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["construct", "bip", "--q", "4", "--s", "2"]).status.code(), Some(2));
    assert_eq!(run(&["construct", "er", "--q", "6"]).status.code(), Some(2));
    assert_eq!(run(&["check", "--pattern", "c4", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["check", "--pattern", "k2x", "--in", "x"]).status.code(), Some(2));
    assert_eq!(run(&["check", "--pattern", "c4", "--in", "/nonexistent/graph.txt"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn construct_formats() {
    let o = run(&["construct", "er", "--q", "2"]);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    let header: Value = serde_json::from_str(lines.next().unwrap().strip_prefix("# ").unwrap()).unwrap();
    assert_eq!(header["family"], "er");
    assert_eq!(header["n"], 7);
    assert_eq!(header["degreeProfile"]["2"], 3);
    let body: Vec<&str> = lines.collect();
    assert_eq!(body.len(), 9);
    let mut sorted = body.clone();
    sorted.sort_by_key(|l| l.split(' ').map(|x| x.parse::<usize>().unwrap()).collect::<Vec<_>>());
    assert_eq!(sorted, body);

    let o = run(&["construct", "unital-hypergraph", "--q", "2"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 9);
    assert!(text.lines().skip(1).all(|l| l.split(' ').count() == 4));

    let o = run(&["construct", "bip", "--q", "5", "--s", "2", "--adjacency", "symmetrized"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout).unwrap().contains("\"adjacency\":\"orthogonal\""));
}

#[test]
fn spectrum_and_containers() {
    let d = dir("spectrum");
    let er5 = construct_er(&d, "5");
    let o = run(&["spectrum", "--in", &er5, "--with-loops"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!((v["lambda"].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-9);
    assert_eq!(v["regular"], true);
    assert!(v["alonBoppana"]["10"].as_bool().unwrap());
    let o = run(&["spectrum", "--in", &er5]);
    assert_eq!(json(&o)["regular"], false);

    let o = run(&["containers", "bound", "--n", "12", "--m", "6", "--s", "2", "--t", "4"]);
    assert_eq!(json(&o)["bound"], "990");
    let o = run(&["containers", "check", "--in", &er5, "--alpha", "0", "--m", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["containers", "ndl", "--n", "31", "--d", "6", "--lambda", "2.2", "--t", "10"]);
    assert_eq!(json(&o)["preconditionMet"], false);
}

#[test]
fn certify_verify_round_trip() {
    let d = dir("certify");
    let cert = d.join("c.json");
    let o = run(&["certify", "--family", "er", "--q", "5", "--pattern", "c4", "--p", "0.8", "--seed", "3", "--out", cert.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{}.manifest.json", cert.display())).unwrap()).unwrap();
    assert_eq!(manifest["seedChain"][0], 3);
    assert_eq!(manifest["exitCode"], 0);
    let o = run(&["verify", "--cert", cert.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["status"], "VALID");
    let digest = &v["problems"];
    assert_eq!(digest.as_array().unwrap().len(), 0);

    let mut c: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    c["seed"] = 4.into();
    std::fs::write(&cert, c.to_string()).unwrap();
    assert_ne!(run(&["verify", "--cert", cert.to_str().unwrap()]).status.code(), Some(0));
}

#[test]
fn transfer_lines() {
    let d = dir("transfer");
    let h = d.join("u2.txt");
    run(&["construct", "unital-hypergraph", "--q", "2", "--out", h.to_str().unwrap()]);
    let o = run(&["transfer", "--in", h.to_str().unwrap(), "--pattern", "k4", "--trials", "5", "--seed", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 6);
    for (i, l) in lines[..5].iter().enumerate() {
        assert_eq!(l["trial"], i);
        assert_eq!(l["patternFree"], true);
        for key in ["seed", "edgesKept", "alphaPrime", "mPrime", "pseudorandomSampled"] {
            assert!(l.get(key).is_some(), "{key}");
        }
    }
    assert_eq!(lines[5]["summary"]["patternFailures"], 0);
}

#[test]
fn fields_list() {
    let o = run(&["fields", "list"]);
    let v = json(&o);
    let gf9 = v.as_array().unwrap().iter().find(|f| f["order"] == 9).unwrap();
    assert_eq!(gf9["characteristic"], 3);
    assert_eq!(gf9["degree"], 2);
}
