use std::path::Path;

use fpgowers::cli::run_with;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["fpgowers"];
    full.extend_from_slice(args);
    let code = run_with(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn records(path: &Path) -> Vec<Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn levelset_count_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    let o = out.to_str().unwrap();
    assert_eq!(run(&["levelset", "sum:5:2:2", "--v", "0", "--out", o]).0, 0);
    assert_eq!(run(&["levelset", "sum:5:2:2", "--out", o]).0, 0);
    let recs = records(&out);
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[0]["data"]["level_set_size"], 9);
    let sizes: Vec<u64> = serde_json::from_value(recs[1]["data"]["level_set_sizes"].clone()).unwrap();
    assert_eq!(sizes.iter().sum::<u64>(), 25);
    assert_eq!(recs[1]["passed"], true);
    assert_eq!(recs[0]["fingerprint"], recs[1]["fingerprint"]);
    assert_eq!(recs[0]["fingerprint"].as_str().unwrap().len(), 64);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["levelset", "sum:5:2:2", "--v", "0,1"]).0, 2);
    assert_eq!(run(&["gowers", "--map", "sum:5:2:2", "--strategy", "fourier", "--l", "3"]).0, 2);
    assert_eq!(run(&["verify", "no-such-suite"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["levelset", "/nonexistent/map.json"]).0, 2);
    assert_eq!(run(&["levelset", "sum:6:2:2"]).0, 2);
    assert_eq!(run(&["--workers", "0", "verify", "all"]).0, 2);
}

#[test]
fn budget_is_explicit_and_sampling_opt_in() {
    let (code, _, err) = run(&["levelset", "sum:5:3:3", "--v", "0", "--budget", "1000"]);
    assert_eq!(code, 2);
    assert!(err.contains("budget"));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    let args = ["levelset", "sum:5:3:3", "--v", "0", "--budget", "1000", "--sample", "4000", "--seed", "3"];
    let mut with_out = args.to_vec();
    with_out.extend(["--out", out.to_str().unwrap()]);
    assert_eq!(run(&with_out).0, 0);
    assert_eq!(run(&with_out).0, 0);
    let recs = records(&out);
    assert_eq!(recs[0]["data"]["wstar"]["samples"], 4000);
    assert_eq!(recs[0]["data"], recs[1]["data"]);
}

#[test]
fn gowers_function_and_phase_modes() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("one.txt");
    std::fs::write(&f, format!("5 2\n{}", "1\n".repeat(25))).unwrap();
    let out = dir.path().join("r.jsonl");
    let o = out.to_str().unwrap();
    assert_eq!(run(&["gowers", "--function", f.to_str().unwrap(), "--l", "3", "--out", o]).0, 0);
    assert_eq!(run(&["gowers", "--map", "sum:7:2:3", "--alpha", "2", "--out", o]).0, 0);
    assert_eq!(run(&["gowers", "--map", "sum:5:2:2", "--strategy", "definitional", "--out", o]).0, 0);
    let recs = records(&out);
    assert!((recs[0]["data"]["norm"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    for r in &recs[1..] {
        assert_eq!(r["results"][0]["check"], "phase-norm-identity");
        assert_eq!(r["results"][0]["verdict"], "pass");
    }
}

#[test]
fn verify_suites_and_negative_control() {
    let (code, out, _) = run(&["verify", "lemma2-equality"]);
    assert_eq!(code, 0);
    assert!(out.contains("[PASS] phase-norm-identity"));
    let (code, out, _) = run(&["verify", "negative-control"]);
    assert_eq!(code, 1);
    assert!(out.contains("FAILED checks:") && out.contains("diff"));
}

#[test]
fn counterexample_reports_gap_property() {
    let (code, out, _) = run(&["counterexample", "--p", "5", "--n", "3", "--d", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("all 3-AP gaps satisfy P(y)=0: true"));
}

#[test]
fn subspace_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    assert_eq!(run(&["subspace", "sum:5:4:2", "--out", out.to_str().unwrap()]).0, 0);
    assert_eq!(run(&["subspace", "sum:5:4:2", "--random", "--seed", "9", "--out", out.to_str().unwrap()]).0, 0);
    let recs = records(&out);
    assert!(recs.iter().all(|r| r["data"]["dim"] == 2));
}

#[test]
fn apcount_sets_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.jsonl");
    let o = out.to_str().unwrap();
    for _ in 0..2 {
        assert_eq!(run(&["apcount", "sum:5:2:2", "--set", "random:0.3:7", "--out", o]).0, 0);
    }
    let idx = dir.path().join("a.txt");
    std::fs::write(&idx, "0\n1 2 # comment\n3 4\n").unwrap();
    assert_eq!(run(&["apcount", "sum:5:2:2", "--set", idx.to_str().unwrap(), "--out", o]).0, 0);
    assert_eq!(run(&["apcount", "sum:5:2:2", "--set", "levelset:0", "--l", "3", "--out", o]).0, 0);
    let recs = records(&out);
    assert_eq!(recs[0]["data"], recs[1]["data"]);
    assert_eq!(recs[0]["fingerprint"], recs[1]["fingerprint"]);
    assert_eq!(recs[2]["data"]["set_size"], 5);

    // x^2 = 2 has no solution mod 5.
    let map = dir.path().join("square.json");
    std::fs::write(&map, r#"{"p":5,"n":1,"d":2,"R":1,"terms":[{"row":0,"exponents":[2],"coeff":1}]}"#).unwrap();
    let (code, _, err) = run(&["apcount", map.to_str().unwrap(), "--set", "random:0.5:1", "--v", "2", "--out", o]);
    assert_eq!(code, 1);
    assert!(err.contains("empty"));
    let last = records(&out).pop().unwrap();
    assert_eq!(last["passed"], false);
    assert_eq!(last["error"], "set is empty");
}
