use std::path::PathBuf;
use std::process::Command;

use regmach::analysis::{dissimilarity, words, DEFAULT_DISSIM_CAP};
use regmach::zoo::{zoo_get, zoo_names};
use regmach::MachineSpec;
use serde_json::Value;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Out {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }
}

fn regmach(args: &[&str]) -> Out {
    let o = Command::new(env!("CARGO_BIN_EXE_regmach")).args(args).output().unwrap();
    Out {
        code: o.status.code().unwrap(),
        stdout: String::from_utf8(o.stdout).unwrap(),
        stderr: String::from_utf8(o.stderr).unwrap(),
    }
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("regmach-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn zoo_file(name: &str) -> PathBuf {
    let out = regmach(&["zoo", "get", name, "--json"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    scratch(&format!("{name}.json"), &out.stdout)
}

fn strs(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect()
}

const ANBN_VALENCE: &str = r#"{
  "alphabet": ["a", "b"],
  "states": ["p", "q"],
  "initial": "p",
  "accept": ["q"],
  "transitions": [
    {"from": "p", "read": "a", "to": "p", "effect": {"z": [1]}},
    {"from": "p", "read": null, "to": "q", "effect": {}},
    {"from": "q", "read": "b", "to": "q", "effect": {"z": [-1]}}
  ]
}"#;

const ANBNCN_GRAMMAR: &str = r#"{"nonterminals":["S","A","C"],"terminals":["a","b","c"],"start":"S","rules":[
  {"lhs":"S","rhs":"AC","valence":{}},
  {"lhs":"A","rhs":"aAb","valence":{"z":[1]}},
  {"lhs":"A","rhs":"","valence":{}},
  {"lhs":"C","rhs":"cC","valence":{"z":[-1]}},
  {"lhs":"C","rhs":"","valence":{}}]}"#;

#[test]
fn zoo_json_round_trips_through_the_parser() {
    for name in zoo_names() {
        let out = regmach(&["zoo", "get", name, "--json"]);
        assert_eq!(out.code, 0);
        let parsed = MachineSpec::from_json(&out.stdout).unwrap();
        assert_eq!(parsed, zoo_get(name).unwrap().spec, "{name}");
    }
    let listed = regmach(&["zoo", "list"]);
    let names: Vec<&str> = listed.stdout.lines().map(|l| l.split('\t').next().unwrap()).collect();
    assert_eq!(names, zoo_names());
    let shown = regmach(&["zoo", "get", "MOD_3"]);
    assert!(shown.stdout.contains("MOD_3"));
    assert_eq!(regmach(&["zoo", "get", "NOPE"]).code, 2);
}

#[test]
fn zoo_check() {
    let out = regmach(&["zoo", "check", "MOD_3", "--max-len", "9"]);
    assert_eq!(out.code, 0);
    let r = out.json();
    assert_eq!(r["agreed"], true);
    assert_eq!(r["checked"], 10);
}

#[test]
fn run_upow() {
    let f = zoo_file("UPOW");
    let m = f.to_str().unwrap();
    let yes = regmach(&["run", "--machine", m, "--input", "aaaa"]);
    assert_eq!(yes.code, 0);
    assert_eq!(yes.json()["outcome"], "ACCEPTED");
    assert!(yes.json()["witness"].is_array());
    let no = regmach(&["run", "--machine", m, "--input", "aaa"]);
    assert_eq!(no.code, 1);
    assert_eq!(no.json()["outcome"], "REJECTED");
    assert_eq!(regmach(&["run", "--zoo", "UPOW", "--input", "aaaaaaaa"]).code, 0);

    let starved = regmach(&["run", "--machine", m, "--input", "aaaa", "--max-configs", "1"]);
    assert_eq!(starved.code, 3);
    assert_eq!(starved.json()["outcome"], "BUDGET_EXHAUSTED");
    // the accepting path needs more than four steps
    assert_eq!(regmach(&["run", "--machine", m, "--input", "aaaa", "--max-steps", "4"]).code, 1);

    let branching = regmach(&["run", "--machine", m, "--input", "aa", "--deterministic"]);
    assert_eq!(branching.code, 2);
    assert!(branching.stderr.contains("deterministic"));
}

#[test]
fn run_options() {
    let det = regmach(&["run", "--zoo", "MPAL_3", "--input", "a1,a2,#,a2,a1", "--deterministic"]);
    assert_eq!(det.code, 0);
    assert_eq!(det.json()["input"], "a1,a2,#,a2,a1");

    let t = regmach(&["run", "--zoo", "EQ", "--input", "ab", "--time-bound", "n"]).json();
    assert_eq!(t["time_bound"]["result"], "HOLDS");
    let t = regmach(&["run", "--zoo", "UPOW", "--input", "aa", "--time-bound", "1n+0", "--strong"]).json();
    assert_eq!(t["time_bound"]["result"], "VIOLATED");

    assert_eq!(regmach(&["run", "--zoo", "EQ", "--input", "abc"]).code, 2);
    assert_eq!(regmach(&["run", "--zoo", "EQ", "--input", ""]).code, 0);
}

#[test]
fn run_and_compare_a_valence_machine() {
    let f = scratch("anbn_valence.json", ANBN_VALENCE);
    let m = f.to_str().unwrap();
    assert_eq!(regmach(&["run", "--machine", m, "--input", "aabb"]).code, 0);
    assert_eq!(regmach(&["run", "--machine", m, "--input", "aab"]).code, 1);
    let r = regmach(&["compare", "--machine", m, "--predicate", "ANBN", "--max-len", "8"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert_eq!(r.json()["agreed"], true);
}

#[test]
fn enumerate_upow() {
    let one = regmach(&["enumerate", "--zoo", "UPOW", "--max-len", "8"]);
    assert_eq!(one.code, 0);
    assert_eq!(strs(&one.json()["accepted"]), ["a", "aa", "aaaa", "aaaaaaaa"]);
    let two = regmach(&["enumerate", "--zoo", "UPOW", "--max-len", "8", "--jobs", "2"]);
    assert_eq!(one.stdout, two.stdout);

    let starved = regmach(&["enumerate", "--zoo", "UPOW", "--max-len", "3", "--max-configs", "1"]);
    assert_eq!(starved.code, 3);
    assert!(!starved.json()["unknown"].as_array().unwrap().is_empty());
}

#[test]
fn compare_machines_and_predicates() {
    let f = zoo_file("EQ");
    let r = regmach(&["compare", "--machine", f.to_str().unwrap(), "--predicate", "EQ", "--max-len", "8"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json()["checked"], 511);

    let r = regmach(&["compare", "--zoo", "EQ", "--other-zoo", "LEQ", "--max-len", "6"]);
    assert_eq!(r.code, 1);
    assert_eq!(r.json()["first_disagreement"], "b");

    let g = zoo_file("MOD_4");
    let r = regmach(&["compare", "--zoo", "MOD_2", "--other", g.to_str().unwrap(), "--jobs", "2"]);
    assert_eq!(r.code, 1);
    assert_eq!(r.json()["first_disagreement"], "aa");

    // alphabets differ
    assert_eq!(regmach(&["compare", "--zoo", "EQ", "--predicate", "MOD_2"]).code, 2);
    assert_eq!(regmach(&["compare", "--zoo", "EQ"]).code, 2);
}

#[test]
fn convert_counter_machines() {
    let list = regmach(&["convert", "--list"]).json();
    assert!(strs(&list).contains(&"kbca_to_bhva1".to_string()));

    let f = zoo_file("ANBN");
    let out = regmach(&["convert", "--transform", "kbca_to_bhva1", "--input", f.to_str().unwrap(), "--max-len", "6"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let rep = out.json();
    assert_eq!(rep["certificate"]["agreed"], true);
    assert_eq!(rep["certificate"]["checked"], 127);
    let spec = MachineSpec::from_json(&rep["output"].to_string()).unwrap();
    assert_eq!(spec.kind, regmach::MachineKind::Hva);
    assert_eq!(spec.dimension, 1);

    assert_eq!(regmach(&["convert", "--transform", "nope", "--input", f.to_str().unwrap()]).code, 2);
    let e = zoo_file("EQ");
    let two = regmach(&["convert", "--transform", "intersect_blind", "--input", e.to_str().unwrap()]);
    assert_eq!(two.code, 2);
    let both = ["convert", "--transform", "intersect_blind", "--input", e.to_str().unwrap(), "--with"];
    let out = regmach(&[&both[..], &[e.to_str().unwrap()]].concat());
    assert_eq!(out.code, 0, "{}", out.stderr);
}

/// Start from all ones; symbol j replaces entry j by the sum of the entries.
fn gsb_oracle(w: &[usize], k: usize) -> Vec<String> {
    let mut v = vec![1u64; k];
    for &j in w {
        v[j] = v.iter().sum();
    }
    v.iter().map(u64::to_string).collect()
}

#[test]
fn encode_and_decode() {
    let out = regmach(&["encode", "--scheme", "gsb", "--alphabet", "a,b,c", "--input", "abc"]);
    assert_eq!(out.code, 0);
    assert_eq!(strs(&out.json()["vector"]), ["3", "5", "9"]);

    let abc = ["a", "b", "c"];
    for w in words(3, 4) {
        let text: String = w.iter().map(|&i| abc[i]).collect();
        let want = gsb_oracle(&w, 3);
        let out = regmach(&["encode", "--scheme", "gsb", "--alphabet", "a,b,c", "--input", &text]);
        assert_eq!(strs(&out.json()["vector"]), want, "{text:?}");
        let back = regmach(&["decode", "--scheme", "gsb", "--alphabet", "a,b,c", "--vector", &want.join(",")]);
        assert_eq!(back.json()["word"], text.as_str());
    }

    let sb = regmach(&["encode", "--scheme", "sb2", "--input", "010"]).json();
    assert_eq!(strs(&sb["vector"]), ["3", "5"]);
    assert_eq!(regmach(&["decode", "--scheme", "sb2", "--vector", "5,2"]).json()["word"], "011");
    assert_eq!(regmach(&["decode", "--scheme", "sb2", "--vector", "2,2"]).code, 2);

    let b = regmach(&["encode", "--scheme", "base-m", "--base", "2", "--input", "110"]).json();
    assert_eq!(b["value"], "6");
    assert_eq!(strs(&b["vector"]), ["1", "6"]);
    let r = regmach(&["encode", "--scheme", "base-m", "--base", "2", "--input", "110", "--reverse"]).json();
    assert_eq!(strs(&r["vector"]), ["8", "3"]);
    let d = regmach(&["decode", "--scheme", "base-m", "--base", "2", "--vector", "8,3", "--reverse"]).json();
    assert_eq!(d["word"], "110");
    let d = regmach(&["decode", "--scheme", "base-m", "--base", "3", "--vector", "27,0", "--reverse"]).json();
    assert_eq!(d["word"], "000");
    let d = regmach(&["decode", "--scheme", "base-m", "--base", "3", "--vector", "1,7"]).json();
    assert_eq!(d["word"], "21");
    assert_eq!(regmach(&["decode", "--scheme", "base-m", "--base", "2", "--vector", "4,5", "--reverse"]).code, 2);
}

#[test]
fn growth_of_small_groups() {
    // reduced words in two generators: 1 + 4 + 12 + 36
    let f2 = regmach(&["growth", "--group", "f2", "--n", "3"]).json();
    assert_eq!(f2["sizes"], serde_json::json!([1, 5, 17, 53]));
    let z = regmach(&["growth", "--group", "z", "--n", "4"]).json();
    assert_eq!(z["sizes"], serde_json::json!([1, 3, 5, 7, 9]));
    let h = regmach(&["growth", "--group", "heisenberg", "--n", "1"]).json();
    assert_eq!(h["sizes"], serde_json::json!([1, 5]));
    assert_eq!(regmach(&["growth", "--group", "f2", "--n", "6", "--cap", "10"]).code, 2);
}

#[test]
fn dissim_of_zoo_languages() {
    for name in ["EQ", "MOD_3"] {
        let out = regmach(&["dissim", "--lang", name, "--n", "3"]);
        assert_eq!(out.code, 0);
        let d = dissimilarity(&zoo_get(name).unwrap().predicate, 3, DEFAULT_DISSIM_CAP).unwrap();
        assert_eq!(out.json(), serde_json::to_value(&d).unwrap());
    }
    let m3 = regmach(&["dissim", "--lang", "MOD_3", "--n", "3"]).json();
    assert_eq!(m3["a"], 3);
    assert!(m3["u"].as_u64() <= m3["a"].as_u64());
}

#[test]
fn grammar_matches_the_zoo_predicate() {
    let g = scratch("anbncn.json", ANBNCN_GRAMMAR);
    let g = g.to_str().unwrap();
    let pred = zoo_get("ANBNCN").unwrap().predicate;
    let abc = ["a", "b", "c"];
    let mut sample = words(3, 3);
    for s in ["aabbcc", "aaabbbccc", "aabbc", "abcabc"] {
        sample.push(s.chars().map(|c| (c as u8 - b'a') as usize).collect());
    }
    for w in sample {
        let text: String = w.iter().map(|&i| abc[i]).collect();
        let out = regmach(&["grammar", "--grammar", g, "--input", &text]);
        let want = if pred.contains(&w) { 0 } else { 1 };
        assert_eq!(out.code, want, "{text:?}: {}", out.stdout);
    }
    let out = regmach(&["grammar", "--grammar", g, "--input", "aabbcc", "--max-expansions", "1"]);
    assert_eq!(out.code, 3);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &[][..],
        &["bogus"],
        &["run", "--input", "a"],
        &["run", "--zoo", "EQ", "--machine", "x.json", "--input", "a"],
        &["run", "--machine", "/nonexistent/m.json", "--input", "a"],
        &["run", "--zoo", "EQ", "--input", "a", "--max-steps", "n+"],
        &["encode", "--scheme", "gsb", "--input", "a"],
    ] {
        let out = regmach(args);
        assert_eq!(out.code, 2, "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn reports_have_sorted_keys() {
    let out = regmach(&["zoo", "check", "EQ", "--max-len", "4"]);
    let keys: Vec<&str> = out
        .stdout
        .lines()
        .filter(|l| l.starts_with("  \""))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert!(keys.len() > 3);
    assert_eq!(keys, sorted);
}
