use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn cocite(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cocite")).args(args).current_dir(cwd).output().expect("spawn cocite")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn build_writes_counts_and_report() {
    let t = TempDir::new().unwrap();
    let o = cocite(&["build", "builtin:figure2", "--out", "o"], t.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(t.path().join("o/cooccurrence.csv")).unwrap();
    assert_eq!(csv.lines().nth(4).unwrap(), "Paper D,2,2,2,4");
    let r = report(&t.path().join("o"));
    assert_eq!(r["command"], "build");
    assert_eq!(r["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn records_file_input() {
    let t = TempDir::new().unwrap();
    fs::write(t.path().join("refs.tsv"), "d1\tX;Y:2\nd2\tY;Z\n").unwrap();
    let o = cocite(&["build", "refs.tsv", "--affiliations", "--out", "o"], t.path());
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(t.path().join("o/affiliations.csv")).unwrap();
    assert_eq!(csv.lines().nth(1).unwrap(), "X,1,2,0");
}

#[test]
fn report_is_deterministic_apart_from_timestamp() {
    let t = TempDir::new().unwrap();
    let args = ["pipeline", "builtin:figure2", "--steps", "pearson,shift,mds", "--out"];
    let mut runs = Vec::new();
    for dir in ["a", "b"] {
        let mut a = args.to_vec();
        a.push(dir);
        assert_eq!(code(&cocite(&a, t.path())), 0);
        let mut r = report(&t.path().join(dir));
        r.as_object_mut().unwrap().remove("timestamp_unix");
        runs.push(r);
    }
    assert_eq!(runs[0], runs[1]);
    for f in ["01-pearson.csv", "02-shift.csv", "03-coordinates.csv", "03-map.svg"] {
        assert_eq!(fs::read(t.path().join("a").join(f)).unwrap(), fs::read(t.path().join("b").join(f)).unwrap());
    }
}

#[test]
fn random_init_needs_seed() {
    let t = TempDir::new().unwrap();
    let o = cocite(&["mds", "builtin:cities", "--init", "random"], t.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--seed"));
    assert!(!t.path().join("out").exists());
    let o = cocite(&["mds", "builtin:cities", "--init", "random", "--seed", "5", "--out", "o"], t.path());
    assert_eq!(code(&o), 0);
    assert_eq!(report(&t.path().join("o"))["config"]["seed"], 5);
}

#[test]
fn mistyped_chain_is_rejected_before_running() {
    let t = TempDir::new().unwrap();
    for steps in ["mds,factor", "euclidean,shift", "cooccurrence,factor", "jaccard,layout"] {
        let o = cocite(&["pipeline", "builtin:figure2", "--steps", steps, "--out", "o"], t.path());
        assert_eq!(code(&o), 2, "{steps}");
        assert!(!t.path().join("o").exists(), "{steps}");
    }
    let o = cocite(&["prox", "builtin:cities", "--measure", "to-dissimilarity"], t.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn bad_data_exits_one_with_module_prefix() {
    let t = TempDir::new().unwrap();
    fs::write(t.path().join("asym.csv"), ",a,b\na,0,1\nb,2,0\n").unwrap();
    let o = cocite(&["mds", "asym.csv"], t.path());
    assert_eq!(code(&o), 1);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.starts_with("error: ingest:"), "{err}");
    assert_eq!(err.matches("differ").count(), 1);

    fs::write(t.path().join("neg.tsv"), "d1\tA:-1\n").unwrap();
    assert_eq!(code(&cocite(&["build", "neg.tsv"], t.path())), 1);
    assert_eq!(code(&cocite(&["build", "missing.tsv"], t.path())), 1);
}

#[test]
fn unknown_arguments_are_usage_errors() {
    let t = TempDir::new().unwrap();
    assert_eq!(code(&cocite(&["demo", "table9"], t.path())), 2);
    assert_eq!(code(&cocite(&["mds", "builtin:nowhere"], t.path())), 2);
    assert_eq!(code(&cocite(&["factor", "builtin:figure2", "--factors", "0"], t.path())), 2);
}

#[test]
fn factor_and_layout_artifacts() {
    let t = TempDir::new().unwrap();
    let o = cocite(&["factor", "builtin:figure2", "--factors", "2", "--out", "f"], t.path());
    assert_eq!(code(&o), 0);
    let table = fs::read_to_string(t.path().join("f/loadings.txt")).unwrap();
    assert!(table.starts_with("Rotated Component Matrix"), "{table}");
    assert_eq!(report(&t.path().join("f"))["steps"][0]["results"]["factors"], 2);

    let o = cocite(&["layout", "builtin:figure1", "--out", "l"], t.path());
    assert_eq!(code(&o), 0);
    let net = fs::read_to_string(t.path().join("l/network.net")).unwrap();
    assert!(net.contains("2 3 30"));
    let r = report(&t.path().join("l"));
    let res = &r["steps"][0]["results"];
    assert!(res["final_energy"].as_f64().unwrap() <= res["initial_energy"].as_f64().unwrap());

    let o = cocite(&["layout", "l/network.net", "--out", "l2"], t.path());
    assert_eq!(code(&o), 0);
    assert_eq!(report(&t.path().join("l2"))["steps"][0]["results"]["edges"], 6);
}

#[test]
fn demos() {
    let t = TempDir::new().unwrap();
    let o = cocite(&["demo", "cities-correct", "--out", "c"], t.path());
    assert_eq!(code(&o), 0);
    let stress = report(&t.path().join("c"))["steps"][0]["results"]["stress"].as_f64().unwrap();
    assert!(stress < 0.005);

    let o = cocite(&["demo", "cities-distorted", "--out", "d"], t.path());
    assert_eq!(code(&o), 0);
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(out.contains("stress ratio"));
    assert!(out.contains("warning"));

    let o = cocite(&["demo", "figure3", "--out", "f"], t.path());
    assert_eq!(code(&o), 0);
    let out = String::from_utf8_lossy(&o.stdout);
    let d_row = out.lines().find(|l| l.starts_with("Paper D")).unwrap();
    let vals: Vec<&str> = d_row.split_whitespace().skip(2).collect();
    assert_eq!(vals, ["0.296", "0.296", "0.704", "1.000"]);
}
