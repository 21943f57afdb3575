use std::path::Path;
use std::process::{Command, Output};

fn roma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roma")).args(args).output().unwrap()
}

#[test]
fn count_prints_golden_counts() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden");
    let out = roma(&["count", golden.join("two_edges.forest").to_str().unwrap(), "--enumerate"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let want = std::fs::read_to_string(golden.join("two_edges.counts")).unwrap();
    for line in want.lines() {
        assert!(stdout.contains(line), "missing {line} in\n{stdout}");
    }
    assert!(stdout.contains("enumeration=match"));
}

#[test]
fn simulate_is_reproducible() {
    let args = ["simulate", "--model", "URT", "--n", "16", "--trials", "20", "--seed", "9"];
    let a = roma(&args);
    let b = roma(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn selftest_passes_and_bad_input_is_an_error() {
    let ok = roma(&["selftest"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8(ok.stdout).unwrap().matches("PASS").count(), 8);
    let bad = roma(&["simulate", "--model", "URT_BYZ", "--n", "4", "--f", "3"]);
    assert_eq!(bad.status.code(), Some(2));
}
