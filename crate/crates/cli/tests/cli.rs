use std::fs;
use std::process::{Command, Output};

fn minsat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minsat")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn theorem1_q11() {
    let o = minsat(&["theorem1", "--q", "11"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("size 13, stab 13200"), "{out}");
    assert!(out.contains("agrees"));
}

#[test]
fn verify_q3_passes() {
    let o = minsat(&["verify", "--q", "3"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.lines().filter(|l| l.starts_with("PASS")).count() >= 5, "{out}");
    assert!(!out.contains("FAIL"));
}

#[test]
fn bad_input_exits_2() {
    assert_eq!(minsat(&["theorem1", "--q", "10"]).status.code(), Some(2));
    assert_eq!(minsat(&["verify", "--q", "5"]).status.code(), Some(2));
    assert_eq!(minsat(&["stabilizer", "--q", "3", "--points", "0,1,99"]).status.code(), Some(2));
}

#[test]
fn classify_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q9");
    let o = minsat(&["classify", "--q", "9", "--k-min", "6", "--k-max", "7", "--workers", "2", "--quiet", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = stdout(&o);
    assert!(table.contains("k=6: G_120: 0 + 1 complete  [total 1]"), "{table}");
    assert!(table.contains("[total 3]"), "{table}");
    for f in ["results.jsonl", "aggregate.json", "run-config.toml"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let results = fs::read_to_string(out.join("results.jsonl")).unwrap();
    assert_eq!(results.lines().count(), 1 + 4);
    assert!(results.lines().next().unwrap().contains("minsat-results-v1"));

    let agg = dir.path().join("merged.json");
    let o = minsat(&["report", out.join("results.jsonl").to_str().unwrap(), "--aggregate", agg.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), table);
    assert_eq!(fs::read_to_string(agg).unwrap(), fs::read_to_string(out.join("aggregate.json")).unwrap());
}

#[test]
fn export_code_of_frame() {
    let o = minsat(&["export-code", "--q", "3", "--points", "0,1,4,8"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("# parity-check matrix q=3"), "{out}");
    assert_eq!(out.lines().count(), 4);
}

#[test]
fn stabilizer_of_frame() {
    let o = minsat(&["stabilizer", "--q", "3", "--points", "0,1,4,8"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("order 24, label G_24"), "{out}");
    // frame-free sets are rejected
    assert_eq!(minsat(&["stabilizer", "--q", "4", "--points", "0,1,2,3,4,5"]).status.code(), Some(2));
}
