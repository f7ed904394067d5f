use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use serde_json::Value;

fn pglsl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pglsl")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn gott_rank_three_leading_coefficient() {
    let v = json_of(&pglsl(&["gott", "--surface", "mgt_chi2_k1", "--r", "3", "--w", "0", "--L", "K", "--z-order", "4"]));
    // 3^(2-2+1) * (2^2 + 2)
    assert_eq!(v["leading"]["order"], 0);
    assert_eq!(v["leading"]["coeff"][0]["coeff"]["rational"], "18");
    assert_eq!(v["leading"]["coeff"][0]["coeff"]["conductor"], 12);
}

#[test]
fn bounds_window() {
    let v = json_of(&pglsl(&["bounds", "--surface", "mgt_chi2_k1", "--r", "2", "--w", "odd"]));
    assert_eq!(v["lower"], 4);
    assert_eq!(v["upper"], 7);
    assert_eq!(v["provenance"]["upper"], "THEOREM");
    let v = json_of(&pglsl(&["bounds", "--surface", "mgt_chi1_k1", "--r", "3", "--w", "0"]));
    assert_eq!(v["upper"], 8);
    assert_eq!(v["provenance"]["upper"], "CONJECTURE-GOTT");
}

#[test]
fn vd_substitution() {
    let v = json_of(&pglsl(&["vd", "--r", "2", "--c1sq", "1", "--c2", "3", "--chi", "1"]));
    assert_eq!(v["vd"], "8");
}

#[test]
fn output_is_deterministic() {
    let args = ["gott", "--surface", "mgt_chi3_k2", "--r", "3", "--w", "wk=1", "--float"];
    let a = pglsl(&args);
    let b = pglsl(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn gny_parity_cases() {
    let v = json_of(&pglsl(&["gny", "--surface", "mgt_chi2_k3", "--w", "odd"]));
    assert_eq!(v["leading"]["order"], 1);
    // 2^(2-2+3) * 2*3
    assert_eq!(v["leading"]["coeff"][0]["coeff"]["rational"], "48");
    assert_eq!(v["off_parity_orders"], Value::Array(vec![]));
}

#[test]
fn gkl_single_residue() {
    let v = json_of(&pglsl(&["gkl", "--surface", "mgt_chi2_k1", "--r", "3", "--w", "0"]));
    let residue = v["residue"].as_i64().unwrap();
    let terms = v["series"]["terms"].as_array().unwrap();
    assert!(!terms.is_empty());
    for t in terms {
        assert_eq!(t["num"].as_i64().unwrap().rem_euclid(6), residue);
    }
}

#[test]
fn validation_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(
        dir.path(),
        "bad.json",
        r#"{"schema_version": 1, "chi": 1, "gram": [1], "K": [0], "sw": [{"a": [0], "val": 1}], "tags": []}"#,
    );
    let out = pglsl(&["gny", "--surface", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Wu"));
}

#[test]
fn parse_failure_names_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "typo.json", r#"{"schema_version": 1, "chi": 1, "gram": [1], "KK": [1], "sw": []}"#);
    let out = pglsl(&["gny", "--surface", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("KK"));
}

#[test]
fn budget_refusal_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let b = 21;
    let mut gram = vec![0; b * b];
    for i in 0..b {
        gram[i * b + i] = 1;
    }
    let surface = serde_json::json!({
        "schema_version": 1, "chi": 1, "gram": gram, "K": vec![1; b],
        "sw": [{"a": vec![0; b], "val": 1}], "tags": []
    });
    let spath = write(dir.path(), "big.json", &surface.to_string());
    let tpath = write(
        dir.path(),
        "table.json",
        r#"{"schema_version": 1, "r": 2, "collapsed": [
            {"wk": 0, "series": {"den": 4, "min_exp": 0, "trunc": 8, "terms": [{"num": 0, "coeff": {"conductor": 1, "coeffs": ["1"]}}]}},
            {"wk": 1, "series": {"den": 4, "min_exp": 0, "trunc": 8, "terms": [{"num": 2, "coeff": {"conductor": 1, "coeffs": ["3"]}}]}}
        ]}"#,
    );
    let out = pglsl(&["psu", "--surface", &spath, "--r", "2", "--table", &tpath, "--method", "brute"]);
    assert_eq!(out.status.code(), Some(3));
    let v = json_of(&pglsl(&["psu", "--surface", &spath, "--r", "2", "--table", &tpath, "--method", "reduced"]));
    assert!(!v["series"]["terms"].as_array().unwrap().is_empty());
}

#[test]
fn psu_methods_agree() {
    let dir = tempfile::tempdir().unwrap();
    let tpath = write(
        dir.path(),
        "table.json",
        r#"{"schema_version": 1, "r": 3, "collapsed": [
            {"wk": 0, "series": {"den": 6, "min_exp": 0, "trunc": 12, "terms": [{"num": 0, "coeff": {"conductor": 1, "coeffs": ["1"]}}]}},
            {"wk": 1, "series": {"den": 6, "min_exp": 0, "trunc": 12, "terms": [{"num": 1, "coeff": {"conductor": 1, "coeffs": ["2"]}}]}},
            {"wk": 2, "series": {"den": 6, "min_exp": 0, "trunc": 12, "terms": [{"num": 2, "coeff": {"conductor": 1, "coeffs": ["5"]}}], "note": "x"}}
        ]}"#,
    );
    let v = json_of(&pglsl(&["psu", "--surface", "mgt_chi1_k4", "--r", "3", "--c1", "1,2", "--table", &tpath]));
    assert_eq!(v["agree"], true);
}

#[test]
fn no_leading_term_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "empty.json", r#"{"schema_version": 1, "chi": 1, "gram": [1], "K": [1], "sw": []}"#);
    let out = pglsl(&["leading", "--surface", &path, "--r", "2"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn chern_check_reports() {
    let v = json_of(&pglsl(&[
        "chern-check",
        "--surface",
        "mgt_chi1_k1",
        "--ch",
        r#"{"rank": "2", "c1": ["1"], "ch2": "-5/2"}"#,
    ]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["report"]["c2"], "3");
    let v = json_of(&pglsl(&["chern-check", "--surface", "mgt_chi1_k1", "--ch", r#"{"rank": "2", "c1": ["1/2"], "ch2": "0"}"#]));
    assert_eq!(v["passed"], false);
}

#[test]
fn twisted_chern_check() {
    // ch(E) for rank 2, c1 = 1, c2 = 1 on the lattice (1); A = End(E); M = O ⊗ E^∨.
    let v = json_of(&pglsl(&[
        "chern-check",
        "--surface",
        "mgt_chi1_k1",
        "--ch",
        r#"{"rank": "2", "c1": ["-1"], "ch2": "-1/2"}"#,
        "--ch-a",
        r#"{"rank": "4", "c1": ["0"], "ch2": "-3"}"#,
        "--xi",
        "1",
        "--r",
        "2",
    ]));
    assert_eq!(v["twisted"], serde_json::json!({"rank": "1", "c1": ["0"], "ch2": "0"}));
    assert_eq!(v["passed"], true);
}

#[test]
fn default_runs_are_fast() {
    let runs: [&[&str]; 5] = [
        &["gott", "--surface", "mgt_chi2_k4", "--r", "5", "--w", "wk=1"],
        &["gny", "--surface", "mgt_chi4_k5"],
        &["gkl", "--surface", "mgt_chi3_k2", "--r", "3", "--w", "wk=2"],
        &["bounds", "--surface", "mgt_chi3_k3", "--r", "6", "--w", "0"],
        &["leading", "--surface", "mgt_chi2_k2", "--r", "4", "--w", "odd"],
    ];
    for args in runs {
        let t = Instant::now();
        let out = pglsl(args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(t.elapsed() < Duration::from_secs(10), "{args:?} took {:?}", t.elapsed());
    }
}
