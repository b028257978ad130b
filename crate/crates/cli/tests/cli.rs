//! End-to-end tests of the binary: stable exit codes, deterministic JSON,
//! certificate round trips and tamper detection.

use std::path::Path;
use std::process::{Command, Output};

fn soq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_soq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn classify_unit_form_over_q() {
    let out = soq(&["classify", "--field", "Q", "--form", "1,1,1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for needle in ["A4", "S4", "C4", "D8"] {
        assert!(text.contains(needle), "missing {needle} in:\n{text}");
    }
    assert!(text.contains("sqrt(5) is not in Q"));
}

#[test]
fn classify_rejects_bad_usage() {
    let out = soq(&["classify", "--field", "Q"]);
    assert_eq!(out.status.code(), Some(2), "missing --form is a usage error");
    let out = soq(&["classify", "--field", "F9", "--form", "1,1,1"]);
    assert_eq!(out.status.code(), Some(2), "F9 is not a prime field");
    let out = soq(&["embed", "--group", "Q8", "--field", "Q", "--form", "1,1,1"]);
    assert_eq!(out.status.code(), Some(2), "unknown group label");
}

#[test]
fn embed_reports_reason() {
    let out = soq(&[
        "embed", "--group", "A5", "--field", "Q", "--form", "1,1,1",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("does not embed"));
    let out = soq(&[
        "embed", "--group", "C4", "--field", "Q", "--form", "-1,-1,1",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("does embed"));
}

#[test]
fn degenerate_form_is_a_domain_error() {
    let out = soq(&["classify", "--field", "Q", "--form", "1,0,1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn synth_verify_round_trip_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let out = soq(&[
        "synth", "--group", "D6", "--field", "Q", "--form", "1,1,1",
        "--out", cert.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = soq(&["verify", cert.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("PASS"));

    // perturb one matrix entry: verification must fail with exit 1
    let text = std::fs::read_to_string(&cert).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["generators"][0][1][1] = serde_json::Value::String("2".into());
    let tampered = dir.path().join("tampered.json");
    std::fs::write(&tampered, serde_json::to_string(&v).unwrap()).unwrap();
    let out = soq(&["verify", tampered.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("FAIL"));

    // malformed JSON: exit 2
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{not json").unwrap();
    let out = soq(&["verify", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn factor_bound_is_configurable_and_failure_is_loud() {
    // 1000036000099 = 1000003 * 1000033: both factors above the default
    // trial-division bound, so canonicalization refuses rather than guess
    let out = soq(&["classify", "--field", "Q", "--form", "1000036000099,1,1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trial-division bound"));
    // raising the bound resolves it
    let out = soq(&[
        "classify", "--field", "Q", "--form", "1000036000099,1,1",
        "--factor-bound", "1100000",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("A4"));
}

#[test]
fn oracle_cross_check_passes_for_p3() {
    let out = soq(&["oracle", "--p", "3", "--form", "1,1,1", "--cross-check"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("overall: PASS"));
    assert!(!text.contains("FAIL]"));
    assert!(text.contains("24 elements"));
}

#[test]
fn oracle_census_table() {
    let out = soq(&["oracle", "--p", "3", "--form", "1,1,1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("C2"));
    assert!(text.contains("p-irregular"));
    // budget guard
    let out = soq(&["oracle", "--p", "17", "--form", "1,1,1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn json_output_is_byte_identical_across_runs(){
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for path in [&a, &b] {
        let out = soq(&[
            "classify", "--field", "F5", "--form", "1,2,3",
            "--json", path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    assert_eq!(
        std::fs::read(&a).unwrap(),
        std::fs::read(&b).unwrap(),
        "identical inputs must produce byte-identical JSON"
    );
}

#[test]
fn gram_matrix_input_is_diagonalized() {
    let dir = tempfile::tempdir().unwrap();
    let gram = dir.path().join("gram.json");
    // [[1,1,0],[1,2,0],[0,0,1]] is congruent to the identity
    std::fs::write(
        &gram,
        r#"[["1","1","0"],["1","2","0"],["0","0","1"]]"#,
    )
    .unwrap();
    let out = soq(&[
        "embed", "--group", "S4", "--field", "Q",
        "--gram", gram.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("does embed"));
}

#[test]
fn conj_same_class_and_representative() {
    let out = soq(&[
        "conj", "--group", "D8", "--field", "Q", "--form", "1,1,1",
        "--same-class", "5", "10",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("same class"));

    let out = soq(&[
        "conj", "--group", "D6", "--field", "Q", "--form", "1,1,1",
        "--same-class", "7", "1",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("distinct classes"));

    // membership failure: 7 is not a sum of two squares
    let out = soq(&[
        "conj", "--group", "D8", "--field", "Q", "--form", "1,1,1",
        "--same-class", "7", "1",
    ]);
    assert_eq!(out.status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("rep.json");
    let out = soq(&[
        "conj", "--group", "C2", "--field", "Q", "--form", "1,1,1",
        "--representative", "2", "--json", json.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(Path::new(&json).exists());
}

#[test]
fn conj_class_of_subgroup_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("klein.json");
    std::fs::write(
        &file,
        r#"[
            [["1","0","0"],["0","-1","0"],["0","0","-1"]],
            [["-1","0","0"],["0","1","0"],["0","0","-1"]]
        ]"#,
    )
    .unwrap();
    let out = soq(&[
        "conj", "--group", "D4", "--field", "Q", "--form", "1,1,1",
        "--class-of", file.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("pair (1,1)"));
}
