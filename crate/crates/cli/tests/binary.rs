mod common;

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_negotia-dm"))
}

#[test]
fn validate_exit_codes() {
    let ok = bin().args(["validate", "--ddd"]).arg(common::ddd()).output().unwrap();
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stdout));

    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.xml");
    std::fs::write(&broken, "<domain name=\"x\"><goal type=\"perform\" action=\"top\"><plan/></goal></domain>")
        .unwrap();
    let bad = bin().args(["validate", "--ddd"]).arg(&broken).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("EMPTY_PLAN"));

    std::fs::write(&broken, "<domain").unwrap();
    assert_eq!(bin().args(["validate", "--ddd"]).arg(&broken).output().unwrap().status.code(), Some(1));
}

#[test]
fn conformance_exit_codes() {
    let ok = bin().args(["conformance", "--scripts"]).arg(common::data_dir().join("scripts")).output().unwrap();
    let stdout = String::from_utf8_lossy(&ok.stdout);
    assert!(ok.status.success(), "{stdout}");
    assert!(stdout.contains("all scripts passed"));

    let dir = tempfile::tempdir().unwrap();
    let t1 = std::fs::read_to_string(common::data_dir().join("scripts/t1.script")).unwrap();
    let data = common::data_dir().canonicalize().unwrap();
    let mutated = t1
        .replace("../domains", &data.join("domains").display().to_string())
        .replace("../fixtures", &data.join("fixtures").display().to_string())
        .replace("is 77 years", "is 78 years");
    std::fs::write(dir.path().join("t1.script"), mutated).unwrap();
    let bad = bin().args(["conformance", "--scripts"]).arg(dir.path()).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&bad.stdout);
    assert_eq!(stdout.matches("FAIL").count(), 1, "{stdout}");

    let empty = tempfile::tempdir().unwrap();
    assert_eq!(bin().args(["conformance", "--scripts"]).arg(empty.path()).output().unwrap().status.code(), Some(1));
}

#[test]
fn generated_fixture_matches_shipped_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f2.jsonl");
    let status = bin().args(["generate-fixture", "--seed", "0", "--out"]).arg(&out).status().unwrap();
    assert!(status.success());
    let shipped = std::fs::read(common::fixture("f2_large.jsonl")).unwrap();
    assert!(std::fs::read(&out).unwrap() == shipped);
}

#[test]
fn repl_binary_roundtrip() {
    use std::io::Write;
    let mut child = bin()
        .args(["repl", "--ddd"])
        .arg(common::ddd())
        .arg("--fixture")
        .arg(common::fixture("f1_small.jsonl"))
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"I want the number for Anna Andersson in Gothenburg\n/quit\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("S: There are three persons matching your description."));
}
