use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    dir.join(name).to_string_lossy().into_owned()
}

fn efd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_efd")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn efd_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_efd"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

#[test]
fn distance_reports_r_and_stabilization() {
    let o = efd(&["distance", "--alpha", "2", "--omega", "default", &fixture("two_pt_1.json"), &fixture("two_pt_32.json")]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "r = 1/2, stabilized at 2");
    let o = efd(&["distance", "--alpha", "1", &fixture("two_pt_1.json"), &fixture("two_pt_32.json")]);
    assert_eq!(stdout(&o).trim(), "r = 0/1, stabilized at 2");
    let o = efd(&["distance", "--alpha", "0", "--pledge", "a1=b1", "--pledge", "a2=b2", &fixture("two_pt_1.json"), &fixture("two_pt_32.json")]);
    assert_eq!(stdout(&o).trim(), "r = 1/2, stabilized at 2");
}

#[test]
fn solve_prints_the_winner_and_writes_a_strategy() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cert.json");
    let o = efd(&[
        "solve", "--clock", "2", "--epsilon", "3/5", "--strategy", out.to_str().unwrap(),
        &fixture("two_pt_1.json"), &fixture("two_pt_32.json"),
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().next(), Some("winner: II"));
    let cert = efd_core::game::StrategyCertificate::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(cert.player, efd_core::game::Player::II);

    let o = efd(&["solve", "--clock", "w*", "--epsilon", "2/5", "--fail-on-no", &fixture("two_pt_1.json"), &fixture("two_pt_32.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o).lines().next(), Some("winner: I"));
}

#[test]
fn epsilon_sweep_finds_the_threshold() {
    let o = efd(&["--json", "solve", "--clock", "w*", "--epsilon-sweep", "1/4,1,1/4", &fixture("two_pt_1.json"), &fixture("two_pt_32.json")]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["threshold"], "3/4");
    assert_eq!(v["sweep"].as_array().unwrap().len(), 4);
}

#[test]
fn equiv_answers_yes_or_no() {
    let (a, b) = (fixture("chain2.json"), fixture("chain3.json"));
    assert_eq!(stdout(&efd(&["equiv", "--alpha", "1", &a, &b])).trim(), "yes");
    let o = efd(&["equiv", "--alpha", "2", &a, &b]);
    assert_eq!((stdout(&o).trim(), o.status.code()), ("no", Some(0)));
    assert_eq!(efd(&["equiv", "--alpha", "2", "--fail-on-no", &a, &b]).status.code(), Some(1));
}

#[test]
fn validate_language_and_structure() {
    let o = efd(&["validate", &fixture("metric.json"), &fixture("triangle_ref.json")]);
    assert_eq!(stdout(&o).trim(), "ok");
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"universes":{"M":["p","q"]},"metric":{"M":[["0/1","1/1"],["1/2","0/1"]]}}"#).unwrap();
    let o = efd(&["validate", "--fail-on-no", &fixture("metric.json"), bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("defect"));
}

#[test]
fn prove_check_and_replay() {
    let o = efd(&["prove-check", &fixture("groupoid.json"), &fixture("equiv_proof.json")]);
    assert_eq!(stdout(&o).trim(), "valid (9 lines)");
    let o = efd(&["--fail-on-no", "prove-check", &fixture("terminal.json"), &fixture("equiv_proof.json")]);
    assert_eq!(o.status.code(), Some(2), "the proof names morphisms the terminal category lacks");

    let o = efd(&["replay", &fixture("transcript_two_pt.json")]);
    assert!(stdout(&o).contains("winner I") && stdout(&o).contains("matches recorded verdict"));
}

#[test]
fn replay_reproduces_a_played_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let t = dir.path().join("t.json");
    let args = [
        "play", "--clock", "2", "--epsilon", "2/5", "--human", "I", "--transcript", t.to_str().unwrap(),
        &fixture("two_pt_1.json"), &fixture("two_pt_32.json"),
    ];
    let o = efd_stdin(&args, "hint\n1 A a2\n0 A a1\n");
    assert!(stdout(&o).contains("winner: I"), "{}", stdout(&o));
    let o = efd(&["--json", "--fail-on-no", "replay", t.to_str().unwrap()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["matches_recorded"], true);
    assert_eq!(v["verdict"]["winner"], "I");
}

#[test]
fn engine_plays_the_spoiler_when_asked() {
    let o = efd_stdin(
        &["play", "--clock", "2", "--epsilon", "2/5", "--human", "II", &fixture("two_pt_1.json"), &fixture("two_pt_32.json")],
        "b1\nb1\nb2\nb1\nb2\n",
    );
    let text = stdout(&o);
    assert!(text.contains("engine: challenge"));
    assert!(text.contains("winner: I"), "{text}");
}

#[test]
fn json_output_is_deterministic() {
    let args = ["--json", "solve", "--clock", "3", "--epsilon", "1/2", &fixture("chain2.json"), &fixture("chain3.json")];
    let (x, y) = (efd(&args), efd(&args));
    assert_eq!(x.stdout, y.stdout);
    let v: Value = serde_json::from_slice(&x.stdout).unwrap();
    assert_eq!(v["schema"], "efd/1");
    assert_eq!(v["winner"], "I");
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(efd(&["distance", "missing.json", "missing.json"]).status.code(), Some(2));
    let o = efd(&["solve", "--clock", "2", "--epsilon", "0/1", &fixture("two_pt_1.json"), &fixture("two_pt_32.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("epsilon"));
    assert_eq!(efd(&["solve", "--clock", "x", "--epsilon", "1/2", &fixture("two_pt_1.json"), &fixture("two_pt_32.json")]).status.code(), Some(2));
    assert_eq!(efd(&["distance", "--bogus"]).status.code(), Some(2));
    assert_eq!(efd(&["equiv", &fixture("two_pt_1.json"), &fixture("chain2.json")]).status.code(), Some(2));
}
