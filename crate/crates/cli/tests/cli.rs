use std::path::Path;
use std::process::{Command, Output};

fn jigsaw(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_jigsaw")).args(args).output().unwrap();
    assert!(
        out.status.success(),
        "jigsaw {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stdout(args: &[&str]) -> String {
    String::from_utf8(jigsaw(args).stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn every_subcommand_has_help() {
    for sub in [
        vec!["scenarios", "generate"],
        vec!["scenarios", "check"],
        vec!["selfplay"],
        vec!["eval"],
        vec!["marginals"],
        vec!["serve"],
    ] {
        let mut args = sub.clone();
        args.push("--help");
        assert!(stdout(&args).contains("Usage"), "{sub:?}");
    }
}

#[test]
fn generate_then_check() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.jsonl");
    jigsaw(&["scenarios", "generate", "--n", "3", "--seed", "11", "--out", path(&file)]);
    let text = std::fs::read_to_string(&file).unwrap();
    assert_eq!(text.lines().count(), 3);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["objects"].as_array().unwrap().len(), 6);
    }
    assert!(!stdout(&["scenarios", "check", "--file", path(&file)]).is_empty());
}

#[test]
fn selfplay_takes_both_policies_and_a_window() {
    let csv = stdout(&["selfplay", "--a", "greedy", "--b", "random", "--n", "2", "--seed", "7", "--window", "inf"]);
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().contains("utility"));
    assert_eq!(lines.count(), 2);

    let json = stdout(&["selfplay", "--a", "random", "--b", "random", "--n", "2", "--seed", "7", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["overall"]["games"], 2);
}

#[test]
fn selfplay_transcripts_feed_eval() {
    let dir = tempfile::tempdir().unwrap();
    let games = dir.path().join("games.jsonl");
    jigsaw(&[
        "selfplay", "--a", "greedy", "--b", "greedy", "--n", "2", "--seed", "3", "--transcripts", path(&games),
    ]);
    let report = stdout(&[
        "eval", "--data", path(&games), "--policies", "greedy,random", "--resamples", "50",
    ]);
    let v: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(v["games_kept"], 2);
    let policies = v["policies"].as_array().unwrap();
    assert_eq!(policies.len(), 2);
    assert!(policies.iter().all(|p| p["mean_ll"].as_f64().unwrap() < 0.0));
}

#[test]
fn marginals_json_and_text() {
    let json = stdout(&["marginals", "--seed", "3", "--actions", "blue", "--k", "0", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["steps"].as_array().unwrap().len(), 2);
    assert!(!stdout(&["marginals", "--seed", "3", "--k", "0"]).is_empty());
}

#[test]
fn bad_input_fails_with_a_message() {
    let out = Command::new(env!("CARGO_BIN_EXE_jigsaw"))
        .args(["selfplay", "--a", "oracle", "--n", "1"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("oracle"));
}
