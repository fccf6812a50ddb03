use std::path::{Path, PathBuf};

use serde_json::Value;
use tabsynth_cli::{run, Outcome};
use tabsynth_core::models::{
    is_admissible_extension, load_model, load_synthesized, ExtensionPolicy,
};
use tempfile::TempDir;

fn tabsynth(args: &[&str]) -> Outcome {
    run(std::iter::once("tabsynth").chain(args.iter().copied()))
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const ONE_P: &str = r#"{"logic":"CTL","atoms":["p","q"],"states":[{"id":"s","label":["p"]}],"transitions":[],"root":"s"}"#;
const K_Q: &str = r#"{"logic":"K","atoms":["p","q"],"states":[{"id":"s","label":["q"]}],"transitions":[],"root":"s"}"#;

fn machine(o: &Outcome) -> Value {
    serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", o.stdout))
}

#[test]
fn solve_writes_a_checked_extension() {
    let dir = TempDir::new().unwrap();
    let m = file(&dir, "m.json", ONE_P);
    let w = dir.path().join("w.json");
    let o = tabsynth(&[
        "solve",
        "--logic",
        "ctl",
        "--model",
        s(&m),
        "--formula",
        "EF q",
        "--out",
        s(&w),
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let original = load_model(ONE_P.as_bytes()).unwrap();
    let synthesized = load_synthesized(&std::fs::read(&w).unwrap()).unwrap();
    assert!(is_admissible_extension(&original, &synthesized, ExtensionPolicy::Grow).unwrap());
    let o = tabsynth(&[
        "mc",
        "--logic",
        "ctl",
        "--model",
        s(&w),
        "--formula",
        "EF q",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
}

#[test]
fn epm_mcpm_exit_codes() {
    let dir = TempDir::new().unwrap();
    let m = file(&dir, "m.json", K_Q);
    let o = tabsynth(&[
        "epm",
        "--logic",
        "k",
        "--formula",
        "p & ~p",
        "--model",
        s(&m),
    ]);
    assert_eq!(o.code, 1);
    let o = tabsynth(&[
        "mcpm",
        "--logic",
        "k",
        "--formula",
        "p | ~p",
        "--model",
        s(&m),
    ]);
    assert_eq!(o.code, 0);
}

#[test]
fn mcpm_is_negated_epm_of_negation() {
    let dir = TempDir::new().unwrap();
    let m = file(&dir, "m.json", K_Q);
    for (phi, neg) in [
        ("[]q", "~[]q"),
        ("q & <>p", "~(q & <>p)"),
        ("<>~q", "~<>~q"),
    ] {
        let a = tabsynth(&["mcpm", "--logic", "k", "--formula", phi, "--model", s(&m)]);
        let b = tabsynth(&["epm", "--logic", "k", "--formula", neg, "--model", s(&m)]);
        assert_eq!(a.code, 1 - b.code, "{phi}");
    }
}

#[test]
fn sat_examples() {
    let dir = TempDir::new().unwrap();
    assert_eq!(
        tabsynth(&["sat", "--logic", "ltl", "--formula", "G p & F ~p"]).code,
        1
    );
    assert_eq!(
        tabsynth(&["sat", "--logic", "ctl", "--formula", "AG p & EF ~p"]).code,
        1
    );
    let out = dir.path().join("model.json");
    let o = tabsynth(&[
        "sat",
        "--logic",
        "k",
        "--formula",
        "<>p & []q",
        "--out",
        s(&out),
    ]);
    assert_eq!(o.code, 0);
    let model = load_synthesized(&std::fs::read(&out).unwrap())
        .unwrap()
        .model;
    assert_eq!(model.len(), 2);
    let o = tabsynth(&[
        "mc",
        "--logic",
        "k",
        "--model",
        s(&out),
        "--formula",
        "<>p & []q",
    ]);
    assert_eq!(o.code, 0);
}

#[test]
fn mc_requires_complete_models() {
    let dir = TempDir::new().unwrap();
    let m = file(&dir, "m.json", ONE_P);
    let o = tabsynth(&["mc", "--logic", "ctl", "--model", s(&m), "--formula", "p"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("--model"), "{}", o.stderr);
    let k = file(&dir, "k.json", K_Q);
    assert_eq!(
        tabsynth(&["mc", "--logic", "k", "--model", s(&k), "--formula", "[]p"]).code,
        0
    );
}

#[test]
fn oracle_commands() {
    let dir = TempDir::new().unwrap();
    let m = file(&dir, "m.json", K_Q);
    let w = dir.path().join("witness.json");
    let o = tabsynth(&[
        "oracle-epm",
        "--logic",
        "k",
        "--model",
        s(&m),
        "--formula",
        "<>p & []q",
        "--bound",
        "1",
        "--out",
        s(&w),
        "--format",
        "machine",
    ]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let report = machine(&o);
    assert_eq!(report["bounded"], Value::Bool(false));
    assert_eq!(report["witness"], Value::String(s(&w).to_string()));
    assert!(w.exists());
    let o = tabsynth(&[
        "oracle-epm",
        "--logic",
        "k",
        "--model",
        s(&m),
        "--formula",
        "p & ~p",
    ]);
    assert_eq!(o.code, 1);
    let o = tabsynth(&[
        "oracle-mcpm",
        "--logic",
        "k",
        "--model",
        s(&m),
        "--formula",
        "p | ~p",
        "--format",
        "machine",
    ]);
    assert_eq!(o.code, 0);
    assert_eq!(machine(&o)["bounded"], Value::Bool(true));
    let o = tabsynth(&[
        "oracle-epm",
        "--logic",
        "k",
        "--model",
        s(&m),
        "--formula",
        "p",
        "--bound",
        "5",
    ]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("--bound"));
    let o = tabsynth(&[
        "oracle-epm",
        "--logic",
        "k",
        "--model",
        s(&m),
        "--formula",
        "p",
        "--policy",
        "complete",
    ]);
    assert_eq!(o.code, 2);
}

#[test]
fn machine_reports_parse_and_carry_the_exit_status() {
    let dir = TempDir::new().unwrap();
    let m = file(&dir, "m.json", K_Q);
    for (args, code) in [
        (
            vec![
                "solve",
                "--logic",
                "k",
                "--model",
                s(&m),
                "--formula",
                "<>p",
            ],
            0,
        ),
        (
            vec!["epm", "--logic", "k", "--model", s(&m), "--formula", "p"],
            1,
        ),
        (
            vec!["mcpm", "--logic", "k", "--model", s(&m), "--formula", "q"],
            0,
        ),
        (vec!["sat", "--logic", "ltl", "--formula", "X p"], 0),
        (
            vec!["mc", "--logic", "k", "--model", s(&m), "--formula", "p"],
            1,
        ),
        (
            vec![
                "oracle-mcpm",
                "--logic",
                "k",
                "--model",
                s(&m),
                "--formula",
                "[]q",
            ],
            1,
        ),
    ] {
        let mut args = args.clone();
        args.extend(["--format", "machine"]);
        let o = tabsynth(&args);
        assert_eq!(o.code, code, "{args:?}: {}", o.stderr);
        let report = machine(&o);
        assert_eq!(report["exit_status"], Value::from(code));
        assert!(report.get("duration").is_none());
        // Re-serializing the parsed tree gives back the same document.
        assert_eq!(
            serde_json::to_string_pretty(&report).unwrap() + "\n",
            o.stdout
        );
    }
}

#[test]
fn usage_errors_exit_two() {
    let dir = TempDir::new().unwrap();
    let m = file(&dir, "m.json", K_Q);
    let f = file(&dir, "phi.txt", "<>p\n");
    let both = tabsynth(&[
        "epm",
        "--logic",
        "k",
        "--model",
        s(&m),
        "--formula",
        "p",
        "--formula-file",
        s(&f),
    ]);
    assert_eq!(both.code, 2);
    let from_file = tabsynth(&[
        "epm",
        "--logic",
        "k",
        "--model",
        s(&m),
        "--formula-file",
        s(&f),
    ]);
    assert_eq!(from_file.code, 0);
    let mismatch = tabsynth(&["epm", "--logic", "ctl", "--model", s(&m), "--formula", "p"]);
    assert_eq!(mismatch.code, 2);
    assert!(mismatch.stderr.contains("--model"));
    let syntax = tabsynth(&["epm", "--logic", "k", "--model", s(&m), "--formula", "p &"]);
    assert_eq!(syntax.code, 2);
    assert!(syntax.stderr.contains("position 3"), "{}", syntax.stderr);
    let wrong = tabsynth(&["epm", "--logic", "k", "--model", s(&m), "--formula", "EX p"]);
    assert_eq!(wrong.code, 2);
    let missing = tabsynth(&[
        "epm",
        "--logic",
        "k",
        "--model",
        "/nonexistent/m.json",
        "--formula",
        "p",
    ]);
    assert_eq!(missing.code, 2);
    assert!(missing.stderr.contains("/nonexistent/m.json"));
    let fixed = tabsynth(&[
        "solve",
        "--logic",
        "k",
        "--model",
        s(&m),
        "--formula",
        "p",
        "--policy",
        "fixed-states",
    ]);
    assert_eq!(fixed.code, 2);
    let empty = file(
        &dir,
        "empty.json",
        r#"{"logic":"K","atoms":[],"states":[],"transitions":[],"root":"s"}"#,
    );
    assert_eq!(
        tabsynth(&[
            "epm",
            "--logic",
            "k",
            "--model",
            s(&empty),
            "--formula",
            "p"
        ])
        .code,
        2
    );
}

#[test]
fn complete_policy_agrees_with_mc() {
    let dir = TempDir::new().unwrap();
    let m = file(
        &dir,
        "m.json",
        r#"{"logic":"CTL","atoms":["p"],"states":[{"id":"s","label":["p"]},{"id":"t","label":[]}],"transitions":[["s","t"],["t","t"]],"root":"s"}"#,
    );
    for phi in ["AG p", "EX ~p", "EF ~p", "AX p"] {
        let a = tabsynth(&[
            "solve",
            "--logic",
            "ctl",
            "--model",
            s(&m),
            "--formula",
            phi,
            "--policy",
            "complete",
        ]);
        let b = tabsynth(&["mc", "--logic", "ctl", "--model", s(&m), "--formula", phi]);
        assert_eq!(a.code, b.code, "{phi}");
    }
}

#[test]
fn trace_and_dot_outputs() {
    let dir = TempDir::new().unwrap();
    let m = file(
        &dir,
        "m.json",
        r#"{"logic":"CTL","atoms":["p","q"],"states":[{"id":"s","label":["p"]},{"id":"t","label":["q"]}],"transitions":[["s","t"]],"root":"s"}"#,
    );
    let dot = dir.path().join("t.dot");
    let o = tabsynth(&[
        "solve",
        "--logic",
        "ctl",
        "--model",
        s(&m),
        "--formula",
        "EX q",
        "--trace",
        "--dot",
        s(&dot),
    ]);
    assert_eq!(o.code, 0);
    for tag in ["SEED", "SR", "NEXT", "PRUNE-PRESTATE"] {
        assert!(
            o.stderr.lines().any(|l| l.starts_with(tag)),
            "{tag} missing:\n{}",
            o.stderr
        );
    }
    let text = std::fs::read_to_string(&dot).unwrap();
    assert!(text.starts_with("digraph tableau {"));
    assert!(text.contains("digraph model {"));
    assert!(
        text.contains("shape=box")
            && text.contains("shape=ellipse")
            && text.contains("origin=\"t\"")
    );
}

#[test]
fn binary_wraps_the_library() {
    let dir = TempDir::new().unwrap();
    let m = file(&dir, "m.json", K_Q);
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_tabsynth"))
        .args([
            "epm",
            "--logic",
            "k",
            "--model",
            s(&m),
            "--formula",
            "[]p",
            "--format",
            "machine",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let direct = tabsynth(&[
        "epm",
        "--logic",
        "k",
        "--model",
        s(&m),
        "--formula",
        "[]p",
        "--format",
        "machine",
    ]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), direct.stdout);
}
