use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn model(stem: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../models")
        .join(format!("{stem}.des"))
}

fn run_with(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut argv = vec!["kbsc"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = kbsc_cli::run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn run(args: &[&str]) -> (i32, String, String) {
    run_with(args, "")
}

fn json(args: &[&str]) -> (i32, Value) {
    let (code, out, err) = run(args);
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out} {err}"));
    (code, v)
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn check_exit_codes_follow_the_verdict() {
    let b = model("fixture-b");
    assert_eq!(run(&["check", path(&b)]).0, 0);
    assert_eq!(run(&["check", path(&b), "--condition", "corrected"]).0, 0);
    assert_eq!(run(&["check", path(&b), "--condition", "legacy"]).0, 1);
    assert_eq!(run(&["check", path(&model("symmetric-diamond"))]).0, 1);
    assert_eq!(run(&["check", "/nonexistent.des"]).0, 2);
    assert_eq!(run(&["check", path(&b), "--condition", "nope"]).0, 2);
    assert_eq!(
        run(&["check", path(&b), "--condition", "strong-da", "--relation", "partial"]).0,
        2
    );
}

#[test]
fn check_json_fields() {
    let b = model("fixture-b");
    let (code, v) = json(&["check", path(&b), "--condition", "legacy", "--json"]);
    assert_eq!(code, 1);
    assert_eq!(v["holds"], false);
    assert_eq!(v["counterexample"]["event"], "a");
    assert_eq!(v["counterexample"]["string"], serde_json::json!(["gamma"]));

    let (_, v) = json(&[
        "check",
        path(&b),
        "--condition",
        "legacy",
        "--events",
        "controllable",
        "--json",
    ]);
    assert_eq!(v["counterexample"]["event"], "gamma");
    assert_eq!(v["counterexample"]["string"], serde_json::json!(["gamma", "a"]));

    let (code, v) = json(&["check", path(&model("fixture-c")), "--json"]);
    assert_eq!(code, 0);
    assert_eq!(v["holds"], true);
    assert!(v["counterexample"].is_null());
    assert!(v["defaults"]["gamma"].is_string());

    let (_, v) = json(&["check", path(&model("symmetric-diamond")), "--json"]);
    let cx = &v["counterexample"];
    assert_eq!(cx["event"], "gamma");
    assert_eq!(cx["string"], serde_json::json!([]));
    assert_eq!(cx["conflict"]["needs_enable"]["string"], serde_json::json!(["a"]));
    assert_eq!(cx["conflict"]["needs_disable"]["string"], serde_json::json!([]));
}

#[test]
fn da_and_cp_on_fixture_c() {
    let c = model("fixture-c");
    assert_eq!(run(&["check", path(&c), "--condition", "cp"]).0, 1);
    assert_eq!(run(&["check", path(&c), "--condition", "da"]).0, 0);
    assert_eq!(
        run(&["check", path(&model("fixture-c-mirrored")), "--condition", "da"]).0,
        1
    );
}

#[test]
fn parse_errors_carry_positions() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.des");
    fs::write(&f, "supervisors 1\nevent a\nstate q0 init legal\ntrans q0 a q9\n").unwrap();
    let (code, _, err) = run(&["check", path(&f)]);
    assert_eq!(code, 2);
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn synthesize_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sup");
    let c = model("fixture-c");
    let (code, v) = json(&["synthesize", path(&c), "-o", path(&out), "--json"]);
    assert_eq!(code, 0);
    assert_eq!(v["holds"], true);
    let table = v["supervisors"][0]["table"].as_array().unwrap();
    assert!(table
        .iter()
        .any(|r| r["decision"] == "woff" && r["case"] == "conditional-off"));
    for f in ["supervisor-1.json", "supervisor-2.json", "defaults.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let (code, text, _) = run(&["verify", path(&c), "--supervisors", path(&out)]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("equal"));

    // turn supervisor 1's initial woff into off: after `b` it now contradicts supervisor 2
    let p = out.join("supervisor-1.json");
    let edited = fs::read_to_string(&p).unwrap().replacen("\"woff\"", "\"off\"", 1);
    fs::write(&p, edited).unwrap();
    let (code, v) = json(&["verify", path(&c), "--supervisors", path(&out), "--json"]);
    assert_eq!(code, 1);
    assert_eq!(v["closed_loop"]["equal"], false);
    assert_eq!(
        v["closed_loop"]["error"],
        "control conflict: both on and off were issued on gamma after b"
    );
    assert_eq!(v["oracle"]["violation"]["string"], serde_json::json!(["b"]));
    assert_eq!(v["oracle"]["violation"]["event"], "gamma");

    fs::write(&p, "{\"supervisor\": 1, \"table\": [], \"extra\": 0}").unwrap();
    assert_eq!(run(&["verify", path(&c), "--supervisors", path(&out)]).0, 2);
}

#[test]
fn synthesize_refuses_unsolvable_models() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sup");
    let (code, v) = json(&[
        "synthesize",
        path(&model("symmetric-diamond")),
        "-o",
        path(&out),
        "--json",
    ]);
    assert_eq!(code, 1);
    assert_eq!(v["holds"], false);
    assert_eq!(v["counterexample"]["event"], "gamma");
    assert!(!out.exists());
}

#[test]
fn simulate_refuses_disabled_steps() {
    let script = "events\nstep gamma\nwhy gamma\nstep a\nstep gamma\nestimates\nreset\nquit\n";
    let (code, out, _) = run_with(&["simulate", path(&model("fixture-c"))], script);
    assert_eq!(code, 0);
    assert!(out.contains("gamma: disabled"), "{out}");
    assert!(
        out.contains("refused: gamma is disabled: disabled by supervisor 1 (woff), supervisor 2 (woff)"),
        "{out}"
    );
    assert!(out.contains("woff via K1(ē ⟹ O e)"), "{out}");
    assert!(out.contains("fused disable"), "{out}");
    assert!(out.contains("after a gamma [legal]"), "{out}");
    assert!(out.contains("supervisor 2: {s0,s1,t0,t1}"), "{out}");
}

#[test]
fn simulate_with_stored_supervisors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sup");
    let b = model("fixture-b");
    assert_eq!(run(&["synthesize", path(&b), "-o", path(&out)]).0, 0);
    let (_, text, _) = run_with(
        &["simulate", path(&b), "--supervisors", path(&out)],
        "step gamma\nwhy a\nstep a\nwhy gamma\nstep gamma\n",
    );
    assert!(text.contains("refused: gamma is disabled"), "{text}");
    assert!(text.contains("uncontrollable; always allowed"), "{text}");
    assert!(text.contains("decision: on via K1 e"), "{text}");
    assert!(text.contains("after a gamma [legal]"), "{text}");
}

#[test]
fn dot_export() {
    let (code, out, _) = run(&["export-dot", path(&model("fixture-b"))]);
    assert_eq!(code, 0);
    assert!(out.starts_with("digraph plant"));
    assert!(out.contains("\"q5\" [shape=doublecircle]"));
    assert!(out.contains("\"q2\" [shape=circle]"));
    let (_, out, _) = run(&["export-dot", path(&model("fixture-b")), "--composite"]);
    assert!(
        out.contains("w0 [label=\"q0\\n{q0,q2}\\n{q0,q1,q2,q3,q4,q5}\", peripheries=2]"),
        "{out}"
    );
}

#[test]
fn oracle_modes() {
    let c = model("fixture-c");
    assert_eq!(run(&["oracle", path(&c), "--mode", "condition"]).0, 0);
    assert_eq!(
        run(&["oracle", path(&c), "--mode", "condition", "--condition", "cp"]).0,
        1
    );
    assert_eq!(run(&["oracle", path(&c), "--mode", "solve", "--depth", "6"]).0, 0);
    let (code, v) = json(&["oracle", path(&c), "--mode", "search", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(v["oracle"], true);
    assert_eq!(v["agree"], true);
    assert_eq!(
        run(&["oracle", path(&model("symmetric-diamond")), "--mode", "search"]).0,
        1
    );
    let (code, v) = json(&[
        "oracle",
        "--seed",
        "3",
        "--count",
        "25",
        "--mode",
        "condition",
        "--json",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["disagreements"], 0);
    assert_eq!(
        run(&["oracle", "--seed", "0", "--count", "15", "--mode", "search"]).0,
        0
    );
    assert_eq!(run(&["oracle", "--seed", "0", "--count", "15", "--mode", "solve"]).0, 0);
    assert_eq!(run(&["oracle", path(&c), "--mode", "solve", "--depth", "11"]).0, 2);
    assert_eq!(run(&["oracle", path(&c), "--seed", "1", "--mode", "solve"]).0, 2);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_kbsc");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    let b = model("fixture-b");
    assert_eq!(status(&["check", path(&b)]), Some(0));
    assert_eq!(status(&["check", path(&b), "--condition", "legacy"]), Some(1));
    assert_eq!(status(&["check"]), Some(2));
    assert_eq!(status(&["--version"]), Some(0));
}
