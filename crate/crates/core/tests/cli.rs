use readiness_core::fixtures::six_case_annotated;
use readiness_core::ingest::{write_csv, write_jsonl};
use serde_json::Value;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_readiness"))
        .args(args)
        .env_remove("READINESS_SEED")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn six_case_file(dir: &Path) -> PathBuf {
    let path = dir.join("six.jsonl");
    let mut buf = Vec::new();
    write_jsonl(&six_case_annotated(), &mut buf).unwrap();
    fs::write(&path, buf).unwrap();
    path
}

fn metric<'a>(report: &'a Value, family: &str, name: &str) -> &'a Value {
    &report["reports"][0]["metrics"][family][name]
}

#[test]
fn compute_json_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let input = six_case_file(dir.path());
    let out = run(&[
        "compute",
        "--input",
        input.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let harm = metric(&v, "safety", "ai_harm");
    assert_eq!(
        (harm["numerator"].as_u64(), harm["denominator"].as_u64()),
        (Some(1), Some(6))
    );
    assert_eq!(metric(&v, "outcome", "regret_best")["numerator"], 2);
}

#[test]
fn compute_markdown_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = six_case_file(dir.path());
    let report = dir.path().join("report.md");
    let out = run(&[
        "compute",
        "--input",
        input.to_str().unwrap(),
        "--format",
        "markdown",
        "--out",
        report.to_str().unwrap(),
        "--window",
        "3",
        "--epsilon",
        "0.1",
        "--stability",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(report).unwrap();
    assert!(text.contains("### Safety & Harm (What went wrong?)"));
    assert!(text.contains("| AI-harm | 1/6 | 0.166667 |"));
    assert!(text.contains("calibration window 3, epsilon 0.1, stability 2"));
}

#[test]
fn missing_input_exits_one() {
    let out = run(&["compute", "--input", "/nonexistent/missing.jsonl"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("cannot open /nonexistent/missing.jsonl"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = six_case_file(dir.path());
    let input = input.to_str().unwrap();
    for args in [
        vec![
            "compute",
            "--input",
            input,
            "--group-by",
            "participant,colour",
        ],
        vec!["compute", "--input", input, "--format", "xml"],
        vec!["compute", "--input", input, "--window", "0"],
        vec!["compute", "--input", input, "--map", "m.json"],
        vec!["compute", "--bogus"],
        vec!["frobnicate"],
        vec![],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
        assert!(!stderr(&out).is_empty());
    }
}

#[test]
fn invalid_trace_exits_one_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.jsonl");
    fs::write(
        &path,
        "{\"schema\":\"trace/1\",\"alphabet\":[\"0\",\"1\"]}\n\
         {\"case_id\":\"a\",\"ground_truth\":\"1\",\"human_initial\":\"1\",\"ai_prediction\":\"1\",\"human_final\":\"1\",\"confidence\":1.5}\n",
    )
    .unwrap();
    let out = run(&["check", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        stderr(&out).contains("confidence out of range"),
        "{}",
        stderr(&out)
    );

    fs::write(
        &path,
        "{\"schema\":\"trace/1\",\"alphabet\":[\"0\",\"1\"]}\n{not json\n",
    )
    .unwrap();
    let out = run(&["compute", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn check_accepts_valid_trace() {
    let dir = tempfile::tempdir().unwrap();
    let input = six_case_file(dir.path());
    let out = run(&["check", "--input", input.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok: 6 records"));
}

#[test]
fn csv_with_mapping_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("t.csv");
    let mut buf = Vec::new();
    write_csv(&six_case_annotated(), &mut buf).unwrap();
    let text = String::from_utf8(buf)
        .unwrap()
        .replacen("ground_truth", "label", 1);
    fs::write(&csv_path, text).unwrap();
    let map = dir.path().join("map.json");
    fs::write(
        &map,
        r#"{"case_id":"case_id","ground_truth":"label","human_initial":"human_initial",
            "ai_prediction":"ai_prediction","human_final":"human_final","confidence":"confidence",
            "alphabet":["0","1"]}"#,
    )
    .unwrap();
    let out = run(&[
        "compute",
        "--input",
        csv_path.to_str().unwrap(),
        "--csv",
        "--map",
        map.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(metric(&v, "learning", "calibration_gap")["count"], 6);
    assert_eq!(metric(&v, "safety", "missed_help")["numerator"], 1);
}

#[test]
fn group_by_participant_splits_reports() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("two.jsonl");
    let mut lines = vec!["{\"schema\":\"trace/1\",\"alphabet\":[\"0\",\"1\"]}".to_string()];
    for i in 0..10 {
        lines.push(format!(
            "{{\"case_id\":\"c{i}\",\"ground_truth\":\"1\",\"human_initial\":\"0\",\"ai_prediction\":\"1\",\"human_final\":\"1\",\"participant_id\":\"p{}\"}}",
            i % 2
        ));
    }
    fs::write(&path, lines.join("\n")).unwrap();
    let out = run(&[
        "compute",
        "--input",
        path.to_str().unwrap(),
        "--group-by",
        "participant_id",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 2);
    let total: u64 = reports
        .iter()
        .map(|r| r["coverage"]["records"].as_u64().unwrap())
        .sum();
    assert_eq!(total, 10);
}

#[test]
fn simulate_compute_and_expect_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"n_cases":100000,"p_ai":0.8,"p_h":0.6,"alpha_c":0.9,"alpha_w":0.3,"seed":5}"#,
    )
    .unwrap();
    let trace = dir.path().join("t.jsonl");
    let out = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let out = run(&["compute", "--input", trace.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let out = run(&["expect", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let expected: Value = serde_json::from_slice(&out.stdout).unwrap();
    for (family, name) in [
        ("outcome", "acc_team"),
        ("reliance", "accept_on_correct"),
        ("reliance", "accept_on_wrong"),
        ("safety", "ai_help"),
        ("safety", "ai_harm"),
    ] {
        let got = metric(&report, family, name)["value"].as_f64().unwrap();
        let want = expected[name].as_f64().unwrap();
        assert!((got - want).abs() <= 0.01, "{name}: {got} vs {want}");
    }
}

#[test]
fn seed_override_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"n_cases":200,"p_ai":0.7,"p_h":0.6,"alpha_c":0.8,"alpha_w":0.4}"#,
    )
    .unwrap();
    let sim = |seed: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_readiness"));
        cmd.args(["simulate", "--config", cfg.to_str().unwrap()]);
        match seed {
            Some(s) => cmd.env("READINESS_SEED", s),
            None => cmd.env_remove("READINESS_SEED"),
        };
        cmd.output().unwrap()
    };
    let (a, b, c) = (sim(Some("9")), sim(Some("9")), sim(None));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(sim(Some("nine")).status.code(), Some(2));
}

#[test]
fn expect_refuses_drift() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"n_cases":100,"p_ai":0.7,"p_h":0.6,"alpha_c":0.8,"alpha_w":0.4,
            "drift":[{"start":50,"end":100,"alpha_w":0.1}]}"#,
    )
    .unwrap();
    let out = run(&["expect", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("no closed form under drift"));
}
