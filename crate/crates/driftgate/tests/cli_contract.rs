//! Golden fixture suite for the command-line surface: exit codes must track
//! engine verdicts exactly, and JSON reports must round-trip.

mod support;

use std::process::Command;

use driftgate::cli::{JsonReport, EXIT_DRIFT, EXIT_ERROR, EXIT_OK};
use support::golden::{case_args, engine_verdict, fixture, golden_cases, run_cli, Invocation};

#[test]
fn twenty_golden_cases_match_engine_verdicts() {
    let cases = golden_cases();
    assert_eq!(cases.len(), 20);
    for (index, case) in cases.iter().enumerate() {
        let args = case_args(case);
        let arg_refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let (code, stdout, stderr) = run_cli(&arg_refs);
        assert_eq!(
            code, case.expected_exit,
            "case {index} {:?}: stdout={stdout} stderr={stderr}",
            args
        );
        let from_engine = if engine_verdict(case) { EXIT_OK } else { EXIT_DRIFT };
        assert_eq!(code, from_engine, "case {index} disagrees with the engine");
        if code == EXIT_OK {
            assert!(stdout.contains("OK"), "case {index}: {stdout}");
        } else {
            assert!(stdout.contains(" at "), "case {index} must print drift items: {stdout}");
        }
    }
}

#[test]
fn diff_json_reports_parse_and_round_trip() {
    for case in golden_cases() {
        let Invocation::Diff { .. } = &case.invocation else {
            continue;
        };
        let mut args = case_args(&case);
        args.push("--format".into());
        args.push("json".into());
        let arg_refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let (code, stdout, _) = run_cli(&arg_refs);
        let report: JsonReport = serde_json::from_str(&stdout).expect("stdout must be pure JSON");
        assert_eq!(report.policy, case.policy);
        match code {
            EXIT_OK => {
                assert_eq!(report.verdict, "ok");
                assert!(report.items.is_empty());
            }
            EXIT_DRIFT => {
                assert_eq!(report.verdict, "drift");
                assert!(!report.items.is_empty());
                for item in &report.items {
                    assert_eq!(
                        item.message,
                        format!(
                            "{} at {}: expected {}, actual {}",
                            item.kind, item.path, item.expected, item.actual
                        )
                    );
                }
            }
            other => panic!("unexpected exit {other}"),
        }
        let reparsed: JsonReport =
            serde_json::from_str(&serde_json::to_string_pretty(&report).unwrap()).unwrap();
        assert_eq!(reparsed, report);
    }
}

#[test]
fn error_paths_exit_two() {
    let user = fixture("user.json");
    let bad = fixture("bad_syntax.json");
    let (code, _, stderr) =
        run_cli(&["diff", "--left", &user, "--right", &bad, "--policy", "exact"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(stderr.contains("bad_syntax.json"));

    let (code, _, stderr) =
        run_cli(&["diff", "--left", &user, "--right", &user, "--policy", "backwards"]);
    assert_eq!(code, EXIT_ERROR);
    assert!(stderr.contains("valid policies"));

    let rows_bad = fixture("rows_bad.jsonl");
    let (code, _, stderr) = run_cli(&[
        "validate", "--data", &rows_bad, "--contract", &user, "--policy", "exact",
    ]);
    assert_eq!(code, EXIT_ERROR);
    assert!(stderr.contains("line 2"), "needs line context: {stderr}");

    let rows_allnull = fixture("rows_allnull.jsonl");
    let (code, _, stderr) = run_cli(&[
        "validate", "--data", &rows_allnull, "--contract", &user, "--policy", "exact",
    ]);
    assert_eq!(code, EXIT_ERROR);
    assert!(stderr.contains("AllNull") && stderr.contains("ghost"), "{stderr}");

    let rows_empty = fixture("rows_empty.jsonl");
    let (code, _, stderr) = run_cli(&["infer", "--data", &rows_empty]);
    assert_eq!(code, EXIT_ERROR);
    assert!(stderr.contains("no records"));

    let (code, _, _) = run_cli(&["diff", "--left", "/nonexistent.json", "--right", &user, "--policy", "exact"]);
    assert_eq!(code, EXIT_ERROR);
}

#[test]
fn real_binary_reports_the_same_exit_codes() {
    let binary = env!("CARGO_BIN_EXE_driftgate");
    let user = fixture("user.json");
    let extra = fixture("user_extra.json");

    let ok = Command::new(binary)
        .args(["diff", "--left", &user, "--right", &user, "--policy", "exact"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("OK"));

    let drift = Command::new(binary)
        .args(["diff", "--left", &user, "--right", &extra, "--policy", "exact"])
        .output()
        .unwrap();
    assert_eq!(drift.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&drift.stdout).contains("MissingField"));

    let usage = Command::new(binary)
        .args(["diff", "--left", &user, "--right", &user, "--policy", "nope"])
        .output()
        .unwrap();
    assert_eq!(usage.status.code(), Some(2));
}
