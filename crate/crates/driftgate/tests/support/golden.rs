//! The golden command-line cases: twenty fixed invocations over checked-in
//! fixtures, each with the exit code the engine itself assigns.

use std::fs;
use std::io::BufReader;
use std::path::PathBuf;

use driftgate::cli::{run, EXIT_DRIFT, EXIT_OK};
use driftgate::dataset::read_jsonl;
use driftgate::runtime::{parse_schema, validate};
use driftgate::SchemaPolicy;

pub fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures/cli")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut stdout = Vec::new();
    let mut stderr = Vec::new();
    let full: Vec<&str> = std::iter::once("driftgate").chain(args.iter().copied()).collect();
    let code = run(full, &mut stdout, &mut stderr);
    (
        code,
        String::from_utf8(stdout).unwrap(),
        String::from_utf8(stderr).unwrap(),
    )
}

pub enum Invocation {
    Diff {
        left: &'static str,
        right: &'static str,
    },
    Validate {
        data: &'static str,
        contract: &'static str,
    },
}

pub struct GoldenCase {
    pub invocation: Invocation,
    pub policy: &'static str,
    pub expected_exit: i32,
}

fn diff(left: &'static str, right: &'static str, policy: &'static str, exit: i32) -> GoldenCase {
    GoldenCase {
        invocation: Invocation::Diff { left, right },
        policy,
        expected_exit: exit,
    }
}

fn validate_case(
    data: &'static str,
    contract: &'static str,
    policy: &'static str,
    exit: i32,
) -> GoldenCase {
    GoldenCase {
        invocation: Invocation::Validate { data, contract },
        policy,
        expected_exit: exit,
    }
}

pub fn golden_cases() -> Vec<GoldenCase> {
    vec![
        diff("user.json", "user.json", "exact", EXIT_OK),
        diff("user.json", "user_reordered.json", "exact", EXIT_OK),
        diff("user.json", "user_reordered.json", "exact-ordered", EXIT_DRIFT),
        diff("user.json", "user_case.json", "exact", EXIT_OK),
        diff("user.json", "user_case.json", "exact-ordered", EXIT_DRIFT),
        diff("user.json", "user_case.json", "exact-ordered-ci", EXIT_OK),
        diff("user.json", "user_case.json", "exact-by-position", EXIT_OK),
        diff("user.json", "user_extra.json", "exact", EXIT_DRIFT),
        diff("user_extra.json", "user.json", "backward", EXIT_OK),
        diff("user.json", "user_default_extra.json", "backward", EXIT_OK),
        diff("user.json", "user_extra.json", "backward", EXIT_DRIFT),
        diff("user.json", "user_extra.json", "forward", EXIT_OK),
        diff("user_extra.json", "user.json", "forward", EXIT_DRIFT),
        diff("user.json", "user_nullability.json", "exact", EXIT_DRIFT),
        diff("user.json", "user_int32.json", "exact", EXIT_DRIFT),
        diff("user.json", "user_int32.json", "full", EXIT_OK),
        validate_case("rows_ok.jsonl", "user.json", "exact", EXIT_OK),
        validate_case("rows_extra.jsonl", "user.json", "backward", EXIT_OK),
        validate_case("rows_extra.jsonl", "user.json", "forward", EXIT_DRIFT),
        validate_case("rows_drift.jsonl", "user.json", "exact", EXIT_DRIFT),
    ]
}

/// What the library itself says about a case, bypassing the command-line
/// layer entirely.
pub fn engine_verdict(case: &GoldenCase) -> bool {
    let policy = SchemaPolicy::from_cli_name(case.policy).unwrap();
    match &case.invocation {
        Invocation::Diff { left, right } => {
            let producer = parse_schema(&fs::read_to_string(fixture(left)).unwrap()).unwrap();
            let contract = parse_schema(&fs::read_to_string(fixture(right)).unwrap()).unwrap();
            validate(&producer, &contract, policy).is_ok()
        }
        Invocation::Validate { data, contract } => {
            let contract = parse_schema(&fs::read_to_string(fixture(contract)).unwrap()).unwrap();
            let file = fs::File::open(fixture(data)).unwrap();
            let dataset = read_jsonl(BufReader::new(file)).unwrap();
            validate(dataset.schema(), &contract, policy).is_ok()
        }
    }
}

pub fn case_args(case: &GoldenCase) -> Vec<String> {
    match &case.invocation {
        Invocation::Diff { left, right } => vec![
            "diff".into(),
            "--left".into(),
            fixture(left),
            "--right".into(),
            fixture(right),
            "--policy".into(),
            case.policy.into(),
        ],
        Invocation::Validate { data, contract } => vec![
            "validate".into(),
            "--data".into(),
            fixture(data),
            "--contract".into(),
            fixture(contract),
            "--policy".into(),
            case.policy.into(),
        ],
    }
}
