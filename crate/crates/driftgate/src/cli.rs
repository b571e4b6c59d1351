//! Command-line surface for CI jobs and operators.
//!
//! Four subcommands: `diff` compares two schema files under a policy,
//! `validate` infers a schema from JSONL data and checks it against a
//! contract, `infer` prints the inferred schema, and `bench` runs a
//! measurement suite. Exit codes are fixed: 0 for a conforming result,
//! 1 when drift was detected, 2 for usage, parse, or inference errors.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bench::{
    bench_compile, bench_runtime, render_compile_markdown, render_runtime_markdown, BenchConfig,
};
use crate::dataset::read_jsonl;
use crate::policy::{DriftReport, SchemaPolicy};
use crate::runtime::{parse_schema, serialize_schema, validate, RuntimeSchema};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DRIFT: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "driftgate",
    version,
    about = "Schema drift gate: diff schemas, validate datasets, run benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compare two schema files under a policy and report drift
    Diff {
        /// Producer-side schema JSON file
        #[arg(long, value_name = "FILE")]
        left: PathBuf,
        /// Contract-side schema JSON file
        #[arg(long, value_name = "FILE")]
        right: PathBuf,
        /// Comparison policy
        #[arg(long, value_name = "POLICY")]
        policy: String,
        /// Report format
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
    },
    /// Infer a schema from JSONL data and validate it against a contract
    Validate {
        /// JSONL data file, one object per line
        #[arg(long, value_name = "FILE")]
        data: PathBuf,
        /// Contract schema JSON file
        #[arg(long, value_name = "FILE")]
        contract: PathBuf,
        /// Comparison policy
        #[arg(long, value_name = "POLICY")]
        policy: String,
    },
    /// Infer a schema from JSONL data and print it in canonical form
    Infer {
        /// JSONL data file, one object per line
        #[arg(long, value_name = "FILE")]
        data: PathBuf,
    },
    /// Run a benchmark suite and print a markdown table
    Bench {
        /// Suite to run: runtime or compile
        #[arg(long, value_name = "SUITE")]
        suite: String,
        /// Comma-separated pair counts, for example 10,25,50
        #[arg(long, value_name = "N", value_delimiter = ',')]
        sizes: Option<Vec<usize>>,
        /// Write the markdown here and a machine-readable .json sibling
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

/// Drift item as emitted in JSON reports; field for field the same data as
/// the text lines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonDriftItem {
    pub kind: String,
    pub path: String,
    pub expected: String,
    pub actual: String,
    pub message: String,
}

/// Whole-report JSON document; round-trips losslessly through serde.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonReport {
    pub policy: String,
    pub verdict: String,
    pub items: Vec<JsonDriftItem>,
}

impl JsonReport {
    pub fn conforming(policy: SchemaPolicy) -> Self {
        JsonReport {
            policy: policy.cli_name().to_string(),
            verdict: "ok".to_string(),
            items: Vec::new(),
        }
    }

    pub fn from_drift(report: &DriftReport) -> Self {
        JsonReport {
            policy: report.policy.cli_name().to_string(),
            verdict: "drift".to_string(),
            items: report
                .items
                .iter()
                .map(|item| JsonDriftItem {
                    kind: item.kind.token().to_string(),
                    path: item.path.to_string(),
                    expected: item.expected.clone(),
                    actual: item.actual.clone(),
                    message: item.message.clone(),
                })
                .collect(),
        }
    }
}

/// Parses `args` and runs the selected command, writing reports to `stdout`
/// and diagnostics to `stderr`. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{err}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{err}");
                    EXIT_ERROR
                }
            };
        }
    };
    match cli.command {
        Command::Diff {
            left,
            right,
            policy,
            format,
        } => cmd_diff(&left, &right, &policy, format, stdout, stderr),
        Command::Validate {
            data,
            contract,
            policy,
        } => cmd_validate(&data, &contract, &policy, stdout, stderr),
        Command::Infer { data } => cmd_infer(&data, stdout, stderr),
        Command::Bench { suite, sizes, out } => {
            cmd_bench(&suite, sizes, out.as_deref(), stdout, stderr)
        }
    }
}

fn parse_policy(token: &str, stderr: &mut dyn Write) -> Result<SchemaPolicy, i32> {
    SchemaPolicy::from_cli_name(token).ok_or_else(|| {
        let valid: Vec<&str> = SchemaPolicy::ALL.iter().map(|p| p.cli_name()).collect();
        let _ = writeln!(
            stderr,
            "unknown policy '{token}'; valid policies: {}",
            valid.join(", ")
        );
        EXIT_ERROR
    })
}

fn load_schema(path: &Path, stderr: &mut dyn Write) -> Result<RuntimeSchema, i32> {
    let text = fs::read_to_string(path).map_err(|err| {
        let _ = writeln!(stderr, "{}: {err}", path.display());
        EXIT_ERROR
    })?;
    parse_schema(&text).map_err(|err| {
        let _ = writeln!(stderr, "{}: {err}", path.display());
        EXIT_ERROR
    })
}

fn load_dataset(path: &Path, stderr: &mut dyn Write) -> Result<crate::dataset::Dataset, i32> {
    let file = File::open(path).map_err(|err| {
        let _ = writeln!(stderr, "{}: {err}", path.display());
        EXIT_ERROR
    })?;
    read_jsonl(BufReader::new(file)).map_err(|err| {
        let _ = writeln!(stderr, "{}: {err}", path.display());
        EXIT_ERROR
    })
}

fn cmd_diff(
    left: &Path,
    right: &Path,
    policy_token: &str,
    format: ReportFormat,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let policy = match parse_policy(policy_token, stderr) {
        Ok(policy) => policy,
        Err(code) => return code,
    };
    let producer = match load_schema(left, stderr) {
        Ok(schema) => schema,
        Err(code) => return code,
    };
    let contract = match load_schema(right, stderr) {
        Ok(schema) => schema,
        Err(code) => return code,
    };
    let verdict = validate(&producer, &contract, policy);
    match format {
        ReportFormat::Text => {
            let _ = writeln!(stdout, "left (producer): {}", left.display());
            let _ = writeln!(stdout, "right (contract): {}", right.display());
            let _ = writeln!(stdout, "policy: {}", policy.cli_name());
            match verdict {
                Ok(_) => {
                    let _ = writeln!(stdout, "OK");
                    EXIT_OK
                }
                Err(report) => {
                    let _ = writeln!(stdout, "{report}");
                    EXIT_DRIFT
                }
            }
        }
        ReportFormat::Json => {
            let (code, report) = match verdict {
                Ok(_) => (EXIT_OK, JsonReport::conforming(policy)),
                Err(drift) => (EXIT_DRIFT, JsonReport::from_drift(&drift)),
            };
            let rendered =
                serde_json::to_string_pretty(&report).expect("report serialization is infallible");
            let _ = writeln!(stdout, "{rendered}");
            code
        }
    }
}

fn cmd_validate(
    data: &Path,
    contract: &Path,
    policy_token: &str,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let policy = match parse_policy(policy_token, stderr) {
        Ok(policy) => policy,
        Err(code) => return code,
    };
    let contract_schema = match load_schema(contract, stderr) {
        Ok(schema) => schema,
        Err(code) => return code,
    };
    let dataset = match load_dataset(data, stderr) {
        Ok(dataset) => dataset,
        Err(code) => return code,
    };
    match validate(dataset.schema(), &contract_schema, policy) {
        Ok(_) => {
            let _ = writeln!(stdout, "OK");
            EXIT_OK
        }
        Err(report) => {
            let _ = writeln!(stdout, "{report}");
            EXIT_DRIFT
        }
    }
}

fn cmd_infer(data: &Path, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let dataset = match load_dataset(data, stderr) {
        Ok(dataset) => dataset,
        Err(code) => return code,
    };
    let _ = write!(stdout, "{}", serialize_schema(dataset.schema()));
    EXIT_OK
}

fn cmd_bench(
    suite: &str,
    sizes: Option<Vec<usize>>,
    out: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let mut config = BenchConfig::default();
    if let Some(sizes) = sizes {
        config.pair_counts = sizes;
    }
    let rendered = match suite {
        "runtime" => {
            config.warmup_iterations = 3;
            config.measured_iterations = 30;
            bench_runtime(&config).map(|result| {
                (
                    render_runtime_markdown(&result),
                    serde_json::to_string_pretty(&result)
                        .expect("bench result serialization is infallible"),
                )
            })
        }
        "compile" => {
            config.warmup_iterations = 1;
            config.measured_iterations = 2;
            bench_compile(&config).map(|result| {
                (
                    render_compile_markdown(&result),
                    serde_json::to_string_pretty(&result)
                        .expect("bench result serialization is infallible"),
                )
            })
        }
        other => {
            let _ = writeln!(stderr, "unknown suite '{other}'; valid suites: runtime, compile");
            return EXIT_ERROR;
        }
    };
    let (markdown, json) = match rendered {
        Ok(output) => output,
        Err(err) => {
            let _ = writeln!(stderr, "{err}");
            return EXIT_ERROR;
        }
    };
    let _ = write!(stdout, "{markdown}");
    if let Some(out) = out {
        if let Err(err) = fs::write(out, &markdown) {
            let _ = writeln!(stderr, "{}: {err}", out.display());
            return EXIT_ERROR;
        }
        let json_path = out.with_extension("json");
        if let Err(err) = fs::write(&json_path, format!("{json}\n")) {
            let _ = writeln!(stderr, "{}: {err}", json_path.display());
            return EXIT_ERROR;
        }
    }
    EXIT_OK
}
