//! Benchmark harness for the two enforcement layers.
//!
//! The compile suite measures the wall-clock cost of running the gate inside
//! a generated package's build script, against the same package with an empty
//! build script. The runtime suite measures nanoseconds per comparison for
//! the two policy comparators and the two reimplemented baselines over a
//! deterministic corpus of conforming schema pairs.
//!
//! Reference snapshots recorded on two environments ship alongside the
//! measured numbers for context. They are environment dependent and are never
//! used as a pass or fail tolerance; the one property the suite asserts is
//! structural (the unordered comparator does strictly more work than the
//! by-position one).

use std::collections::HashSet;
use std::io;
use std::time::{Duration, Instant};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gate::project::{build_gate_project, clean_gate_project, write_gate_project};
use crate::gate::{derive_shape, TypeDescriptor, TypeRef};
use crate::policy::SchemaPolicy;
use crate::runtime::{
    baseline_ignore_case_and_nullability, baseline_structurally, schema_for, validate,
    RuntimeSchema,
};
use crate::shape::{fingerprint, PrimitiveKind, ShapeNode};

/// Knobs for both suites. The seed fixes pair generation completely, so two
/// runs with one config produce byte-identical corpora.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub pair_counts: Vec<usize>,
    pub schema_width: usize,
    pub nesting_depth: usize,
    pub warmup_iterations: usize,
    pub measured_iterations: usize,
    pub seed: u64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            pair_counts: vec![10, 25, 50],
            schema_width: 8,
            nesting_depth: 2,
            warmup_iterations: 3,
            measured_iterations: 30,
            seed: 42,
        }
    }
}

impl BenchConfig {
    fn check(&self) -> Result<(), BenchError> {
        let all_positive = !self.pair_counts.is_empty()
            && self.pair_counts.iter().all(|&n| n > 0)
            && self.schema_width > 0
            && self.measured_iterations > 0;
        if all_positive {
            Ok(())
        } else {
            Err(BenchError::InvalidConfig)
        }
    }
}

/// Where a result was measured.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Environment {
    pub os: String,
    pub arch: String,
}

pub fn environment() -> Environment {
    Environment {
        os: std::env::consts::OS.to_string(),
        arch: std::env::consts::ARCH.to_string(),
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("bench config values must be positive and sizes non-empty")]
    InvalidConfig,
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("gate project build failed:\n{log}")]
    BuildFailed { log: String },
}

/// One timed comparator in the runtime suite.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuntimeRow {
    pub benchmark: String,
    pub mean_ns: f64,
    pub median_ns: f64,
    pub std_dev_ns: f64,
}

/// Output of [`bench_runtime`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuntimeBenchResult {
    pub config: BenchConfig,
    pub environment: Environment,
    pub corpus_pairs: usize,
    pub corpus_digest: u64,
    pub rows: Vec<RuntimeRow>,
    pub unordered_over_ignore_case: f64,
}

/// One corpus size in the compile suite.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompileRow {
    pub pairs: usize,
    pub with_gate_s: f64,
    pub without_gate_s: f64,
    pub delta_s: f64,
    pub delta_pct: f64,
}

/// Output of [`bench_compile`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompileBenchResult {
    pub config: BenchConfig,
    pub environment: Environment,
    pub corpus_digest: u64,
    pub rows: Vec<CompileRow>,
}

/// Canonical row labels, in table order.
pub const RUNTIME_ROW_NAMES: [&str; 4] = [
    "By-position",
    "Unordered exact",
    "Baseline ignore-case",
    "Baseline structural",
];

/// Recorded snapshots of the compile suite on the two environments this
/// project keeps for comparison: (pairs, macOS arm64 delta s, macOS arm64
/// delta %, Ubuntu x86_64 delta s, Ubuntu x86_64 delta %).
pub const COMPILE_REFERENCE: [(usize, f64, f64, f64, f64); 3] = [
    (10, 0.270, 11.8, 0.847, 12.6),
    (25, 0.397, 13.5, 1.000, 11.1),
    (50, 0.513, 13.9, 1.880, 16.6),
];

/// Recorded snapshots of the runtime suite: (row, macOS arm64 ns, Ubuntu
/// x86_64 ns).
pub const RUNTIME_REFERENCE: [(&str, f64, f64); 4] = [
    ("By-position", 116.82, 180.55),
    ("Unordered exact", 4736.41, 8149.74),
    ("Baseline ignore-case", 278.92, 331.42),
    ("Baseline structural", 332.13, 380.36),
];

/// Recorded band for unordered-exact over baseline-ignore-case.
pub const RUNTIME_REFERENCE_RATIO_BAND: (f64, f64) = (17.0, 25.0);

const NAME_WORDS: [&str; 16] = [
    "id", "user", "name", "amount", "tag", "attr", "event", "ts", "score", "code", "flag", "note",
    "key", "val", "ord", "region",
];

/// Generates one conforming producer and contract descriptor pair.
///
/// The producer is a record of `width` fields per level: one nested record
/// while `depth` levels remain, one sequence field, one mapping field, and
/// primitives for the rest. The contract is the same structure with every
/// field name case-flipped, in the same order, so the pair conforms under the
/// unordered case-insensitive policy and under by-position matching alike.
/// Fully deterministic in `(seed, width, depth)`.
pub fn gen_schema_pair(seed: u64, width: usize, depth: usize) -> (TypeDescriptor, TypeDescriptor) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let producer = gen_record(&mut rng, width, depth, 0);
    let contract = flip_descriptor(&producer);
    (producer, contract)
}

fn gen_record(rng: &mut ChaCha8Rng, width: usize, depth: usize, level: usize) -> TypeDescriptor {
    let mut descriptor = TypeDescriptor::new(format!("Generated{level}"));
    let mut used: HashSet<String> = HashSet::with_capacity(width);
    for slot in 0..width {
        let name = fresh_name(rng, &mut used);
        let ty = match slot {
            0 if depth > 0 => TypeRef::record(gen_record(rng, width, depth - 1, level + 1)),
            1 => {
                let element = TypeRef::primitive(random_kind(rng));
                if rng.random_bool(0.5) {
                    TypeRef::sequence(TypeRef::optional(element))
                } else {
                    TypeRef::sequence(element)
                }
            }
            2 => TypeRef::mapping(
                TypeRef::primitive(PrimitiveKind::String),
                TypeRef::primitive(random_kind(rng)),
            ),
            _ => {
                let primitive = TypeRef::primitive(random_kind(rng));
                if rng.random_bool(0.25) {
                    TypeRef::optional(primitive)
                } else {
                    primitive
                }
            }
        };
        descriptor = if rng.random_bool(0.2) {
            descriptor.field_with_default(name, ty)
        } else {
            descriptor.field(name, ty)
        };
    }
    descriptor
}

fn fresh_name(rng: &mut ChaCha8Rng, used: &mut HashSet<String>) -> String {
    loop {
        let a = NAME_WORDS[rng.random_range(0..NAME_WORDS.len())];
        let b = NAME_WORDS[rng.random_range(0..NAME_WORDS.len())];
        let candidate = format!("{a}_{b}{}", rng.random_range(0..10u8));
        if used.insert(candidate.clone()) {
            return candidate;
        }
    }
}

fn random_kind(rng: &mut ChaCha8Rng) -> PrimitiveKind {
    const POOL: [PrimitiveKind; 5] = [
        PrimitiveKind::Int64,
        PrimitiveKind::String,
        PrimitiveKind::Boolean,
        PrimitiveKind::Float64,
        PrimitiveKind::Timestamp,
    ];
    POOL[rng.random_range(0..POOL.len())]
}

fn flip_descriptor(descriptor: &TypeDescriptor) -> TypeDescriptor {
    let mut flipped = TypeDescriptor::new(format!("{}Contract", descriptor.name));
    for field in &descriptor.fields {
        let name = flip_case(&field.name);
        let ty = flip_type(&field.ty);
        flipped = if field.has_default {
            flipped.field_with_default(name, ty)
        } else {
            flipped.field(name, ty)
        };
    }
    flipped
}

fn flip_type(ty: &TypeRef) -> TypeRef {
    match ty {
        TypeRef::Primitive(kind) => TypeRef::Primitive(*kind),
        TypeRef::Optional(inner) => TypeRef::optional(flip_type(inner)),
        TypeRef::Sequence(element) => TypeRef::sequence(flip_type(element)),
        TypeRef::Mapping { key, value } => TypeRef::mapping(flip_type(key), flip_type(value)),
        TypeRef::Record(descriptor) => TypeRef::record(flip_descriptor(descriptor)),
    }
}

fn flip_case(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_lowercase() {
                c.to_ascii_uppercase()
            } else {
                c.to_ascii_lowercase()
            }
        })
        .collect()
}

fn corpus(config: &BenchConfig, pairs: usize) -> Vec<(TypeDescriptor, TypeDescriptor)> {
    (0..pairs)
        .map(|i| {
            gen_schema_pair(
                config.seed.wrapping_add((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
                config.schema_width,
                config.nesting_depth,
            )
        })
        .collect()
}

fn shapes_of(pairs: &[(TypeDescriptor, TypeDescriptor)]) -> Vec<(ShapeNode, ShapeNode)> {
    pairs
        .iter()
        .map(|(p, c)| {
            (
                derive_shape(p).expect("generated descriptors are always supported"),
                derive_shape(c).expect("generated descriptors are always supported"),
            )
        })
        .collect()
}

fn corpus_digest(shapes: &[(ShapeNode, ShapeNode)]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for (producer, contract) in shapes {
        for print in [fingerprint(producer), fingerprint(contract)] {
            for byte in print.to_le_bytes() {
                hash ^= u64::from(byte);
                hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
    }
    hash
}

/// Times the four comparators over the generated corpus.
///
/// Warmup batches run first; each measured batch is sized to exceed one
/// millisecond of monotonic wall clock so timer resolution is negligible.
pub fn bench_runtime(config: &BenchConfig) -> Result<RuntimeBenchResult, BenchError> {
    config.check()?;
    let pairs = *config
        .pair_counts
        .iter()
        .max()
        .expect("config check guarantees at least one size");
    let descriptor_pairs = corpus(config, pairs);
    let shapes = shapes_of(&descriptor_pairs);
    let digest = corpus_digest(&shapes);
    let schemas: Vec<(RuntimeSchema, RuntimeSchema)> = shapes
        .iter()
        .map(|(p, c)| (schema_for(p), schema_for(c)))
        .collect();

    let run = |policy: SchemaPolicy| {
        let schemas = &schemas;
        move || {
            for (actual, contract) in schemas {
                std::hint::black_box(validate(actual, contract, policy).is_ok());
            }
        }
    };
    let by_position = measure(run(SchemaPolicy::ExactByPosition), config, schemas.len());
    let unordered = measure(run(SchemaPolicy::Exact), config, schemas.len());
    let ignore_case = measure(
        || {
            for (actual, contract) in &schemas {
                std::hint::black_box(baseline_ignore_case_and_nullability(actual, contract));
            }
        },
        config,
        schemas.len(),
    );
    let structural = measure(
        || {
            for (actual, contract) in &schemas {
                std::hint::black_box(baseline_structurally(actual, contract));
            }
        },
        config,
        schemas.len(),
    );

    let stats = [by_position, unordered, ignore_case, structural];
    let rows = RUNTIME_ROW_NAMES
        .iter()
        .zip(stats.iter())
        .map(|(name, s)| RuntimeRow {
            benchmark: name.to_string(),
            mean_ns: s.mean,
            median_ns: s.median,
            std_dev_ns: s.std_dev,
        })
        .collect();
    Ok(RuntimeBenchResult {
        config: config.clone(),
        environment: environment(),
        corpus_pairs: pairs,
        corpus_digest: digest,
        rows,
        unordered_over_ignore_case: stats[1].mean / stats[2].mean,
    })
}

struct Stats {
    mean: f64,
    median: f64,
    std_dev: f64,
}

fn measure(mut op: impl FnMut(), config: &BenchConfig, ops_per_call: usize) -> Stats {
    let mut batch: usize = 1;
    loop {
        let start = Instant::now();
        for _ in 0..batch {
            op();
        }
        if start.elapsed() >= Duration::from_millis(1) || batch >= (1 << 20) {
            break;
        }
        batch *= 2;
    }
    for _ in 0..config.warmup_iterations {
        for _ in 0..batch {
            op();
        }
    }
    let mut samples = Vec::with_capacity(config.measured_iterations);
    for _ in 0..config.measured_iterations {
        let start = Instant::now();
        for _ in 0..batch {
            op();
        }
        let elapsed = start.elapsed().as_nanos() as f64;
        samples.push(elapsed / (batch * ops_per_call) as f64);
    }
    stats_of(&mut samples)
}

fn stats_of(samples: &mut [f64]) -> Stats {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    samples.sort_by(|a, b| a.partial_cmp(b).expect("timings are finite"));
    let median = if samples.len() % 2 == 1 {
        samples[samples.len() / 2]
    } else {
        (samples[samples.len() / 2 - 1] + samples[samples.len() / 2]) / 2.0
    };
    let variance = if samples.len() > 1 {
        samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Stats {
        mean,
        median,
        std_dev: variance.sqrt(),
    }
}

/// Builds the generated gate packages with and without assertions and
/// reports the wall-clock delta per corpus size.
///
/// Every timed build is a clean build of the leaf package against a shared
/// dependency cache; `warmup_iterations` untimed builds precede
/// `measured_iterations` timed ones for each variant.
pub fn bench_compile(config: &BenchConfig) -> Result<CompileBenchResult, BenchError> {
    config.check()?;
    let workdir = tempfile::tempdir()?;
    let mut rows = Vec::with_capacity(config.pair_counts.len());
    let mut digest = 0u64;
    for &pairs in &config.pair_counts {
        let descriptor_pairs = corpus(config, pairs);
        digest = corpus_digest(&shapes_of(&descriptor_pairs));

        let with_dir = workdir.path().join(format!("with-{pairs}"));
        let with_pkg = format!("gatebench-with-{pairs}");
        write_gate_project(&with_dir, &with_pkg, &gate_build_script(&descriptor_pairs))?;

        let without_dir = workdir.path().join(format!("without-{pairs}"));
        let without_pkg = format!("gatebench-none-{pairs}");
        write_gate_project(&without_dir, &without_pkg, "fn main() {}\n")?;

        let without_gate_s = timed_builds(&without_dir, &without_pkg, config)?;
        let with_gate_s = timed_builds(&with_dir, &with_pkg, config)?;
        let delta_s = with_gate_s - without_gate_s;
        rows.push(CompileRow {
            pairs,
            with_gate_s,
            without_gate_s,
            delta_s,
            delta_pct: delta_s / without_gate_s * 100.0,
        });
    }
    Ok(CompileBenchResult {
        config: config.clone(),
        environment: environment(),
        corpus_digest: digest,
        rows,
    })
}

fn timed_builds(
    dir: &std::path::Path,
    package: &str,
    config: &BenchConfig,
) -> Result<f64, BenchError> {
    for _ in 0..config.warmup_iterations.max(1) {
        clean_gate_project(dir, package)?;
        let outcome = build_gate_project(dir)?;
        if !outcome.success {
            return Err(BenchError::BuildFailed { log: outcome.log });
        }
    }
    let mut total = 0.0;
    for _ in 0..config.measured_iterations {
        clean_gate_project(dir, package)?;
        let start = Instant::now();
        let outcome = build_gate_project(dir)?;
        let elapsed = start.elapsed().as_secs_f64();
        if !outcome.success {
            return Err(BenchError::BuildFailed { log: outcome.log });
        }
        total += elapsed;
    }
    Ok(total / config.measured_iterations as f64)
}

fn gate_build_script(pairs: &[(TypeDescriptor, TypeDescriptor)]) -> String {
    let mut out = String::new();
    out.push_str("use driftgate::gate::{static_assert_conforms, TypeDescriptor, TypeRef};\n");
    out.push_str("use driftgate::{PrimitiveKind, SchemaPolicy};\n\n");
    out.push_str("fn main() {\n");
    for (producer, contract) in pairs {
        out.push_str("    {\n");
        out.push_str(&format!(
            "        let producer = {};\n",
            descriptor_code(producer)
        ));
        out.push_str(&format!(
            "        let contract = {};\n",
            descriptor_code(contract)
        ));
        out.push_str(
            "        if let Err(failure) = static_assert_conforms(&producer, &contract, SchemaPolicy::Exact) {\n",
        );
        out.push_str("            eprintln!(\"{failure}\");\n");
        out.push_str("            std::process::exit(1);\n");
        out.push_str("        }\n");
        out.push_str("    }\n");
    }
    out.push_str("}\n");
    out
}

fn descriptor_code(descriptor: &TypeDescriptor) -> String {
    let mut out = format!("TypeDescriptor::new({:?})", descriptor.name);
    for field in &descriptor.fields {
        let method = if field.has_default {
            "field_with_default"
        } else {
            "field"
        };
        out.push_str(&format!(
            ".{method}({:?}, {})",
            field.name,
            type_ref_code(&field.ty)
        ));
    }
    out
}

fn type_ref_code(ty: &TypeRef) -> String {
    match ty {
        TypeRef::Primitive(kind) => format!("TypeRef::primitive(PrimitiveKind::{kind:?})"),
        TypeRef::Optional(inner) => format!("TypeRef::optional({})", type_ref_code(inner)),
        TypeRef::Sequence(element) => format!("TypeRef::sequence({})", type_ref_code(element)),
        TypeRef::Mapping { key, value } => format!(
            "TypeRef::mapping({}, {})",
            type_ref_code(key),
            type_ref_code(value)
        ),
        TypeRef::Record(descriptor) => format!("TypeRef::record({})", descriptor_code(descriptor)),
    }
}

/// Markdown table for the runtime suite, followed by the recorded reference
/// snapshots.
pub fn render_runtime_markdown(result: &RuntimeBenchResult) -> String {
    let mut out = String::new();
    out.push_str("# Runtime comparator averages\n\n");
    out.push_str("| Benchmark | Mean (ns) | Median (ns) | Std dev (ns) |\n");
    out.push_str("|:----------|----------:|------------:|-------------:|\n");
    for row in &result.rows {
        out.push_str(&format!(
            "| {} | {:.2} | {:.2} | {:.2} |\n",
            row.benchmark, row.mean_ns, row.median_ns, row.std_dev_ns
        ));
    }
    out.push_str(&format!(
        "\nRatio unordered exact / baseline ignore-case: {:.1}x.\n",
        result.unordered_over_ignore_case
    ));
    out.push_str(&format!(
        "\nMethodology: {} warmup and {} measured batches per comparator, batches sized above 1 ms of monotonic clock; corpus of {} conforming pairs (width {}, depth {}, seed {}, digest {:016x}).\n",
        result.config.warmup_iterations,
        result.config.measured_iterations,
        result.corpus_pairs,
        result.config.schema_width,
        result.config.nesting_depth,
        result.config.seed,
        result.corpus_digest
    ));
    out.push_str(&format!(
        "Environment: {} {}.\n",
        result.environment.os, result.environment.arch
    ));
    out.push_str(
        "\nRecorded reference snapshots (environment dependent, not a tolerance):\n\n",
    );
    out.push_str("| Benchmark | macOS arm64 (ns) | Ubuntu x86_64 (ns) |\n");
    out.push_str("|:----------|-----------------:|-------------------:|\n");
    for (name, local, hosted) in RUNTIME_REFERENCE {
        out.push_str(&format!("| {name} | {local:.2} | {hosted:.2} |\n"));
    }
    out.push_str(&format!(
        "\nRecorded ratio band for unordered exact over baseline ignore-case: {:.0}-{:.0}x.\n",
        RUNTIME_REFERENCE_RATIO_BAND.0, RUNTIME_REFERENCE_RATIO_BAND.1
    ));
    out
}

/// Markdown table for the compile suite, followed by the recorded reference
/// snapshots.
pub fn render_compile_markdown(result: &CompileBenchResult) -> String {
    let mut out = String::new();
    out.push_str("# Compile-time overhead\n\n");
    out.push_str("| Pairs | With gate (s) | Without gate (s) | Delta (s) | Delta (%) |\n");
    out.push_str("|------:|--------------:|-----------------:|----------:|----------:|\n");
    for row in &result.rows {
        out.push_str(&format!(
            "| {} | {:.3} | {:.3} | {:+.3} | {:.1} |\n",
            row.pairs, row.with_gate_s, row.without_gate_s, row.delta_s, row.delta_pct
        ));
    }
    out.push_str(&format!(
        "\nMethodology: clean builds of the generated package against a shared dependency cache; {} warmup and {} measured builds per variant; monotonic wall clock; corpus width {}, depth {}, seed {}, digest {:016x}.\n",
        result.config.warmup_iterations.max(1),
        result.config.measured_iterations,
        result.config.schema_width,
        result.config.nesting_depth,
        result.config.seed,
        result.corpus_digest
    ));
    out.push_str(&format!(
        "Environment: {} {}.\n",
        result.environment.os, result.environment.arch
    ));
    out.push_str(
        "\nRecorded reference snapshots (environment dependent, not a tolerance):\n\n",
    );
    out.push_str("| Pairs | macOS arm64 (s) | macOS arm64 (%) | Ubuntu x86_64 (s) | Ubuntu x86_64 (%) |\n");
    out.push_str("|------:|----------------:|----------------:|------------------:|------------------:|\n");
    for (pairs, local_s, local_pct, hosted_s, hosted_pct) in COMPILE_REFERENCE {
        out.push_str(&format!(
            "| {pairs} | {local_s:+.3} | {local_pct:.1} | {hosted_s:+.3} | {hosted_pct:.1} |\n"
        ));
    }
    out
}
