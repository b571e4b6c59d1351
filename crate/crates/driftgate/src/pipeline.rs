//! Typestate pipeline builder joining the two enforcement layers.
//!
//! A pipeline is assembled as source, then any mix of transforms and sinks,
//! and only a pipeline with at least one sink can run. The progression is
//! encoded in marker types, so adding a transform before a source or running
//! a sink-less pipeline does not compile. Attaching a sink demands a
//! [`Witness`], and the fingerprints inside it are re-verified against the
//! builder's current output shape and the sink contract, so a witness minted
//! for some other pair is rejected even if a caller smuggles one in.
//!
//! Running the pipeline is where the runtime layer takes over: every
//! transform is followed by a schema pin on the data it actually produced,
//! and every sink validates the final schema under its own policy before a
//! single byte is written.

use std::fmt;
use std::io;
use std::marker::PhantomData;

use thiserror::Error;

use crate::dataset::{Dataset, DatasetError};
use crate::policy::{DriftReport, SchemaPolicy, Witness};
use crate::runtime::{schema_for, validate};
use crate::shape::{canonicalize, fingerprint, ShapeError, ShapeErrorKind, ShapeNode, StructuralPath};

/// Marker: no source attached yet.
pub struct Empty(());

/// Marker: source attached, no sink yet.
pub struct Sourced(());

/// Marker: source and at least one sink attached; the pipeline can run.
pub struct Sinked(());

type Reader = Box<dyn Fn() -> Result<Dataset, DatasetError>>;
type TransformFn = Box<dyn Fn(Dataset) -> Dataset>;
type WriterFn = Box<dyn FnMut(&Dataset) -> io::Result<usize>>;

struct TransformStage {
    function: TransformFn,
    declared_out: ShapeNode,
}

struct SinkStage {
    writer: WriterFn,
    contract: ShapeNode,
    policy: SchemaPolicy,
}

/// Pipeline under construction; the `State` parameter tracks which stages are
/// legal next.
pub struct Pipeline<State> {
    reader: Option<Reader>,
    current_out_shape: Option<ShapeNode>,
    transforms: Vec<TransformStage>,
    sinks: Vec<SinkStage>,
    _state: PhantomData<State>,
}

impl<State> fmt::Debug for Pipeline<State> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Pipeline")
            .field("has_source", &self.reader.is_some())
            .field("transforms", &self.transforms.len())
            .field("sinks", &self.sinks.len())
            .finish_non_exhaustive()
    }
}

/// Rejection of a sink at attach time.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AttachError {
    /// The supplied witness does not bind this producer shape, contract
    /// shape, and policy; it is stale or was minted for a different pair.
    #[error("WitnessMismatch: {detail}")]
    WitnessMismatch { detail: String },
    #[error("contract shape rejected: {0}")]
    Shape(ShapeError),
}

/// Outcome of one mid-pipeline schema pin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PinOutcome {
    Passed,
    Failed(DriftReport),
}

/// Outcome of one sink.
#[derive(Debug, Clone)]
pub enum SinkOutcome {
    /// Pin passed; the writer ran and reported this many rows.
    Written { rows: usize },
    /// Pin failed; nothing was written.
    Rejected(DriftReport),
    /// Pin passed but the writer itself failed.
    WriteFailed { error: String },
    /// An earlier stage aborted the run before this sink was evaluated.
    Skipped,
}

/// How a run ended.
#[derive(Debug, Clone)]
pub enum RunStatus {
    /// Source and all transform pins succeeded; every sink was evaluated.
    Completed,
    /// The source reader failed; no transform or sink ran.
    AbortedAtSource { error: String },
    /// A transform's output schema violated its declared shape; data past
    /// this point has no trusted schema, so remaining stages were skipped.
    AbortedAtTransform { index: usize, report: DriftReport },
}

/// Full account of a pipeline run.
#[derive(Debug)]
pub struct RunReport {
    pub status: RunStatus,
    /// One entry per transform that executed, in order.
    pub transform_pins: Vec<PinOutcome>,
    /// One entry per attached sink, in attach order.
    pub sinks: Vec<SinkOutcome>,
}

impl RunReport {
    pub fn completed(&self) -> bool {
        matches!(self.status, RunStatus::Completed)
    }

    pub fn rows_written(&self) -> usize {
        self.sinks
            .iter()
            .map(|s| match s {
                SinkOutcome::Written { rows } => *rows,
                _ => 0,
            })
            .sum()
    }
}

/// Starts an empty pipeline.
pub fn new_pipeline() -> Pipeline<Empty> {
    Pipeline {
        reader: None,
        current_out_shape: None,
        transforms: Vec::new(),
        sinks: Vec::new(),
        _state: PhantomData,
    }
}

impl Default for Pipeline<Empty> {
    fn default() -> Self {
        new_pipeline()
    }
}

impl<State> Pipeline<State> {
    fn cast<Next>(self) -> Pipeline<Next> {
        Pipeline {
            reader: self.reader,
            current_out_shape: self.current_out_shape,
            transforms: self.transforms,
            sinks: self.sinks,
            _state: PhantomData,
        }
    }

    /// Declared output shape of the most recent stage.
    pub fn current_out_shape(&self) -> Option<&ShapeNode> {
        self.current_out_shape.as_ref()
    }

    fn push_transform<F>(&mut self, function: F, declared: ShapeNode)
    where
        F: Fn(Dataset) -> Dataset + 'static,
    {
        self.transforms.push(TransformStage {
            function: Box::new(function),
            declared_out: declared.clone(),
        });
        self.current_out_shape = Some(declared);
    }

    fn push_sink<W>(
        &mut self,
        writer: W,
        contract_shape: &ShapeNode,
        policy: SchemaPolicy,
        witness: Witness,
    ) -> Result<(), AttachError>
    where
        W: FnMut(&Dataset) -> io::Result<usize> + 'static,
    {
        let contract = canonical_record(contract_shape).map_err(AttachError::Shape)?;
        let producer = self
            .current_out_shape
            .as_ref()
            .expect("sinks attach only after a source");
        let mut mismatches = Vec::new();
        if witness.producer_fingerprint() != fingerprint(producer) {
            mismatches.push("producer fingerprint does not match the current output shape");
        }
        if witness.contract_fingerprint() != fingerprint(&contract) {
            mismatches.push("contract fingerprint does not match the sink contract");
        }
        if witness.policy() != policy {
            mismatches.push("policy does not match the one the witness was minted under");
        }
        if !mismatches.is_empty() {
            return Err(AttachError::WitnessMismatch {
                detail: mismatches.join("; "),
            });
        }
        self.sinks.push(SinkStage {
            writer: Box::new(writer),
            contract,
            policy,
        });
        Ok(())
    }
}

impl Pipeline<Empty> {
    /// Attaches the single source together with its declared shape.
    pub fn source<R>(
        mut self,
        reader: R,
        declared_shape: &ShapeNode,
    ) -> Result<Pipeline<Sourced>, ShapeError>
    where
        R: Fn() -> Result<Dataset, DatasetError> + 'static,
    {
        let declared = canonical_record(declared_shape)?;
        self.reader = Some(Box::new(reader));
        self.current_out_shape = Some(declared);
        Ok(self.cast())
    }
}

impl Pipeline<Sourced> {
    /// Appends a transform with its declared output shape. At run time the
    /// schema of the data the transform actually produced is pinned against
    /// this declaration with the default unordered case-insensitive policy.
    pub fn transform<F>(
        mut self,
        function: F,
        declared_out_shape: &ShapeNode,
    ) -> Result<Pipeline<Sourced>, ShapeError>
    where
        F: Fn(Dataset) -> Dataset + 'static,
    {
        let declared = canonical_record(declared_out_shape)?;
        self.push_transform(function, declared);
        Ok(self)
    }

    /// Attaches a sink, consuming the build-time evidence for it.
    pub fn add_sink<W>(
        mut self,
        writer: W,
        contract_shape: &ShapeNode,
        policy: SchemaPolicy,
        witness: Witness,
    ) -> Result<Pipeline<Sinked>, AttachError>
    where
        W: FnMut(&Dataset) -> io::Result<usize> + 'static,
    {
        self.push_sink(writer, contract_shape, policy, witness)?;
        Ok(self.cast())
    }
}

impl Pipeline<Sinked> {
    /// Appends a transform after a sink has already been attached.
    pub fn transform<F>(
        mut self,
        function: F,
        declared_out_shape: &ShapeNode,
    ) -> Result<Pipeline<Sinked>, ShapeError>
    where
        F: Fn(Dataset) -> Dataset + 'static,
    {
        let declared = canonical_record(declared_out_shape)?;
        self.push_transform(function, declared);
        Ok(self)
    }

    /// Attaches another sink; sinks are independent of each other at run
    /// time.
    pub fn add_sink<W>(
        mut self,
        writer: W,
        contract_shape: &ShapeNode,
        policy: SchemaPolicy,
        witness: Witness,
    ) -> Result<Pipeline<Sinked>, AttachError>
    where
        W: FnMut(&Dataset) -> io::Result<usize> + 'static,
    {
        self.push_sink(writer, contract_shape, policy, witness)?;
        Ok(self)
    }

    /// Executes the pipeline: read, transform with pins, then per-sink
    /// validate-before-write. Failures are captured in the report, never
    /// raised past it.
    pub fn run(mut self) -> RunReport {
        let mut transform_pins = Vec::with_capacity(self.transforms.len());
        let skipped = |sinks: &[SinkStage]| sinks.iter().map(|_| SinkOutcome::Skipped).collect();

        let reader = self.reader.as_ref().expect("sourced pipelines have a reader");
        let mut dataset = match reader() {
            Ok(dataset) => dataset,
            Err(error) => {
                return RunReport {
                    status: RunStatus::AbortedAtSource {
                        error: error.to_string(),
                    },
                    transform_pins,
                    sinks: skipped(&self.sinks),
                }
            }
        };

        for (index, stage) in self.transforms.iter().enumerate() {
            dataset = (stage.function)(dataset);
            let declared = schema_for(&stage.declared_out);
            match validate(dataset.schema(), &declared, SchemaPolicy::Exact) {
                Ok(_) => transform_pins.push(PinOutcome::Passed),
                Err(report) => {
                    transform_pins.push(PinOutcome::Failed(report.clone()));
                    return RunReport {
                        status: RunStatus::AbortedAtTransform { index, report },
                        transform_pins,
                        sinks: skipped(&self.sinks),
                    };
                }
            }
        }

        let mut sinks = Vec::with_capacity(self.sinks.len());
        for stage in &mut self.sinks {
            let contract = schema_for(&stage.contract);
            match validate(dataset.schema(), &contract, stage.policy) {
                Ok(_) => match (stage.writer)(&dataset) {
                    Ok(rows) => sinks.push(SinkOutcome::Written { rows }),
                    Err(error) => sinks.push(SinkOutcome::WriteFailed {
                        error: error.to_string(),
                    }),
                },
                Err(report) => sinks.push(SinkOutcome::Rejected(report)),
            }
        }

        RunReport {
            status: RunStatus::Completed,
            transform_pins,
            sinks,
        }
    }
}

fn canonical_record(shape: &ShapeNode) -> Result<ShapeNode, ShapeError> {
    let canonical = canonicalize(shape)?;
    if canonical.as_record().is_none() {
        return Err(ShapeError::new(
            ShapeErrorKind::UnsupportedShape {
                detail: format!(
                    "pipeline stages require a record shape, found {}",
                    canonical.describe()
                ),
            },
            StructuralPath::root(),
        ));
    }
    Ok(canonical)
}
