//! Structural schema contracts enforced at two layers.
//!
//! The build-stage gate derives a canonical shape from declared record types
//! and refuses to compile binaries whose producer shape drifts from the
//! contract. The runtime comparator re-checks the same relation against the
//! schema observed at a data boundary, so a binary that passed the gate still
//! refuses to write rows whose live schema no longer conforms.
//!
//! Both layers share one vocabulary: [`shape::ShapeNode`] is the canonical
//! structural form, [`policy::conforms`] is the single conformance relation,
//! and [`policy::Witness`] is the proof token that ties an approved producer
//! and contract pair to the policy it was checked under.

pub mod bench;
pub mod cli;
pub mod dataset;
pub mod gate;
pub mod pipeline;
pub mod policy;
pub mod runtime;
pub mod shape;

pub use policy::{conforms, DriftItem, DriftKind, DriftReport, SchemaPolicy, Witness};
pub use shape::{
    canonicalize, fingerprint, FieldShape, PathSegment, PrimitiveKind, ShapeError, ShapeErrorKind,
    ShapeNode, StructuralPath,
};
