//! Build-stage conformance gate over declared record types.
//!
//! A [`TypeDescriptor`] is the structural description of a declared record
//! type as a build script can state it: named, ordered fields referencing
//! primitives, optional wrappers, sequences, atomic-keyed maps, and nested
//! records. [`static_assert_conforms`] derives canonical shapes from a
//! producer and contract descriptor and runs the policy check before any
//! pipeline code exists to execute; a generated gate project (see
//! [`project`]) turns a failed assertion into a failed `cargo build` whose
//! diagnostic is exactly the rendered drift report.

pub mod project;

use std::fmt;

use thiserror::Error;

use crate::policy::{conforms, DriftReport, SchemaPolicy, Witness};
use crate::shape::{
    canonicalize, FieldShape, PrimitiveKind, ShapeError, ShapeErrorKind, ShapeNode, StructuralPath,
};

/// Reference to a type in the supported shape family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeRef {
    Primitive(PrimitiveKind),
    Optional(Box<TypeRef>),
    Sequence(Box<TypeRef>),
    Mapping {
        key: Box<TypeRef>,
        value: Box<TypeRef>,
    },
    Record(TypeDescriptor),
}

impl TypeRef {
    pub fn primitive(kind: PrimitiveKind) -> Self {
        TypeRef::Primitive(kind)
    }

    pub fn optional(inner: TypeRef) -> Self {
        TypeRef::Optional(Box::new(inner))
    }

    pub fn sequence(element: TypeRef) -> Self {
        TypeRef::Sequence(Box::new(element))
    }

    pub fn mapping(key: TypeRef, value: TypeRef) -> Self {
        TypeRef::Mapping {
            key: Box::new(key),
            value: Box::new(value),
        }
    }

    pub fn record(descriptor: TypeDescriptor) -> Self {
        TypeRef::Record(descriptor)
    }

    pub fn describe(&self) -> String {
        match self {
            TypeRef::Primitive(kind) => kind.name().to_string(),
            TypeRef::Optional(inner) => format!("optional<{}>", inner.describe()),
            TypeRef::Sequence(element) => format!("sequence<{}>", element.describe()),
            TypeRef::Mapping { key, value } => {
                format!("map<{}, {}>", key.describe(), value.describe())
            }
            TypeRef::Record(descriptor) => format!("record \"{}\"", descriptor.name),
        }
    }
}

/// One declared field: name, referenced type, and whether the declaration
/// site provides a default value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDescriptor {
    pub name: String,
    pub ty: TypeRef,
    pub has_default: bool,
}

/// Structural description of a declared record type.
///
/// Field order is declaration order. Descriptors are plain owned values, so
/// reference cycles (recursive types) are unrepresentable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDescriptor {
    pub name: String,
    pub fields: Vec<FieldDescriptor>,
}

impl TypeDescriptor {
    pub fn new(name: impl Into<String>) -> Self {
        TypeDescriptor {
            name: name.into(),
            fields: Vec::new(),
        }
    }

    pub fn field(mut self, name: impl Into<String>, ty: TypeRef) -> Self {
        self.fields.push(FieldDescriptor {
            name: name.into(),
            ty,
            has_default: false,
        });
        self
    }

    pub fn field_with_default(mut self, name: impl Into<String>, ty: TypeRef) -> Self {
        self.fields.push(FieldDescriptor {
            name: name.into(),
            ty,
            has_default: true,
        });
        self
    }
}

/// Which descriptor a gate failure originated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateSide {
    Producer,
    Contract,
}

impl fmt::Display for GateSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GateSide::Producer => "producer",
            GateSide::Contract => "contract",
        })
    }
}

/// Why the gate refused a descriptor pair.
///
/// The `Drift` display is exactly the rendered drift report, one item per
/// line, so a build log carries the same diagnostic the engine produced.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GateFailure {
    #[error("{side} descriptor rejected: {error}")]
    Shape { side: GateSide, error: ShapeError },
    #[error("{0}")]
    Drift(DriftReport),
}

/// Derives the canonical shape of a declared record type.
///
/// Optional wrappers at field roots fold into the field's optionality flag,
/// declared defaults become the default flag, and the container family maps
/// one-to-one onto shape nodes. Types outside the family are rejected with an
/// [`ShapeErrorKind::UnsupportedShape`] error naming the offending path.
pub fn derive_shape(descriptor: &TypeDescriptor) -> Result<ShapeNode, ShapeError> {
    let raw = raw_record(descriptor, &StructuralPath::root())?;
    canonicalize(&raw)
}

fn raw_record(descriptor: &TypeDescriptor, path: &StructuralPath) -> Result<ShapeNode, ShapeError> {
    let mut fields = Vec::with_capacity(descriptor.fields.len());
    for field in &descriptor.fields {
        let field_path = path.field(&field.name);
        fields.push(FieldShape {
            name: field.name.clone(),
            shape: raw_type(&field.ty, &field_path)?,
            has_default: field.has_default,
            is_optional: false,
        });
    }
    Ok(ShapeNode::Record(fields))
}

fn raw_type(ty: &TypeRef, path: &StructuralPath) -> Result<ShapeNode, ShapeError> {
    match ty {
        TypeRef::Primitive(kind) => Ok(ShapeNode::Primitive(*kind)),
        TypeRef::Optional(inner) => Ok(ShapeNode::optional(raw_type(inner, path)?)),
        TypeRef::Sequence(element) => {
            Ok(ShapeNode::sequence(raw_type(element, &path.element())?))
        }
        TypeRef::Mapping { key, value } => {
            let key_kind = match key.as_ref() {
                TypeRef::Primitive(kind) => *kind,
                other => {
                    return Err(ShapeError::new(
                        ShapeErrorKind::UnsupportedShape {
                            detail: format!(
                                "map key must be an atomic kind, found {}",
                                other.describe()
                            ),
                        },
                        path.clone(),
                    ))
                }
            };
            Ok(ShapeNode::mapping(
                key_kind,
                raw_type(value, &path.map_value())?,
            ))
        }
        TypeRef::Record(descriptor) => raw_record(descriptor, path),
    }
}

/// The gate itself: derive both shapes, run the policy check, and either mint
/// the sink-construction [`Witness`] or fail with a diagnostic.
///
/// The gate adds no semantics of its own; success is exactly
/// `conforms(derive_shape(producer), derive_shape(contract), policy)`
/// succeeding.
pub fn static_assert_conforms(
    producer: &TypeDescriptor,
    contract: &TypeDescriptor,
    policy: SchemaPolicy,
) -> Result<Witness, GateFailure> {
    let producer_shape = derive_shape(producer).map_err(|error| GateFailure::Shape {
        side: GateSide::Producer,
        error,
    })?;
    let contract_shape = derive_shape(contract).map_err(|error| GateFailure::Shape {
        side: GateSide::Contract,
        error,
    })?;
    conforms(&producer_shape, &contract_shape, policy).map_err(GateFailure::Drift)
}
