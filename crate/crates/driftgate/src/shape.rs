//! Canonical structural shape model shared by the build-stage gate and the
//! runtime comparator.
//!
//! Every policy decision in this crate is made over [`ShapeNode`] trees in
//! canonical form: a record field's top-level optionality lives in
//! [`FieldShape::is_optional`], never as an `Optional` node at the field root,
//! and `Optional` nodes appear only inside sequence elements and map values.

use std::collections::HashSet;
use std::fmt;

/// Atomic leaf kinds. Closed set; equality is kind identity and there is no
/// widening relation between kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrimitiveKind {
    Boolean,
    Int32,
    Int64,
    Float64,
    String,
    Binary,
    Date,
    Timestamp,
}

impl PrimitiveKind {
    pub const ALL: [PrimitiveKind; 8] = [
        PrimitiveKind::Boolean,
        PrimitiveKind::Int32,
        PrimitiveKind::Int64,
        PrimitiveKind::Float64,
        PrimitiveKind::String,
        PrimitiveKind::Binary,
        PrimitiveKind::Date,
        PrimitiveKind::Timestamp,
    ];

    /// Stable lowercase name, also used by the schema JSON format.
    pub fn name(self) -> &'static str {
        match self {
            PrimitiveKind::Boolean => "boolean",
            PrimitiveKind::Int32 => "int32",
            PrimitiveKind::Int64 => "int64",
            PrimitiveKind::Float64 => "float64",
            PrimitiveKind::String => "string",
            PrimitiveKind::Binary => "binary",
            PrimitiveKind::Date => "date",
            PrimitiveKind::Timestamp => "timestamp",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        PrimitiveKind::ALL.iter().copied().find(|k| k.name() == name)
    }

    fn encoding_tag(self) -> u8 {
        match self {
            PrimitiveKind::Boolean => 0,
            PrimitiveKind::Int32 => 1,
            PrimitiveKind::Int64 => 2,
            PrimitiveKind::Float64 => 3,
            PrimitiveKind::String => 4,
            PrimitiveKind::Binary => 5,
            PrimitiveKind::Date => 6,
            PrimitiveKind::Timestamp => 7,
        }
    }
}

impl fmt::Display for PrimitiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Normalized structural shape of a value.
///
/// Map keys are always atomic. Record field names are unique under exact
/// comparison once canonicalized.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ShapeNode {
    Primitive(PrimitiveKind),
    Optional(Box<ShapeNode>),
    Sequence(Box<ShapeNode>),
    Mapping {
        key: PrimitiveKind,
        value: Box<ShapeNode>,
    },
    Record(Vec<FieldShape>),
}

impl ShapeNode {
    pub fn primitive(kind: PrimitiveKind) -> Self {
        ShapeNode::Primitive(kind)
    }

    pub fn optional(inner: ShapeNode) -> Self {
        ShapeNode::Optional(Box::new(inner))
    }

    pub fn sequence(element: ShapeNode) -> Self {
        ShapeNode::Sequence(Box::new(element))
    }

    pub fn mapping(key: PrimitiveKind, value: ShapeNode) -> Self {
        ShapeNode::Mapping {
            key,
            value: Box::new(value),
        }
    }

    pub fn record(fields: Vec<FieldShape>) -> Self {
        ShapeNode::Record(fields)
    }

    pub fn as_record(&self) -> Option<&[FieldShape]> {
        match self {
            ShapeNode::Record(fields) => Some(fields),
            _ => None,
        }
    }

    /// Compact single-line description used in drift diagnostics.
    pub fn describe(&self) -> String {
        match self {
            ShapeNode::Primitive(kind) => kind.name().to_string(),
            ShapeNode::Optional(inner) => format!("{}?", inner.describe()),
            ShapeNode::Sequence(element) => format!("sequence<{}>", element.describe()),
            ShapeNode::Mapping { key, value } => format!("map<{}, {}>", key, value.describe()),
            ShapeNode::Record(fields) => {
                let names: Vec<&str> = fields.iter().map(|f| f.name.as_str()).collect();
                format!("record{{{}}}", names.join(", "))
            }
        }
    }
}

/// A named record field together with its flags.
///
/// In canonical form `shape` is never an `Optional` node; field-level
/// optionality is carried by `is_optional`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldShape {
    pub name: String,
    pub shape: ShapeNode,
    pub has_default: bool,
    pub is_optional: bool,
}

impl FieldShape {
    pub fn new(name: impl Into<String>, shape: ShapeNode) -> Self {
        FieldShape {
            name: name.into(),
            shape,
            has_default: false,
            is_optional: false,
        }
    }

    pub fn optional(mut self) -> Self {
        self.is_optional = true;
        self
    }

    pub fn with_default(mut self) -> Self {
        self.has_default = true;
        self
    }

    /// Declaration-style description: shape plus any flags.
    pub fn describe(&self) -> String {
        let mut out = self.shape.describe();
        if self.is_optional {
            out.push_str(", optional");
        }
        if self.has_default {
            out.push_str(", default");
        }
        out
    }
}

/// One step of a [`StructuralPath`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PathSegment {
    /// Descent into a named record field; renders as `.name` with the leading
    /// dot omitted at the root.
    Field(String),
    /// Descent into a sequence element; renders as `[]`.
    Element,
    /// Descent into a map value; renders as `{value}`.
    MapValue,
    /// Positional reference into a record; renders as `#i`.
    Position(usize),
}

/// Location of a structural feature inside a shape tree, rendered
/// deterministically for diagnostics.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StructuralPath {
    segments: Vec<PathSegment>,
}

impl StructuralPath {
    pub fn root() -> Self {
        StructuralPath::default()
    }

    pub fn from_segments(segments: Vec<PathSegment>) -> Self {
        StructuralPath { segments }
    }

    pub fn segments(&self) -> &[PathSegment] {
        &self.segments
    }

    pub fn is_root(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn child(&self, segment: PathSegment) -> Self {
        let mut segments = self.segments.clone();
        segments.push(segment);
        StructuralPath { segments }
    }

    pub fn field(&self, name: impl Into<String>) -> Self {
        self.child(PathSegment::Field(name.into()))
    }

    pub fn element(&self) -> Self {
        self.child(PathSegment::Element)
    }

    pub fn map_value(&self) -> Self {
        self.child(PathSegment::MapValue)
    }

    pub fn position(&self, index: usize) -> Self {
        self.child(PathSegment::Position(index))
    }
}

impl fmt::Display for StructuralPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.segments.is_empty() {
            return f.write_str("<root>");
        }
        let mut out = String::new();
        for segment in &self.segments {
            match segment {
                PathSegment::Field(name) => {
                    out.push('.');
                    out.push_str(name);
                }
                PathSegment::Element => out.push_str("[]"),
                PathSegment::MapValue => out.push_str("{value}"),
                PathSegment::Position(i) => {
                    out.push('#');
                    out.push_str(&i.to_string());
                }
            }
        }
        if let Some(stripped) = out.strip_prefix('.') {
            f.write_str(stripped)
        } else {
            f.write_str(&out)
        }
    }
}

/// Why a raw shape or descriptor was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ShapeErrorKind {
    /// `Optional(Optional(_))` appeared somewhere in the tree.
    DoubleOptional,
    /// A record declared the same field name twice (exact comparison).
    DuplicateName { name: String },
    /// A map key was not an atomic kind.
    NonAtomicMapKey,
    /// A referenced type falls outside the supported shape family.
    UnsupportedShape { detail: String },
    /// An `Optional` wrapper sat in a position that has no nullability flag to
    /// fold into (not a field root, sequence element, or map value).
    OptionalAtRoot,
}

impl ShapeErrorKind {
    pub fn token(&self) -> &'static str {
        match self {
            ShapeErrorKind::DoubleOptional => "DoubleOptional",
            ShapeErrorKind::DuplicateName { .. } => "DuplicateName",
            ShapeErrorKind::NonAtomicMapKey => "NonAtomicMapKey",
            ShapeErrorKind::UnsupportedShape { .. } => "UnsupportedShape",
            ShapeErrorKind::OptionalAtRoot => "OptionalAtRoot",
        }
    }
}

/// Rejection of a shape, carrying the structural path of the offending node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeError {
    pub kind: ShapeErrorKind,
    pub path: StructuralPath,
}

impl ShapeError {
    pub fn new(kind: ShapeErrorKind, path: StructuralPath) -> Self {
        ShapeError { kind, path }
    }
}

impl fmt::Display for ShapeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: ", self.kind.token(), self.path)?;
        match &self.kind {
            ShapeErrorKind::DoubleOptional => {
                f.write_str("optional wrapper directly wraps another optional")
            }
            ShapeErrorKind::DuplicateName { name } => {
                write!(f, "record declares field \"{name}\" more than once")
            }
            ShapeErrorKind::NonAtomicMapKey => f.write_str("map key must be an atomic kind"),
            ShapeErrorKind::UnsupportedShape { detail } => f.write_str(detail),
            ShapeErrorKind::OptionalAtRoot => {
                f.write_str("optional wrapper is not attached to a field, sequence element, or map value")
            }
        }
    }
}

impl std::error::Error for ShapeError {}

/// Rewrites a raw shape into canonical form.
///
/// Optionality declared as an `Optional` node at a record field root is folded
/// into [`FieldShape::is_optional`]; record field order is preserved. Rejects
/// double optionals, duplicate field names, and optional wrappers in positions
/// that carry no nullability flag.
pub fn canonicalize(raw: &ShapeNode) -> Result<ShapeNode, ShapeError> {
    canon_node(raw, &StructuralPath::root())
}

fn canon_node(node: &ShapeNode, path: &StructuralPath) -> Result<ShapeNode, ShapeError> {
    match node {
        ShapeNode::Primitive(kind) => Ok(ShapeNode::Primitive(*kind)),
        ShapeNode::Optional(_) => Err(ShapeError::new(ShapeErrorKind::OptionalAtRoot, path.clone())),
        ShapeNode::Sequence(element) => {
            let element = canon_wrapped(element, &path.element())?;
            Ok(ShapeNode::Sequence(Box::new(element)))
        }
        ShapeNode::Mapping { key, value } => {
            let value = canon_wrapped(value, &path.map_value())?;
            Ok(ShapeNode::Mapping {
                key: *key,
                value: Box::new(value),
            })
        }
        ShapeNode::Record(fields) => {
            let mut seen: HashSet<&str> = HashSet::with_capacity(fields.len());
            let mut out = Vec::with_capacity(fields.len());
            for field in fields {
                let field_path = path.field(&field.name);
                if !seen.insert(field.name.as_str()) {
                    return Err(ShapeError::new(
                        ShapeErrorKind::DuplicateName {
                            name: field.name.clone(),
                        },
                        field_path,
                    ));
                }
                let (folded_optional, inner) = match &field.shape {
                    ShapeNode::Optional(inner) => {
                        if matches!(**inner, ShapeNode::Optional(_)) {
                            return Err(ShapeError::new(ShapeErrorKind::DoubleOptional, field_path));
                        }
                        (true, inner.as_ref())
                    }
                    other => (false, other),
                };
                out.push(FieldShape {
                    name: field.name.clone(),
                    shape: canon_node(inner, &field_path)?,
                    has_default: field.has_default,
                    is_optional: field.is_optional || folded_optional,
                });
            }
            Ok(ShapeNode::Record(out))
        }
    }
}

// Sequence elements and map values are the two positions where an Optional
// wrapper is part of the canonical form.
fn canon_wrapped(node: &ShapeNode, path: &StructuralPath) -> Result<ShapeNode, ShapeError> {
    match node {
        ShapeNode::Optional(inner) => {
            if matches!(**inner, ShapeNode::Optional(_)) {
                return Err(ShapeError::new(ShapeErrorKind::DoubleOptional, path.clone()));
            }
            let inner = canon_node(inner, path)?;
            Ok(ShapeNode::Optional(Box::new(inner)))
        }
        other => canon_node(other, path),
    }
}

/// Deterministic 64-bit digest of a canonical shape tree.
///
/// Computed as FNV-1a over a length-prefixed canonical byte encoding, so equal
/// shapes digest equally on every platform and process. This is an identity
/// fingerprint, not a cryptographic hash.
pub fn fingerprint(shape: &ShapeNode) -> u64 {
    let mut buf = Vec::new();
    encode_node(shape, &mut buf);
    fnv1a64(&buf)
}

fn encode_node(node: &ShapeNode, buf: &mut Vec<u8>) {
    match node {
        ShapeNode::Primitive(kind) => {
            buf.push(1);
            buf.push(kind.encoding_tag());
        }
        ShapeNode::Optional(inner) => {
            buf.push(2);
            encode_node(inner, buf);
        }
        ShapeNode::Sequence(element) => {
            buf.push(3);
            encode_node(element, buf);
        }
        ShapeNode::Mapping { key, value } => {
            buf.push(4);
            buf.push(key.encoding_tag());
            encode_node(value, buf);
        }
        ShapeNode::Record(fields) => {
            buf.push(5);
            buf.extend_from_slice(&(fields.len() as u32).to_le_bytes());
            for field in fields {
                buf.extend_from_slice(&(field.name.len() as u32).to_le_bytes());
                buf.extend_from_slice(field.name.as_bytes());
                buf.push(u8::from(field.is_optional) | (u8::from(field.has_default) << 1));
                encode_node(&field.shape, buf);
            }
        }
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &byte in bytes {
        hash ^= u64::from(byte);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
