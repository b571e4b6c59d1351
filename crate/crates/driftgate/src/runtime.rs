//! Runtime schema model and comparator layer.
//!
//! [`RuntimeSchema`] is the schema a running job can observe at a data
//! boundary: records, arrays, and maps with nullability flags and a
//! `hasDefault` metadata marker. [`validate`] delegates to the same
//! [`conforms`] engine the build-stage gate uses, via [`shape_of`], so the two
//! layers cannot disagree. The baseline comparators are deliberately separate
//! reimplementations of the lenient equality checks common in dataframe
//! engines; their whole purpose is to show what those checks let through.

use serde_json::{Map, Value};
use thiserror::Error;

use crate::policy::{conforms, DriftReport, SchemaPolicy, Witness};
use crate::shape::{FieldShape, PrimitiveKind, ShapeNode};

/// Runtime view of a value's type.
///
/// Map keys are atomic by construction. Field names must be unique within a
/// record under exact comparison; [`parse_schema`] enforces this and
/// [`schema_for`] inherits it from canonical shapes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RuntimeType {
    Atomic(PrimitiveKind),
    Array {
        element: Box<RuntimeType>,
        contains_null: bool,
    },
    Map {
        key: PrimitiveKind,
        value: Box<RuntimeType>,
        value_contains_null: bool,
    },
    Record(Vec<RuntimeField>),
}

impl RuntimeType {
    pub fn atomic(kind: PrimitiveKind) -> Self {
        RuntimeType::Atomic(kind)
    }

    pub fn array(element: RuntimeType, contains_null: bool) -> Self {
        RuntimeType::Array {
            element: Box::new(element),
            contains_null,
        }
    }

    pub fn map(key: PrimitiveKind, value: RuntimeType, value_contains_null: bool) -> Self {
        RuntimeType::Map {
            key,
            value: Box::new(value),
            value_contains_null,
        }
    }

    pub fn record(fields: Vec<RuntimeField>) -> Self {
        RuntimeType::Record(fields)
    }

    fn type_name(&self) -> &'static str {
        match self {
            RuntimeType::Atomic(kind) => kind.name(),
            RuntimeType::Array { .. } => "array",
            RuntimeType::Map { .. } => "map",
            RuntimeType::Record(_) => "record",
        }
    }
}

/// One named field of a record type.
///
/// `has_default` stands in for the single recognized metadata key
/// `"hasDefault"`; absent metadata means false.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuntimeField {
    pub name: String,
    pub data_type: RuntimeType,
    pub nullable: bool,
    pub has_default: bool,
}

impl RuntimeField {
    pub fn new(name: impl Into<String>, data_type: RuntimeType) -> Self {
        RuntimeField {
            name: name.into(),
            data_type,
            nullable: false,
            has_default: false,
        }
    }

    pub fn nullable(mut self) -> Self {
        self.nullable = true;
        self
    }

    pub fn with_default(mut self) -> Self {
        self.has_default = true;
        self
    }
}

/// A record-rooted runtime schema, the unit the comparators work over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuntimeSchema {
    pub fields: Vec<RuntimeField>,
}

impl RuntimeSchema {
    pub fn new(fields: Vec<RuntimeField>) -> Self {
        RuntimeSchema { fields }
    }
}

/// Projects a canonical record shape into its runtime schema.
///
/// Field-level optionality becomes `nullable`, a sequence element's `Optional`
/// wrapper becomes `contains_null`, a map value's wrapper becomes
/// `value_contains_null`, and the default flag becomes `hasDefault` metadata.
///
/// # Panics
///
/// Panics when `contract` is not a canonical record shape.
pub fn schema_for(contract: &ShapeNode) -> RuntimeSchema {
    let fields = contract
        .as_record()
        .expect("schema_for requires a record shape at the root");
    RuntimeSchema::new(fields.iter().map(runtime_field_of).collect())
}

fn runtime_field_of(field: &FieldShape) -> RuntimeField {
    RuntimeField {
        name: field.name.clone(),
        data_type: runtime_type_of(&field.shape),
        nullable: field.is_optional,
        has_default: field.has_default,
    }
}

fn runtime_type_of(shape: &ShapeNode) -> RuntimeType {
    match shape {
        ShapeNode::Primitive(kind) => RuntimeType::Atomic(*kind),
        ShapeNode::Sequence(element) => {
            let (contains_null, inner) = split_optional(element);
            RuntimeType::array(runtime_type_of(inner), contains_null)
        }
        ShapeNode::Mapping { key, value } => {
            let (value_contains_null, inner) = split_optional(value);
            RuntimeType::map(*key, runtime_type_of(inner), value_contains_null)
        }
        ShapeNode::Record(fields) => {
            RuntimeType::Record(fields.iter().map(runtime_field_of).collect())
        }
        ShapeNode::Optional(_) => {
            panic!("canonical shapes carry optionality in flags, not bare optional nodes")
        }
    }
}

fn split_optional(node: &ShapeNode) -> (bool, &ShapeNode) {
    match node {
        ShapeNode::Optional(inner) => (true, inner),
        other => (false, other),
    }
}

/// Recovers the canonical shape of a runtime schema.
///
/// Exact inverse of [`schema_for`] on its image: `nullable` unfolds to
/// field-level optionality, `contains_null` and `value_contains_null` unfold
/// to `Optional` wrappers, metadata unfolds to the default flag.
pub fn shape_of(schema: &RuntimeSchema) -> ShapeNode {
    ShapeNode::Record(schema.fields.iter().map(field_shape_of).collect())
}

fn field_shape_of(field: &RuntimeField) -> FieldShape {
    FieldShape {
        name: field.name.clone(),
        shape: shape_of_type(&field.data_type),
        has_default: field.has_default,
        is_optional: field.nullable,
    }
}

fn shape_of_type(data_type: &RuntimeType) -> ShapeNode {
    match data_type {
        RuntimeType::Atomic(kind) => ShapeNode::Primitive(*kind),
        RuntimeType::Array {
            element,
            contains_null,
        } => {
            let inner = shape_of_type(element);
            ShapeNode::sequence(wrap_optional(inner, *contains_null))
        }
        RuntimeType::Map {
            key,
            value,
            value_contains_null,
        } => {
            let inner = shape_of_type(value);
            ShapeNode::mapping(*key, wrap_optional(inner, *value_contains_null))
        }
        RuntimeType::Record(fields) => {
            ShapeNode::Record(fields.iter().map(field_shape_of).collect())
        }
    }
}

fn wrap_optional(node: ShapeNode, optional: bool) -> ShapeNode {
    if optional {
        ShapeNode::optional(node)
    } else {
        node
    }
}

/// Runtime conformance check: exactly `conforms(shape_of(actual),
/// shape_of(contract), policy)`.
///
/// There is no second comparator implementation to drift from the build-stage
/// gate; parity between the layers holds by construction.
pub fn validate(
    actual: &RuntimeSchema,
    contract: &RuntimeSchema,
    policy: SchemaPolicy,
) -> Result<Witness, DriftReport> {
    conforms(&shape_of(actual), &shape_of(contract), policy)
}

/// Lenient baseline: unordered comparison by case-folded field name with all
/// nullability flags ignored, including `contains_null` and
/// `value_contains_null`.
///
/// Reimplemented from its documented semantics so the crate runs standalone;
/// kept separate from [`validate`] because its purpose is to reproduce the
/// drift this family of checks fails to see.
pub fn baseline_ignore_case_and_nullability(a: &RuntimeSchema, b: &RuntimeSchema) -> bool {
    fields_equal_ignore_case(&a.fields, &b.fields)
}

fn fields_equal_ignore_case(a: &[RuntimeField], b: &[RuntimeField]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut a_sorted: Vec<&RuntimeField> = a.iter().collect();
    let mut b_sorted: Vec<&RuntimeField> = b.iter().collect();
    a_sorted.sort_by_key(|f| f.name.to_lowercase());
    b_sorted.sort_by_key(|f| f.name.to_lowercase());
    a_sorted.iter().zip(&b_sorted).all(|(fa, fb)| {
        fa.name.to_lowercase() == fb.name.to_lowercase()
            && types_equal_ignore_case(&fa.data_type, &fb.data_type)
    })
}

fn types_equal_ignore_case(a: &RuntimeType, b: &RuntimeType) -> bool {
    match (a, b) {
        (RuntimeType::Atomic(x), RuntimeType::Atomic(y)) => x == y,
        (RuntimeType::Array { element: ea, .. }, RuntimeType::Array { element: eb, .. }) => {
            types_equal_ignore_case(ea, eb)
        }
        (
            RuntimeType::Map {
                key: ka, value: va, ..
            },
            RuntimeType::Map {
                key: kb, value: vb, ..
            },
        ) => ka == kb && types_equal_ignore_case(va, vb),
        (RuntimeType::Record(fa), RuntimeType::Record(fb)) => fields_equal_ignore_case(fa, fb),
        _ => false,
    }
}

/// Lenient baseline: by-position comparison with names and all nullability
/// flags ignored.
pub fn baseline_structurally(a: &RuntimeSchema, b: &RuntimeSchema) -> bool {
    fields_equal_structurally(&a.fields, &b.fields)
}

fn fields_equal_structurally(a: &[RuntimeField], b: &[RuntimeField]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(fa, fb)| types_equal_structurally(&fa.data_type, &fb.data_type))
}

fn types_equal_structurally(a: &RuntimeType, b: &RuntimeType) -> bool {
    match (a, b) {
        (RuntimeType::Atomic(x), RuntimeType::Atomic(y)) => x == y,
        (RuntimeType::Array { element: ea, .. }, RuntimeType::Array { element: eb, .. }) => {
            types_equal_structurally(ea, eb)
        }
        (
            RuntimeType::Map {
                key: ka, value: va, ..
            },
            RuntimeType::Map {
                key: kb, value: vb, ..
            },
        ) => ka == kb && types_equal_structurally(va, vb),
        (RuntimeType::Record(fa), RuntimeType::Record(fb)) => fields_equal_structurally(fa, fb),
        _ => false,
    }
}

/// By-position comparison where field names are matched through a caller
/// supplied resolver and nullability flags are ignored. Untimed utility; not
/// part of the benchmark row set.
pub fn baseline_structurally_by_name<F>(a: &RuntimeSchema, b: &RuntimeSchema, resolver: &F) -> bool
where
    F: Fn(&str, &str) -> bool,
{
    fields_equal_by_name(&a.fields, &b.fields, resolver)
}

fn fields_equal_by_name<F>(a: &[RuntimeField], b: &[RuntimeField], resolver: &F) -> bool
where
    F: Fn(&str, &str) -> bool,
{
    a.len() == b.len()
        && a.iter().zip(b).all(|(fa, fb)| {
            resolver(&fa.name, &fb.name) && types_equal_by_name(&fa.data_type, &fb.data_type, resolver)
        })
}

fn types_equal_by_name<F>(a: &RuntimeType, b: &RuntimeType, resolver: &F) -> bool
where
    F: Fn(&str, &str) -> bool,
{
    match (a, b) {
        (RuntimeType::Atomic(x), RuntimeType::Atomic(y)) => x == y,
        (RuntimeType::Array { element: ea, .. }, RuntimeType::Array { element: eb, .. }) => {
            types_equal_by_name(ea, eb, resolver)
        }
        (
            RuntimeType::Map {
                key: ka, value: va, ..
            },
            RuntimeType::Map {
                key: kb, value: vb, ..
            },
        ) => ka == kb && types_equal_by_name(va, vb, resolver),
        (RuntimeType::Record(fa), RuntimeType::Record(fb)) => fields_equal_by_name(fa, fb, resolver),
        _ => false,
    }
}

/// Rejection of schema JSON during parsing.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("schema JSON syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("top-level schema must be a record, got \"{found}\"")]
    TopLevelNotRecord { found: String },
    #[error("unknown key \"{key}\" in {context}")]
    UnknownKey { key: String, context: String },
    #[error("missing key \"{key}\" in {context}")]
    MissingKey { key: String, context: String },
    #[error("key \"{key}\" in {context} must be {expected}")]
    WrongValueKind {
        key: String,
        context: String,
        expected: String,
    },
    #[error("unknown type name \"{name}\" in {context}")]
    UnknownTypeName { name: String, context: String },
    #[error("map key in {context} must be an atomic kind, got \"{found}\"")]
    NonAtomicMapKey { found: String, context: String },
    #[error("record in {context} declares field \"{name}\" more than once")]
    DuplicateField { name: String, context: String },
    #[error("metadata in {context} supports only the \"hasDefault\" key, got \"{key}\"")]
    UnknownMetadataKey { key: String, context: String },
}

/// Canonical JSON text for a schema.
///
/// Bit-exact format: fixed key order, two-space indentation, trailing newline.
/// Equal schemas always serialize to byte-identical text.
pub fn serialize_schema(schema: &RuntimeSchema) -> String {
    let value = record_to_json(&schema.fields);
    let mut out =
        serde_json::to_string_pretty(&value).expect("schema JSON serialization cannot fail");
    out.push('\n');
    out
}

fn record_to_json(fields: &[RuntimeField]) -> Value {
    let mut obj = Map::new();
    obj.insert("type".to_string(), Value::String("record".to_string()));
    obj.insert(
        "fields".to_string(),
        Value::Array(fields.iter().map(field_to_json).collect()),
    );
    Value::Object(obj)
}

fn field_to_json(field: &RuntimeField) -> Value {
    let mut obj = Map::new();
    obj.insert("name".to_string(), Value::String(field.name.clone()));
    obj.insert("type".to_string(), type_to_json(&field.data_type));
    obj.insert("nullable".to_string(), Value::Bool(field.nullable));
    if field.has_default {
        let mut meta = Map::new();
        meta.insert("hasDefault".to_string(), Value::Bool(true));
        obj.insert("metadata".to_string(), Value::Object(meta));
    }
    Value::Object(obj)
}

fn type_to_json(data_type: &RuntimeType) -> Value {
    match data_type {
        RuntimeType::Atomic(kind) => {
            let mut obj = Map::new();
            obj.insert("type".to_string(), Value::String(kind.name().to_string()));
            Value::Object(obj)
        }
        RuntimeType::Array {
            element,
            contains_null,
        } => {
            let mut obj = Map::new();
            obj.insert("type".to_string(), Value::String("array".to_string()));
            obj.insert("element".to_string(), type_to_json(element));
            obj.insert("containsNull".to_string(), Value::Bool(*contains_null));
            Value::Object(obj)
        }
        RuntimeType::Map {
            key,
            value,
            value_contains_null,
        } => {
            let mut obj = Map::new();
            obj.insert("type".to_string(), Value::String("map".to_string()));
            obj.insert("key".to_string(), Value::String(key.name().to_string()));
            obj.insert("value".to_string(), type_to_json(value));
            obj.insert(
                "valueContainsNull".to_string(),
                Value::Bool(*value_contains_null),
            );
            Value::Object(obj)
        }
        RuntimeType::Record(fields) => record_to_json(fields),
    }
}

/// Strict parser for canonical schema JSON.
///
/// Unknown keys, unknown type names, non-atomic map keys, and duplicate field
/// names are all rejected. `parse_schema(serialize_schema(s)) == s` for every
/// valid schema, and re-serializing a parse of canonical text reproduces the
/// input bytes.
pub fn parse_schema(text: &str) -> Result<RuntimeSchema, ParseError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ParseError::Syntax {
        line: e.line(),
        column: e.column(),
        message: syntax_message(&e),
    })?;
    match parse_type(&value, "schema root")? {
        RuntimeType::Record(fields) => Ok(RuntimeSchema::new(fields)),
        other => Err(ParseError::TopLevelNotRecord {
            found: other.type_name().to_string(),
        }),
    }
}

// serde_json appends " at line L column C" to its messages; the position is
// already carried separately, so strip the suffix instead of printing it twice.
fn syntax_message(error: &serde_json::Error) -> String {
    let full = error.to_string();
    match full.rfind(" at line ") {
        Some(idx) => full[..idx].to_string(),
        None => full,
    }
}

fn parse_type(value: &Value, context: &str) -> Result<RuntimeType, ParseError> {
    let obj = as_object(value, context)?;
    let type_name = require_string(obj, "type", context)?;
    match type_name {
        "record" => {
            reject_unknown_keys(obj, &["type", "fields"], context)?;
            let fields_value = require_key(obj, "fields", context)?;
            let entries = fields_value.as_array().ok_or_else(|| ParseError::WrongValueKind {
                key: "fields".to_string(),
                context: context.to_string(),
                expected: "an array".to_string(),
            })?;
            let mut fields = Vec::with_capacity(entries.len());
            let mut seen: std::collections::HashSet<String> =
                std::collections::HashSet::with_capacity(entries.len());
            for entry in entries {
                let field = parse_field(entry, context)?;
                if !seen.insert(field.name.clone()) {
                    return Err(ParseError::DuplicateField {
                        name: field.name,
                        context: context.to_string(),
                    });
                }
                fields.push(field);
            }
            Ok(RuntimeType::Record(fields))
        }
        "array" => {
            reject_unknown_keys(obj, &["type", "element", "containsNull"], context)?;
            let element = parse_type(
                require_key(obj, "element", context)?,
                &format!("array element of {context}"),
            )?;
            let contains_null = require_bool(obj, "containsNull", context)?;
            Ok(RuntimeType::array(element, contains_null))
        }
        "map" => {
            reject_unknown_keys(obj, &["type", "key", "value", "valueContainsNull"], context)?;
            let key_name = require_string(obj, "key", context)?;
            let key = PrimitiveKind::from_name(key_name).ok_or_else(|| {
                ParseError::NonAtomicMapKey {
                    found: key_name.to_string(),
                    context: context.to_string(),
                }
            })?;
            let value = parse_type(
                require_key(obj, "value", context)?,
                &format!("map value of {context}"),
            )?;
            let value_contains_null = require_bool(obj, "valueContainsNull", context)?;
            Ok(RuntimeType::map(key, value, value_contains_null))
        }
        atomic => {
            let kind = PrimitiveKind::from_name(atomic).ok_or_else(|| {
                ParseError::UnknownTypeName {
                    name: atomic.to_string(),
                    context: context.to_string(),
                }
            })?;
            reject_unknown_keys(obj, &["type"], context)?;
            Ok(RuntimeType::Atomic(kind))
        }
    }
}

fn parse_field(value: &Value, record_context: &str) -> Result<RuntimeField, ParseError> {
    let obj = as_object(value, record_context)?;
    let name = require_string(obj, "name", record_context)?.to_string();
    let context = format!("field \"{name}\"");
    reject_unknown_keys(obj, &["name", "type", "nullable", "metadata"], &context)?;
    let data_type = parse_type(require_key(obj, "type", &context)?, &context)?;
    let nullable = require_bool(obj, "nullable", &context)?;
    let has_default = match obj.get("metadata") {
        None => false,
        Some(meta_value) => {
            let meta = as_object(meta_value, &context)?;
            for key in meta.keys() {
                if key != "hasDefault" {
                    return Err(ParseError::UnknownMetadataKey {
                        key: key.clone(),
                        context: context.clone(),
                    });
                }
            }
            match meta.get("hasDefault") {
                None => false,
                Some(Value::Bool(b)) => *b,
                Some(_) => {
                    return Err(ParseError::WrongValueKind {
                        key: "hasDefault".to_string(),
                        context: context.clone(),
                        expected: "a boolean".to_string(),
                    })
                }
            }
        }
    };
    Ok(RuntimeField {
        name,
        data_type,
        nullable,
        has_default,
    })
}

fn as_object<'a>(value: &'a Value, context: &str) -> Result<&'a Map<String, Value>, ParseError> {
    value.as_object().ok_or_else(|| ParseError::WrongValueKind {
        key: "<value>".to_string(),
        context: context.to_string(),
        expected: "a JSON object".to_string(),
    })
}

fn reject_unknown_keys(
    obj: &Map<String, Value>,
    allowed: &[&str],
    context: &str,
) -> Result<(), ParseError> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(ParseError::UnknownKey {
                key: key.clone(),
                context: context.to_string(),
            });
        }
    }
    Ok(())
}

fn require_key<'a>(
    obj: &'a Map<String, Value>,
    key: &str,
    context: &str,
) -> Result<&'a Value, ParseError> {
    obj.get(key).ok_or_else(|| ParseError::MissingKey {
        key: key.to_string(),
        context: context.to_string(),
    })
}

fn require_string<'a>(
    obj: &'a Map<String, Value>,
    key: &str,
    context: &str,
) -> Result<&'a str, ParseError> {
    require_key(obj, key, context)?
        .as_str()
        .ok_or_else(|| ParseError::WrongValueKind {
            key: key.to_string(),
            context: context.to_string(),
            expected: "a string".to_string(),
        })
}

fn require_bool(obj: &Map<String, Value>, key: &str, context: &str) -> Result<bool, ParseError> {
    require_key(obj, key, context)?
        .as_bool()
        .ok_or_else(|| ParseError::WrongValueKind {
            key: key.to_string(),
            context: context.to_string(),
            expected: "a boolean".to_string(),
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::DriftKind;

    fn int64() -> ShapeNode {
        ShapeNode::primitive(PrimitiveKind::Int64)
    }

    fn string() -> ShapeNode {
        ShapeNode::primitive(PrimitiveKind::String)
    }

    #[test]
    fn schema_for_maps_flags_and_wrappers() {
        let shape = ShapeNode::record(vec![
            FieldShape::new("tags", ShapeNode::sequence(ShapeNode::optional(string()))),
            FieldShape::new("nick", string()).optional().with_default(),
        ]);
        let schema = schema_for(&shape);
        assert_eq!(
            schema.fields[0].data_type,
            RuntimeType::array(RuntimeType::atomic(PrimitiveKind::String), true)
        );
        assert!(!schema.fields[0].nullable);
        assert!(schema.fields[1].nullable);
        assert!(schema.fields[1].has_default);
    }

    #[test]
    fn empty_record_maps_to_empty_schema() {
        let schema = schema_for(&ShapeNode::record(vec![]));
        assert!(schema.fields.is_empty());
        assert_eq!(shape_of(&schema), ShapeNode::record(vec![]));
    }

    #[test]
    fn shape_of_inverts_schema_for() {
        let shapes = [
            ShapeNode::record(vec![FieldShape::new("a", int64())]),
            ShapeNode::record(vec![
                FieldShape::new("id", int64()),
                FieldShape::new("tags", ShapeNode::sequence(ShapeNode::optional(string()))),
                FieldShape::new(
                    "attrs",
                    ShapeNode::mapping(PrimitiveKind::String, ShapeNode::optional(int64())),
                )
                .optional(),
                FieldShape::new(
                    "inner",
                    ShapeNode::record(vec![FieldShape::new("x", string()).with_default()]),
                ),
            ]),
            ShapeNode::record(vec![]),
        ];
        for shape in &shapes {
            assert_eq!(&shape_of(&schema_for(shape)), shape);
        }
    }

    #[test]
    fn validate_agrees_with_conforms() {
        let producer = ShapeNode::record(vec![
            FieldShape::new("b", int64()),
            FieldShape::new("a", string()),
        ]);
        let contract = ShapeNode::record(vec![
            FieldShape::new("a", string()),
            FieldShape::new("b", int64()),
        ]);
        for policy in SchemaPolicy::ALL {
            let engine = conforms(&producer, &contract, policy).is_ok();
            let runtime =
                validate(&schema_for(&producer), &schema_for(&contract), policy).is_ok();
            assert_eq!(engine, runtime, "layer disagreement under {policy}");
        }
    }

    #[test]
    fn contains_null_drift_is_caught_by_validate_but_not_baseline() {
        let actual = RuntimeSchema::new(vec![RuntimeField::new(
            "tags",
            RuntimeType::array(RuntimeType::atomic(PrimitiveKind::String), true),
        )]);
        let contract = RuntimeSchema::new(vec![RuntimeField::new(
            "tags",
            RuntimeType::array(RuntimeType::atomic(PrimitiveKind::String), false),
        )]);
        assert!(baseline_ignore_case_and_nullability(&actual, &contract));
        let report = validate(&actual, &contract, SchemaPolicy::Exact).unwrap_err();
        assert!(report.contains_kind(DriftKind::NestedOptionalityMismatch));
        assert!(report.items.iter().any(|i| i.path.to_string() == "tags[]"));
    }

    #[test]
    fn ignore_case_baseline_is_unordered_and_nullability_blind() {
        let a = RuntimeSchema::new(vec![
            RuntimeField::new("UserId", RuntimeType::atomic(PrimitiveKind::Int64)).nullable(),
            RuntimeField::new("Name", RuntimeType::atomic(PrimitiveKind::String)),
        ]);
        let b = RuntimeSchema::new(vec![
            RuntimeField::new("name", RuntimeType::atomic(PrimitiveKind::String)),
            RuntimeField::new("userid", RuntimeType::atomic(PrimitiveKind::Int64)),
        ]);
        assert!(baseline_ignore_case_and_nullability(&a, &b));

        let c = RuntimeSchema::new(vec![
            RuntimeField::new("name", RuntimeType::atomic(PrimitiveKind::Int64)),
            RuntimeField::new("userid", RuntimeType::atomic(PrimitiveKind::Int64)),
        ]);
        assert!(!baseline_ignore_case_and_nullability(&a, &c));
    }

    #[test]
    fn structural_baseline_ignores_names_but_not_position() {
        let a = RuntimeSchema::new(vec![
            RuntimeField::new("x", RuntimeType::atomic(PrimitiveKind::Int64)),
            RuntimeField::new("y", RuntimeType::atomic(PrimitiveKind::String)),
        ]);
        let renamed = RuntimeSchema::new(vec![
            RuntimeField::new("p", RuntimeType::atomic(PrimitiveKind::Int64)).nullable(),
            RuntimeField::new("q", RuntimeType::atomic(PrimitiveKind::String)),
        ]);
        let swapped = RuntimeSchema::new(vec![
            RuntimeField::new("y", RuntimeType::atomic(PrimitiveKind::String)),
            RuntimeField::new("x", RuntimeType::atomic(PrimitiveKind::Int64)),
        ]);
        let shorter = RuntimeSchema::new(vec![RuntimeField::new(
            "x",
            RuntimeType::atomic(PrimitiveKind::Int64),
        )]);
        assert!(baseline_structurally(&a, &renamed));
        assert!(!baseline_structurally(&a, &swapped));
        assert!(!baseline_structurally(&a, &shorter));
    }

    #[test]
    fn by_name_baseline_defers_to_the_resolver() {
        let a = RuntimeSchema::new(vec![RuntimeField::new(
            "UserId",
            RuntimeType::atomic(PrimitiveKind::Int64),
        )]);
        let b = RuntimeSchema::new(vec![RuntimeField::new(
            "userid",
            RuntimeType::atomic(PrimitiveKind::Int64),
        )]);
        let ci = |x: &str, y: &str| x.to_lowercase() == y.to_lowercase();
        let cs = |x: &str, y: &str| x == y;
        assert!(baseline_structurally_by_name(&a, &b, &ci));
        assert!(!baseline_structurally_by_name(&a, &b, &cs));
    }

    #[test]
    fn serialization_is_pinned() {
        let schema = RuntimeSchema::new(vec![
            RuntimeField::new("id", RuntimeType::atomic(PrimitiveKind::Int64)),
            RuntimeField::new(
                "tags",
                RuntimeType::array(RuntimeType::atomic(PrimitiveKind::String), true),
            ),
            RuntimeField::new("nick", RuntimeType::atomic(PrimitiveKind::String))
                .nullable()
                .with_default(),
        ]);
        let expected = r#"{
  "type": "record",
  "fields": [
    {
      "name": "id",
      "type": {
        "type": "int64"
      },
      "nullable": false
    },
    {
      "name": "tags",
      "type": {
        "type": "array",
        "element": {
          "type": "string"
        },
        "containsNull": true
      },
      "nullable": false
    },
    {
      "name": "nick",
      "type": {
        "type": "string"
      },
      "nullable": true,
      "metadata": {
        "hasDefault": true
      }
    }
  ]
}
"#;
        assert_eq!(serialize_schema(&schema), expected);
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let schema = RuntimeSchema::new(vec![
            RuntimeField::new(
                "attrs",
                RuntimeType::map(
                    PrimitiveKind::String,
                    RuntimeType::atomic(PrimitiveKind::Int64),
                    true,
                ),
            ),
            RuntimeField::new(
                "inner",
                RuntimeType::record(vec![RuntimeField::new(
                    "when",
                    RuntimeType::atomic(PrimitiveKind::Timestamp),
                )
                .nullable()]),
            ),
        ]);
        let text = serialize_schema(&schema);
        let parsed = parse_schema(&text).unwrap();
        assert_eq!(parsed, schema);
        assert_eq!(serialize_schema(&parsed), text);
    }

    #[test]
    fn empty_record_parses() {
        let schema = parse_schema("{\"type\":\"record\",\"fields\":[]}").unwrap();
        assert!(schema.fields.is_empty());
    }

    #[test]
    fn syntax_errors_carry_line_and_column() {
        let err = parse_schema("{\n  \"type\": \"record\",\n  \"fields\": [}\n").unwrap_err();
        match err {
            ParseError::Syntax { line, column, .. } => {
                assert_eq!(line, 3);
                assert!(column > 0);
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = r#"{"type":"record","fields":[],"comment":"hi"}"#;
        let err = parse_schema(text).unwrap_err();
        assert!(matches!(err, ParseError::UnknownKey { ref key, .. } if key == "comment"));
    }

    #[test]
    fn record_typed_map_key_is_rejected() {
        let text = r#"{"type":"record","fields":[{"name":"m","type":{"type":"map","key":"record","value":{"type":"int64"},"valueContainsNull":false},"nullable":false}]}"#;
        let err = parse_schema(text).unwrap_err();
        assert!(matches!(err, ParseError::NonAtomicMapKey { ref found, .. } if found == "record"));
    }

    #[test]
    fn unknown_type_name_is_rejected() {
        let text = r#"{"type":"record","fields":[{"name":"a","type":{"type":"int65"},"nullable":false}]}"#;
        let err = parse_schema(text).unwrap_err();
        assert!(matches!(err, ParseError::UnknownTypeName { ref name, .. } if name == "int65"));
    }

    #[test]
    fn duplicate_field_names_are_rejected() {
        let text = r#"{"type":"record","fields":[{"name":"a","type":{"type":"int64"},"nullable":false},{"name":"a","type":{"type":"string"},"nullable":false}]}"#;
        let err = parse_schema(text).unwrap_err();
        assert!(matches!(err, ParseError::DuplicateField { ref name, .. } if name == "a"));
    }

    #[test]
    fn unknown_metadata_key_is_rejected() {
        let text = r#"{"type":"record","fields":[{"name":"a","type":{"type":"int64"},"nullable":false,"metadata":{"pii":true}}]}"#;
        let err = parse_schema(text).unwrap_err();
        assert!(matches!(err, ParseError::UnknownMetadataKey { ref key, .. } if key == "pii"));
    }

    #[test]
    fn top_level_must_be_a_record() {
        let err = parse_schema(r#"{"type":"int64"}"#).unwrap_err();
        assert!(matches!(err, ParseError::TopLevelNotRecord { ref found, .. } if found == "int64"));
        let err = parse_schema("[1,2]").unwrap_err();
        assert!(matches!(err, ParseError::WrongValueKind { .. }));
    }

    #[test]
    fn non_canonical_metadata_false_still_parses() {
        let text = r#"{"type":"record","fields":[{"name":"a","type":{"type":"int64"},"nullable":false,"metadata":{"hasDefault":false}}]}"#;
        let schema = parse_schema(text).unwrap();
        assert!(!schema.fields[0].has_default);
    }
}
