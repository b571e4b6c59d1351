//! Line-delimited JSON ingestion and emission.
//!
//! This module makes the sink boundary real: data arrives as JSONL with no
//! declared type, a schema is inferred from what is actually present, and rows
//! are only written back out through a [`Dataset`] whose rows provably match
//! its schema. Inference is deliberately conservative: it never invents a type
//! for a field it has not observed.

use std::collections::HashSet;
use std::io::{self, BufRead, Write};

use serde_json::{Map as JsonMap, Value as Json};
use thiserror::Error;

use crate::runtime::{RuntimeField, RuntimeSchema, RuntimeType};
use crate::shape::{PrimitiveKind, StructuralPath};

/// A single datum inside a row.
///
/// `Integer` backs int32, int64, date (days since epoch), and timestamp
/// (microseconds since epoch); the attached schema decides which.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Null,
    Boolean(bool),
    Integer(i64),
    Float(f64),
    Text(String),
    Bytes(Vec<u8>),
    List(Vec<Value>),
    Record(Vec<(String, Value)>),
    Map(Vec<(Value, Value)>),
}

impl Value {
    fn kind_name(&self) -> &'static str {
        match self {
            Value::Null => "null",
            Value::Boolean(_) => "boolean",
            Value::Integer(_) => "integer",
            Value::Float(_) => "float",
            Value::Text(_) => "text",
            Value::Bytes(_) => "bytes",
            Value::List(_) => "list",
            Value::Record(_) => "record",
            Value::Map(_) => "map",
        }
    }
}

/// One record of a dataset: field name to value, in schema order once the row
/// has passed validation.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub values: Vec<(String, Value)>,
}

impl Row {
    pub fn new(values: Vec<(String, Value)>) -> Self {
        Row { values }
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.values
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v)
    }
}

/// An immutable batch of rows together with the schema they conform to.
///
/// Construction goes through [`Dataset::try_new`], which checks every row, so
/// a `Dataset` in hand is already self-consistent; the sink pin only has to
/// judge the schema.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: RuntimeSchema,
    rows: Vec<Row>,
}

impl Dataset {
    pub fn try_new(schema: RuntimeSchema, rows: Vec<Row>) -> Result<Self, DatasetError> {
        for (index, row) in rows.iter().enumerate() {
            check_row(row, &schema).map_err(|detail| DatasetError::RowMismatch {
                row: index,
                detail,
            })?;
        }
        Ok(Dataset { schema, rows })
    }

    pub fn schema(&self) -> &RuntimeSchema {
        &self.schema
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }
}

/// Why a schema could not be inferred.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InferenceError {
    #[error("AllNull at {path}: no non-null value observed")]
    AllNull { path: StructuralPath },
    #[error("EmptyArray at {path}: array is empty in every record")]
    EmptyArray { path: StructuralPath },
    #[error("Heterogeneous at {path}: {detail}")]
    Heterogeneous {
        path: StructuralPath,
        detail: String,
    },
    #[error("no records")]
    NoRecords,
}

/// Failure while building or reading a dataset.
#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("line {line}: {message}")]
    MalformedLine { line: usize, message: String },
    #[error("line {line}: every line must be a JSON object")]
    NotAnObject { line: usize },
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error("row {row} does not conform to the schema: {detail}")]
    RowMismatch { row: usize, detail: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Infers a runtime schema from parsed JSON objects.
///
/// The field set is the union across records in first-appearance order. A
/// field is nullable iff it is missing or null in at least one record.
/// Integers that fit a signed 64-bit value infer as int64; any fractional
/// value, or a mix of the two, widens to float64. Objects always infer as
/// nested records, never as maps. Fields with no non-null observation, arrays
/// that are empty everywhere, and irreconcilable element types are errors
/// rather than guesses.
pub fn infer_schema(records: &[JsonMap<String, Json>]) -> Result<RuntimeSchema, InferenceError> {
    if records.is_empty() {
        return Err(InferenceError::NoRecords);
    }
    let root = StructuralPath::root();
    let mut merged: Option<RecordObs> = None;
    for record in records {
        let obs = observe_record(record, &root)?;
        merged = Some(match merged {
            None => obs,
            Some(acc) => merge_records(acc, obs, &root)?,
        });
    }
    let merged = merged.expect("at least one record was observed");
    let fields = finalize_record(merged, &root)?;
    Ok(RuntimeSchema::new(fields))
}

/// Reads line-delimited JSON into a dataset with an inferred schema.
///
/// Blank lines are ignored. Fields missing from a given line are carried as
/// explicit nulls in that row.
pub fn read_jsonl(source: impl BufRead) -> Result<Dataset, DatasetError> {
    let mut records = Vec::new();
    for (index, line) in source.lines().enumerate() {
        let line_no = index + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Json =
            serde_json::from_str(&line).map_err(|e| DatasetError::MalformedLine {
                line: line_no,
                message: e.to_string(),
            })?;
        match value {
            Json::Object(map) => records.push(map),
            _ => return Err(DatasetError::NotAnObject { line: line_no }),
        }
    }
    let schema = infer_schema(&records)?;
    let rows = records
        .iter()
        .map(|record| coerce_row(record, &schema))
        .collect();
    Dataset::try_new(schema, rows)
}

/// Writes a dataset as line-delimited JSON and returns the row count.
///
/// One compact object per line, fields in schema order, nulls emitted
/// explicitly. Re-reading the output reproduces the same rows, and writing a
/// freshly read canonical file reproduces its bytes.
pub fn write_jsonl(dataset: &Dataset, sink: &mut impl Write) -> io::Result<usize> {
    for row in dataset.rows() {
        let object = emit_row(row, dataset.schema());
        serde_json::to_writer(&mut *sink, &object)?;
        sink.write_all(b"\n")?;
    }
    Ok(dataset.row_count())
}

// Observation lattice built up record by record before committing to a type.
#[derive(Debug)]
enum Obs {
    Unknown,
    Bool,
    Int,
    Float,
    Text,
    Array {
        element: Box<Obs>,
        contains_null: bool,
        seen_nonempty: bool,
    },
    Record(RecordObs),
}

impl Obs {
    fn describe(&self) -> &'static str {
        match self {
            Obs::Unknown => "null",
            Obs::Bool => "boolean",
            Obs::Int => "int64",
            Obs::Float => "float64",
            Obs::Text => "string",
            Obs::Array { .. } => "array",
            Obs::Record(_) => "record",
        }
    }
}

#[derive(Debug)]
struct RecordObs {
    fields: Vec<(String, FieldObs)>,
}

#[derive(Debug)]
struct FieldObs {
    obs: Obs,
    nullable: bool,
}

fn observe_record(
    record: &JsonMap<String, Json>,
    path: &StructuralPath,
) -> Result<RecordObs, InferenceError> {
    let mut fields = Vec::with_capacity(record.len());
    for (name, value) in record {
        let field_path = path.field(name);
        let field_obs = if value.is_null() {
            FieldObs {
                obs: Obs::Unknown,
                nullable: true,
            }
        } else {
            FieldObs {
                obs: observe_value(value, &field_path)?,
                nullable: false,
            }
        };
        fields.push((name.clone(), field_obs));
    }
    Ok(RecordObs { fields })
}

fn observe_value(value: &Json, path: &StructuralPath) -> Result<Obs, InferenceError> {
    match value {
        Json::Null => Ok(Obs::Unknown),
        Json::Bool(_) => Ok(Obs::Bool),
        Json::Number(n) => Ok(if n.is_i64() { Obs::Int } else { Obs::Float }),
        Json::String(_) => Ok(Obs::Text),
        Json::Array(items) => {
            let mut element = Obs::Unknown;
            let mut contains_null = false;
            let element_path = path.element();
            for item in items {
                if item.is_null() {
                    contains_null = true;
                } else {
                    let item_obs = observe_value(item, &element_path)?;
                    element = merge_obs(element, item_obs, &element_path)?;
                }
            }
            Ok(Obs::Array {
                element: Box::new(element),
                contains_null,
                seen_nonempty: !items.is_empty(),
            })
        }
        Json::Object(map) => Ok(Obs::Record(observe_record(map, path)?)),
    }
}

fn merge_obs(a: Obs, b: Obs, path: &StructuralPath) -> Result<Obs, InferenceError> {
    match (a, b) {
        (Obs::Unknown, other) | (other, Obs::Unknown) => Ok(other),
        (Obs::Bool, Obs::Bool) => Ok(Obs::Bool),
        (Obs::Int, Obs::Int) => Ok(Obs::Int),
        (Obs::Int, Obs::Float) | (Obs::Float, Obs::Int) | (Obs::Float, Obs::Float) => {
            Ok(Obs::Float)
        }
        (Obs::Text, Obs::Text) => Ok(Obs::Text),
        (
            Obs::Array {
                element: ea,
                contains_null: na,
                seen_nonempty: sa,
            },
            Obs::Array {
                element: eb,
                contains_null: nb,
                seen_nonempty: sb,
            },
        ) => Ok(Obs::Array {
            element: Box::new(merge_obs(*ea, *eb, &path.element())?),
            contains_null: na || nb,
            seen_nonempty: sa || sb,
        }),
        (Obs::Record(ra), Obs::Record(rb)) => Ok(Obs::Record(merge_records(ra, rb, path)?)),
        (a, b) => Err(InferenceError::Heterogeneous {
            path: path.clone(),
            detail: format!("{} vs {}", a.describe(), b.describe()),
        }),
    }
}

fn merge_records(
    a: RecordObs,
    b: RecordObs,
    path: &StructuralPath,
) -> Result<RecordObs, InferenceError> {
    let mut b_fields: Vec<(String, Option<FieldObs>)> =
        b.fields.into_iter().map(|(n, f)| (n, Some(f))).collect();
    let mut fields = Vec::with_capacity(a.fields.len());
    for (name, a_obs) in a.fields {
        let taken = b_fields
            .iter_mut()
            .find(|(n, f)| *n == name && f.is_some())
            .and_then(|(_, f)| f.take());
        let merged = match taken {
            Some(b_obs) => FieldObs {
                nullable: a_obs.nullable || b_obs.nullable,
                obs: merge_obs(a_obs.obs, b_obs.obs, &path.field(&name))?,
            },
            None => FieldObs {
                nullable: true,
                obs: a_obs.obs,
            },
        };
        fields.push((name, merged));
    }
    for (name, leftover) in b_fields {
        if let Some(b_obs) = leftover {
            fields.push((
                name,
                FieldObs {
                    nullable: true,
                    obs: b_obs.obs,
                },
            ));
        }
    }
    Ok(RecordObs { fields })
}

fn finalize_record(
    record: RecordObs,
    path: &StructuralPath,
) -> Result<Vec<RuntimeField>, InferenceError> {
    let mut fields = Vec::with_capacity(record.fields.len());
    for (name, field_obs) in record.fields {
        let field_path = path.field(&name);
        let data_type = finalize_obs(field_obs.obs, &field_path)?;
        fields.push(RuntimeField {
            name,
            data_type,
            nullable: field_obs.nullable,
            has_default: false,
        });
    }
    Ok(fields)
}

fn finalize_obs(obs: Obs, path: &StructuralPath) -> Result<RuntimeType, InferenceError> {
    match obs {
        Obs::Unknown => Err(InferenceError::AllNull { path: path.clone() }),
        Obs::Bool => Ok(RuntimeType::Atomic(PrimitiveKind::Boolean)),
        Obs::Int => Ok(RuntimeType::Atomic(PrimitiveKind::Int64)),
        Obs::Float => Ok(RuntimeType::Atomic(PrimitiveKind::Float64)),
        Obs::Text => Ok(RuntimeType::Atomic(PrimitiveKind::String)),
        Obs::Array {
            element,
            contains_null,
            seen_nonempty,
        } => {
            if !seen_nonempty {
                return Err(InferenceError::EmptyArray { path: path.clone() });
            }
            let element = finalize_obs(*element, &path.element())?;
            Ok(RuntimeType::array(element, contains_null))
        }
        Obs::Record(record) => Ok(RuntimeType::Record(finalize_record(record, path)?)),
    }
}

// Rebuilds a parsed JSON object as a row in schema field order, inserting
// explicit nulls for absent fields.
fn coerce_row(record: &JsonMap<String, Json>, schema: &RuntimeSchema) -> Row {
    Row::new(coerce_fields(record, &schema.fields))
}

fn coerce_fields(record: &JsonMap<String, Json>, fields: &[RuntimeField]) -> Vec<(String, Value)> {
    fields
        .iter()
        .map(|field| {
            let value = match record.get(&field.name) {
                None | Some(Json::Null) => Value::Null,
                Some(json) => coerce_value(json, &field.data_type),
            };
            (field.name.clone(), value)
        })
        .collect()
}

fn coerce_value(json: &Json, data_type: &RuntimeType) -> Value {
    match (json, data_type) {
        (Json::Bool(b), _) => Value::Boolean(*b),
        (Json::Number(n), RuntimeType::Atomic(PrimitiveKind::Float64)) => {
            Value::Float(n.as_f64().unwrap_or(f64::NAN))
        }
        (Json::Number(n), _) => match n.as_i64() {
            Some(i) => Value::Integer(i),
            None => Value::Float(n.as_f64().unwrap_or(f64::NAN)),
        },
        (Json::String(s), _) => Value::Text(s.clone()),
        (Json::Array(items), RuntimeType::Array { element, .. }) => Value::List(
            items
                .iter()
                .map(|item| match item {
                    Json::Null => Value::Null,
                    other => coerce_value(other, element),
                })
                .collect(),
        ),
        (Json::Object(map), RuntimeType::Record(fields)) => {
            Value::Record(coerce_fields(map, fields))
        }
        (Json::Null, _) => Value::Null,
        // Inference produced this schema from these records, so remaining
        // combinations cannot occur; fall back to a lossless-ish mapping.
        (Json::Array(items), _) => Value::List(
            items
                .iter()
                .map(|item| coerce_value(item, data_type))
                .collect(),
        ),
        (Json::Object(map), _) => Value::Record(
            map.iter()
                .map(|(k, v)| (k.clone(), coerce_value(v, data_type)))
                .collect(),
        ),
    }
}

fn check_row(row: &Row, schema: &RuntimeSchema) -> Result<(), String> {
    check_record_value(&row.values, &schema.fields, &StructuralPath::root())
}

fn check_record_value(
    values: &[(String, Value)],
    fields: &[RuntimeField],
    path: &StructuralPath,
) -> Result<(), String> {
    let mut seen: HashSet<&str> = HashSet::with_capacity(values.len());
    for (name, _) in values {
        if !seen.insert(name.as_str()) {
            return Err(format!("duplicate value for field \"{name}\" at {path}"));
        }
        if !fields.iter().any(|f| &f.name == name) {
            return Err(format!("value for undeclared field \"{name}\" at {path}"));
        }
    }
    for field in fields {
        let field_path = path.field(&field.name);
        let value = values
            .iter()
            .find(|(n, _)| n == &field.name)
            .map(|(_, v)| v);
        match value {
            None => return Err(format!("missing value for field at {field_path}")),
            Some(Value::Null) => {
                if !field.nullable {
                    return Err(format!("null for non-nullable field at {field_path}"));
                }
            }
            Some(value) => check_value(value, &field.data_type, &field_path)?,
        }
    }
    Ok(())
}

fn check_value(value: &Value, data_type: &RuntimeType, path: &StructuralPath) -> Result<(), String> {
    let mismatch = || {
        Err(format!(
            "expected {} at {path}, found {}",
            data_type.describe_kind(),
            value.kind_name()
        ))
    };
    match data_type {
        RuntimeType::Atomic(kind) => match (kind, value) {
            (PrimitiveKind::Boolean, Value::Boolean(_)) => Ok(()),
            (PrimitiveKind::Int32, Value::Integer(i)) => {
                if i32::try_from(*i).is_ok() {
                    Ok(())
                } else {
                    Err(format!("integer out of int32 range at {path}"))
                }
            }
            (PrimitiveKind::Int64, Value::Integer(_)) => Ok(()),
            (PrimitiveKind::Float64, Value::Float(_)) => Ok(()),
            (PrimitiveKind::String, Value::Text(_)) => Ok(()),
            (PrimitiveKind::Binary, Value::Bytes(_)) => Ok(()),
            (PrimitiveKind::Date, Value::Integer(_)) => Ok(()),
            (PrimitiveKind::Timestamp, Value::Integer(_)) => Ok(()),
            _ => mismatch(),
        },
        RuntimeType::Array {
            element,
            contains_null,
        } => match value {
            Value::List(items) => {
                let element_path = path.element();
                for item in items {
                    match item {
                        Value::Null => {
                            if !contains_null {
                                return Err(format!(
                                    "null element in non-nullable array at {element_path}"
                                ));
                            }
                        }
                        other => check_value(other, element, &element_path)?,
                    }
                }
                Ok(())
            }
            _ => mismatch(),
        },
        RuntimeType::Map {
            key,
            value: value_type,
            value_contains_null,
        } => match value {
            Value::Map(entries) => {
                let value_path = path.map_value();
                for (k, v) in entries {
                    check_value(k, &RuntimeType::Atomic(*key), path)?;
                    match v {
                        Value::Null => {
                            if !value_contains_null {
                                return Err(format!(
                                    "null value in non-nullable map at {value_path}"
                                ));
                            }
                        }
                        other => check_value(other, value_type, &value_path)?,
                    }
                }
                Ok(())
            }
            _ => mismatch(),
        },
        RuntimeType::Record(fields) => match value {
            Value::Record(values) => check_record_value(values, fields, path),
            _ => mismatch(),
        },
    }
}

impl RuntimeType {
    fn describe_kind(&self) -> &'static str {
        match self {
            RuntimeType::Atomic(kind) => kind.name(),
            RuntimeType::Array { .. } => "array",
            RuntimeType::Map { .. } => "map",
            RuntimeType::Record(_) => "record",
        }
    }
}

fn emit_row(row: &Row, schema: &RuntimeSchema) -> Json {
    emit_record(&row.values, &schema.fields)
}

fn emit_record(values: &[(String, Value)], fields: &[RuntimeField]) -> Json {
    let mut object = JsonMap::with_capacity(fields.len());
    for field in fields {
        let value = values
            .iter()
            .find(|(n, _)| n == &field.name)
            .map(|(_, v)| v)
            .unwrap_or(&Value::Null);
        object.insert(field.name.clone(), emit_value(value, &field.data_type));
    }
    Json::Object(object)
}

fn emit_value(value: &Value, data_type: &RuntimeType) -> Json {
    match value {
        Value::Null => Json::Null,
        Value::Boolean(b) => Json::Bool(*b),
        Value::Integer(i) => Json::from(*i),
        Value::Float(f) => serde_json::Number::from_f64(*f)
            .map(Json::Number)
            .unwrap_or(Json::Null),
        Value::Text(s) => Json::String(s.clone()),
        Value::Bytes(bytes) => Json::String(hex_string(bytes)),
        Value::List(items) => {
            let element = match data_type {
                RuntimeType::Array { element, .. } => element.as_ref(),
                other => other,
            };
            Json::Array(items.iter().map(|item| emit_value(item, element)).collect())
        }
        Value::Record(values) => match data_type {
            RuntimeType::Record(fields) => emit_record(values, fields),
            _ => Json::Object(
                values
                    .iter()
                    .map(|(n, v)| (n.clone(), emit_value(v, data_type)))
                    .collect(),
            ),
        },
        Value::Map(entries) => {
            let value_type = match data_type {
                RuntimeType::Map { value, .. } => value.as_ref(),
                other => other,
            };
            Json::Object(
                entries
                    .iter()
                    .map(|(k, v)| (map_key_string(k), emit_value(v, value_type)))
                    .collect(),
            )
        }
    }
}

fn map_key_string(key: &Value) -> String {
    match key {
        Value::Text(s) => s.clone(),
        Value::Integer(i) => i.to_string(),
        Value::Boolean(b) => b.to_string(),
        Value::Bytes(bytes) => hex_string(bytes),
        other => format!("{other:?}"),
    }
}

fn hex_string(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len() * 2);
    for byte in bytes {
        out.push_str(&format!("{byte:02x}"));
    }
    out
}
