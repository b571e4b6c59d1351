//! The eight-policy conformance relation over canonical shapes.
//!
//! One engine serves both layers: the build-stage gate feeds it shapes derived
//! from declared record types, and the runtime comparator feeds it shapes
//! recovered from data-boundary schemas. A successful check mints a [`Witness`];
//! a failed check produces a [`DriftReport`] that collects every mismatch
//! instead of stopping at the first.

use std::collections::HashMap;
use std::fmt;

use crate::shape::{fingerprint, FieldShape, ShapeNode, StructuralPath};

/// Compatibility policy between a producer shape and a contract shape.
///
/// `Exact` and `ExactUnorderedCi` are semantically identical aliases: unordered
/// matching by folded field name with no extras and no missing fields. The
/// subset policies `Backward` and `Forward` are case-sensitive one-directional
/// relations. `Full` accepts everything without inspection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemaPolicy {
    Exact,
    ExactUnorderedCi,
    ExactOrdered,
    ExactOrderedCi,
    ExactByPosition,
    Backward,
    Forward,
    Full,
}

impl SchemaPolicy {
    pub const ALL: [SchemaPolicy; 8] = [
        SchemaPolicy::Exact,
        SchemaPolicy::ExactUnorderedCi,
        SchemaPolicy::ExactOrdered,
        SchemaPolicy::ExactOrderedCi,
        SchemaPolicy::ExactByPosition,
        SchemaPolicy::Backward,
        SchemaPolicy::Forward,
        SchemaPolicy::Full,
    ];

    /// Stable lowercase token used on the CLI and in serialized reports.
    pub fn cli_name(self) -> &'static str {
        match self {
            SchemaPolicy::Exact => "exact",
            SchemaPolicy::ExactUnorderedCi => "exact-unordered-ci",
            SchemaPolicy::ExactOrdered => "exact-ordered",
            SchemaPolicy::ExactOrderedCi => "exact-ordered-ci",
            SchemaPolicy::ExactByPosition => "exact-by-position",
            SchemaPolicy::Backward => "backward",
            SchemaPolicy::Forward => "forward",
            SchemaPolicy::Full => "full",
        }
    }

    pub fn from_cli_name(name: &str) -> Option<Self> {
        SchemaPolicy::ALL.iter().copied().find(|p| p.cli_name() == name)
    }
}

impl fmt::Display for SchemaPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

/// Classification of a single structural mismatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DriftKind {
    MissingField,
    ExtraField,
    NameMismatch,
    ArityMismatch,
    ShapeMismatch,
    NestedOptionalityMismatch,
    DuplicateFoldedName,
}

impl DriftKind {
    pub fn token(self) -> &'static str {
        match self {
            DriftKind::MissingField => "MissingField",
            DriftKind::ExtraField => "ExtraField",
            DriftKind::NameMismatch => "NameMismatch",
            DriftKind::ArityMismatch => "ArityMismatch",
            DriftKind::ShapeMismatch => "ShapeMismatch",
            DriftKind::NestedOptionalityMismatch => "NestedOptionalityMismatch",
            DriftKind::DuplicateFoldedName => "DuplicateFoldedName",
        }
    }
}

impl fmt::Display for DriftKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// One mismatch, located by structural path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DriftItem {
    pub kind: DriftKind,
    pub path: StructuralPath,
    pub expected: String,
    pub actual: String,
    /// Full diagnostic line; always contains the rendered path.
    pub message: String,
}

impl DriftItem {
    fn new(kind: DriftKind, path: StructuralPath, expected: String, actual: String) -> Self {
        let message = format!("{kind} at {path}: expected {expected}, actual {actual}");
        DriftItem {
            kind,
            path,
            expected,
            actual,
            message,
        }
    }
}

/// Every mismatch found between a producer and a contract under one policy.
///
/// Items are ordered by rendered path, then kind, so identical inputs always
/// render byte-identical reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DriftReport {
    pub policy: SchemaPolicy,
    pub items: Vec<DriftItem>,
}

impl DriftReport {
    fn new(policy: SchemaPolicy, mut items: Vec<DriftItem>) -> Self {
        debug_assert!(!items.is_empty(), "drift report must carry at least one item");
        items.sort_by(|a, b| {
            a.path
                .to_string()
                .cmp(&b.path.to_string())
                .then_with(|| a.kind.cmp(&b.kind))
                .then_with(|| a.expected.cmp(&b.expected))
                .then_with(|| a.actual.cmp(&b.actual))
        });
        DriftReport { policy, items }
    }

    /// One diagnostic line per item.
    pub fn render_text(&self) -> String {
        let lines: Vec<&str> = self.items.iter().map(|i| i.message.as_str()).collect();
        lines.join("\n")
    }

    pub fn contains_kind(&self, kind: DriftKind) -> bool {
        self.items.iter().any(|i| i.kind == kind)
    }
}

impl fmt::Display for DriftReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_text())
    }
}

/// Proof token minted by a successful conformance check.
///
/// Binds the producer fingerprint, contract fingerprint, and policy. Only
/// [`conforms`] constructs one, so holding a `Witness` is evidence that the
/// check ran and passed for exactly that triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Witness {
    producer_fingerprint: u64,
    contract_fingerprint: u64,
    policy: SchemaPolicy,
}

impl Witness {
    pub fn producer_fingerprint(&self) -> u64 {
        self.producer_fingerprint
    }

    pub fn contract_fingerprint(&self) -> u64 {
        self.contract_fingerprint
    }

    pub fn policy(&self) -> SchemaPolicy {
        self.policy
    }
}

/// Deterministic, locale-independent case folding for field-name comparison.
pub fn fold_name(name: &str) -> String {
    name.to_lowercase()
}

/// Checks that `producer` conforms to `contract` under `policy`.
///
/// Both inputs must be canonical record shapes. Returns a [`Witness`] on
/// success; otherwise collects every mismatch into a [`DriftReport`].
pub fn conforms(
    producer: &ShapeNode,
    contract: &ShapeNode,
    policy: SchemaPolicy,
) -> Result<Witness, DriftReport> {
    let witness = Witness {
        producer_fingerprint: fingerprint(producer),
        contract_fingerprint: fingerprint(contract),
        policy,
    };
    if policy == SchemaPolicy::Full {
        return Ok(witness);
    }
    let mut items = Vec::new();
    check_node(producer, contract, policy, &StructuralPath::root(), &mut items);
    if items.is_empty() {
        Ok(witness)
    } else {
        Err(DriftReport::new(policy, items))
    }
}

fn check_node(
    producer: &ShapeNode,
    contract: &ShapeNode,
    policy: SchemaPolicy,
    path: &StructuralPath,
    items: &mut Vec<DriftItem>,
) {
    match (producer, contract) {
        (ShapeNode::Record(p_fields), ShapeNode::Record(c_fields)) => {
            check_records(p_fields, c_fields, policy, path, items);
        }
        (ShapeNode::Primitive(p), ShapeNode::Primitive(c)) => {
            if p != c {
                items.push(DriftItem::new(
                    DriftKind::ShapeMismatch,
                    path.clone(),
                    c.name().to_string(),
                    p.name().to_string(),
                ));
            }
        }
        (ShapeNode::Sequence(p_elem), ShapeNode::Sequence(c_elem)) => {
            let (p_opt, p_inner) = strip_optional(p_elem);
            let (c_opt, c_inner) = strip_optional(c_elem);
            if p_opt != c_opt {
                items.push(DriftItem::new(
                    DriftKind::NestedOptionalityMismatch,
                    path.element(),
                    element_optionality(c_opt, "element"),
                    element_optionality(p_opt, "element"),
                ));
            }
            check_node(p_inner, c_inner, policy, &path.element(), items);
        }
        (
            ShapeNode::Mapping {
                key: p_key,
                value: p_value,
            },
            ShapeNode::Mapping {
                key: c_key,
                value: c_value,
            },
        ) => {
            if p_key != c_key {
                items.push(DriftItem::new(
                    DriftKind::ShapeMismatch,
                    path.clone(),
                    contract.describe(),
                    producer.describe(),
                ));
            }
            let (p_opt, p_inner) = strip_optional(p_value);
            let (c_opt, c_inner) = strip_optional(c_value);
            if p_opt != c_opt {
                items.push(DriftItem::new(
                    DriftKind::NestedOptionalityMismatch,
                    path.map_value(),
                    element_optionality(c_opt, "value"),
                    element_optionality(p_opt, "value"),
                ));
            }
            check_node(p_inner, c_inner, policy, &path.map_value(), items);
        }
        (p, c) => {
            items.push(DriftItem::new(
                DriftKind::ShapeMismatch,
                path.clone(),
                c.describe(),
                p.describe(),
            ));
        }
    }
}

fn strip_optional(node: &ShapeNode) -> (bool, &ShapeNode) {
    match node {
        ShapeNode::Optional(inner) => (true, inner),
        other => (false, other),
    }
}

fn element_optionality(optional: bool, position: &str) -> String {
    if optional {
        format!("optional {position}")
    } else {
        format!("non-optional {position}")
    }
}

fn check_records(
    p_fields: &[FieldShape],
    c_fields: &[FieldShape],
    policy: SchemaPolicy,
    path: &StructuralPath,
    items: &mut Vec<DriftItem>,
) {
    match policy {
        SchemaPolicy::Exact | SchemaPolicy::ExactUnorderedCi => {
            check_unordered_folded(p_fields, c_fields, policy, path, items);
        }
        SchemaPolicy::ExactOrdered => check_ordered(p_fields, c_fields, false, policy, path, items),
        SchemaPolicy::ExactOrderedCi => check_ordered(p_fields, c_fields, true, policy, path, items),
        SchemaPolicy::ExactByPosition => {
            check_arity(p_fields, c_fields, path, items);
            for (i, (pf, cf)) in p_fields.iter().zip(c_fields.iter()).enumerate() {
                check_node(&pf.shape, &cf.shape, policy, &path.position(i), items);
            }
        }
        SchemaPolicy::Backward => {
            let by_name: HashMap<&str, &FieldShape> =
                p_fields.iter().map(|f| (f.name.as_str(), f)).collect();
            for cf in c_fields {
                match by_name.get(cf.name.as_str()) {
                    Some(pf) => {
                        check_node(&pf.shape, &cf.shape, policy, &path.field(&cf.name), items);
                    }
                    None if cf.is_optional || cf.has_default => {}
                    None => {
                        items.push(DriftItem::new(
                            DriftKind::MissingField,
                            path.field(&cf.name),
                            cf.describe(),
                            "absent".to_string(),
                        ));
                    }
                }
            }
        }
        SchemaPolicy::Forward => {
            let by_name: HashMap<&str, &FieldShape> =
                c_fields.iter().map(|f| (f.name.as_str(), f)).collect();
            for pf in p_fields {
                match by_name.get(pf.name.as_str()) {
                    Some(cf) => {
                        check_node(&pf.shape, &cf.shape, policy, &path.field(&cf.name), items);
                    }
                    None => {
                        items.push(DriftItem::new(
                            DriftKind::ExtraField,
                            path.field(&pf.name),
                            "absent".to_string(),
                            pf.describe(),
                        ));
                    }
                }
            }
        }
        SchemaPolicy::Full => unreachable!("Full performs no structural inspection"),
    }
}

fn check_arity(
    p_fields: &[FieldShape],
    c_fields: &[FieldShape],
    path: &StructuralPath,
    items: &mut Vec<DriftItem>,
) {
    if p_fields.len() != c_fields.len() {
        items.push(DriftItem::new(
            DriftKind::ArityMismatch,
            path.clone(),
            format!("{} fields", c_fields.len()),
            format!("{} fields", p_fields.len()),
        ));
    }
}

fn check_ordered(
    p_fields: &[FieldShape],
    c_fields: &[FieldShape],
    fold: bool,
    policy: SchemaPolicy,
    path: &StructuralPath,
    items: &mut Vec<DriftItem>,
) {
    check_arity(p_fields, c_fields, path, items);
    for (i, (pf, cf)) in p_fields.iter().zip(c_fields.iter()).enumerate() {
        let names_match = if fold {
            fold_name(&pf.name) == fold_name(&cf.name)
        } else {
            pf.name == cf.name
        };
        if names_match {
            check_node(&pf.shape, &cf.shape, policy, &path.field(&cf.name), items);
        } else {
            // A name mismatch at this index fully describes the drift here;
            // comparing the shapes of unrelated fields would only add noise.
            items.push(DriftItem::new(
                DriftKind::NameMismatch,
                path.position(i),
                format!("\"{}\"", cf.name),
                format!("\"{}\"", pf.name),
            ));
        }
    }
}

// Unordered case-insensitive matching by folded name. Fields whose folded name
// is duplicated on their own side are reported and excluded from pairing.
fn check_unordered_folded(
    p_fields: &[FieldShape],
    c_fields: &[FieldShape],
    policy: SchemaPolicy,
    path: &StructuralPath,
    items: &mut Vec<DriftItem>,
) {
    let p_index = fold_index(p_fields, path, items);
    let c_index = fold_index(c_fields, path, items);

    for cf in c_fields {
        let folded = fold_name(&cf.name);
        let Some(c_entry) = c_index.get(&folded) else { continue };
        if c_entry.duplicated {
            continue;
        }
        match p_index.get(&folded) {
            Some(p_entry) if !p_entry.duplicated => {
                check_node(
                    &p_fields[p_entry.first].shape,
                    &cf.shape,
                    policy,
                    &path.field(&cf.name),
                    items,
                );
            }
            Some(_) => {} // duplicate already reported on the producer side
            None => {
                items.push(DriftItem::new(
                    DriftKind::MissingField,
                    path.field(&cf.name),
                    cf.describe(),
                    "absent".to_string(),
                ));
            }
        }
    }
    for pf in p_fields {
        let folded = fold_name(&pf.name);
        let Some(p_entry) = p_index.get(&folded) else { continue };
        if p_entry.duplicated || c_index.contains_key(&folded) {
            continue;
        }
        items.push(DriftItem::new(
            DriftKind::ExtraField,
            path.field(&pf.name),
            "absent".to_string(),
            pf.describe(),
        ));
    }
}

struct FoldEntry {
    first: usize,
    duplicated: bool,
}

fn fold_index(
    fields: &[FieldShape],
    path: &StructuralPath,
    items: &mut Vec<DriftItem>,
) -> HashMap<String, FoldEntry> {
    let mut index: HashMap<String, FoldEntry> = HashMap::with_capacity(fields.len());
    for (i, field) in fields.iter().enumerate() {
        let folded = fold_name(&field.name);
        match index.get_mut(&folded) {
            None => {
                index.insert(
                    folded,
                    FoldEntry {
                        first: i,
                        duplicated: false,
                    },
                );
            }
            Some(entry) => {
                items.push(DriftItem::new(
                    DriftKind::DuplicateFoldedName,
                    path.field(&field.name),
                    "unique folded field names".to_string(),
                    format!(
                        "\"{}\" and \"{}\" both fold to \"{}\"",
                        fields[entry.first].name, field.name, folded
                    ),
                ));
                entry.duplicated = true;
            }
        }
    }
    index
}
