//! Shared corpus builders and the naive reference checker used by the
//! integration and acceptance suites.
#![allow(dead_code)]

pub mod golden;

use driftgate::runtime::{RuntimeSchema, RuntimeType};
use driftgate::{FieldShape, PrimitiveKind, SchemaPolicy, ShapeNode};

/// Deterministic pool of canonical record shapes: depth up to 3, width up to
/// 3, primitives drawn from int64 and string, with sequence, mapping, and
/// nested-optional variants plus case-colliding and flagged field names.
/// Pairing every element with every element yields over 10,000 pairs.
pub fn shape_universe() -> Vec<ShapeNode> {
    let mut field_shapes: Vec<ShapeNode> = Vec::new();
    for kind in [PrimitiveKind::Int64, PrimitiveKind::String] {
        let prim = ShapeNode::primitive(kind);
        field_shapes.push(prim.clone());
        field_shapes.push(ShapeNode::sequence(prim.clone()));
        field_shapes.push(ShapeNode::sequence(ShapeNode::optional(prim.clone())));
        field_shapes.push(ShapeNode::mapping(PrimitiveKind::String, prim.clone()));
        field_shapes.push(ShapeNode::mapping(
            PrimitiveKind::Int64,
            ShapeNode::optional(prim),
        ));
    }

    let mut universe = Vec::new();
    for name in ["a", "A"] {
        for shape in &field_shapes {
            universe.push(ShapeNode::record(vec![FieldShape::new(name, shape.clone())]));
            universe.push(ShapeNode::record(vec![
                FieldShape::new(name, shape.clone()).optional(),
            ]));
            universe.push(ShapeNode::record(vec![
                FieldShape::new(name, shape.clone()).with_default(),
            ]));
        }
    }
    for (first, second) in [("a", "b"), ("a", "A"), ("b", "a")] {
        for first_shape in [0usize, 7, 3] {
            for second_shape in [5usize, 2, 8] {
                universe.push(ShapeNode::record(vec![
                    FieldShape::new(first, field_shapes[first_shape].clone()),
                    FieldShape::new(second, field_shapes[second_shape].clone()),
                ]));
            }
        }
    }
    universe.push(ShapeNode::record(vec![
        FieldShape::new("a", field_shapes[0].clone()),
        FieldShape::new("b", field_shapes[5].clone()),
        FieldShape::new("c", field_shapes[2].clone()),
    ]));
    universe.push(ShapeNode::record(vec![
        FieldShape::new("a", field_shapes[5].clone()),
        FieldShape::new("A", field_shapes[5].clone()),
        FieldShape::new("b", field_shapes[3].clone()),
    ]));

    let seeds: Vec<ShapeNode> = universe.iter().take(8).cloned().collect();
    for inner in &seeds {
        universe.push(ShapeNode::record(vec![FieldShape::new(
            "x",
            inner.clone(),
        )]));
    }
    for inner in seeds.iter().take(4) {
        universe.push(ShapeNode::record(vec![
            FieldShape::new("x", inner.clone()),
            FieldShape::new("b", field_shapes[0].clone()),
        ]));
    }
    let two_deep_start = universe.len() - 12;
    let deep: Vec<ShapeNode> = universe[two_deep_start..two_deep_start + 3].to_vec();
    for inner in deep {
        universe.push(ShapeNode::record(vec![FieldShape::new("y", inner)]));
    }
    universe
}

/// Shapes as a user might write them before canonicalization, valid and
/// invalid alike: every primitive kind, optional wrappers in every position
/// including doubled ones, and duplicated field names.
pub fn raw_shape_universe() -> Vec<ShapeNode> {
    let mut shapes = Vec::new();
    for kind in PrimitiveKind::ALL {
        let prim = ShapeNode::primitive(kind);
        shapes.push(prim.clone());
        shapes.push(ShapeNode::optional(prim.clone()));
        shapes.push(ShapeNode::optional(ShapeNode::optional(prim.clone())));
        shapes.push(ShapeNode::sequence(ShapeNode::optional(prim.clone())));
        shapes.push(ShapeNode::sequence(ShapeNode::optional(ShapeNode::optional(
            prim.clone(),
        ))));
        shapes.push(ShapeNode::mapping(kind, prim.clone()));
        shapes.push(ShapeNode::mapping(
            PrimitiveKind::String,
            ShapeNode::optional(ShapeNode::optional(prim)),
        ));
    }
    let int64 = ShapeNode::primitive(PrimitiveKind::Int64);
    let mut records = Vec::new();
    for field_shape in shapes.iter().take(10) {
        records.push(ShapeNode::record(vec![FieldShape::new(
            "a",
            field_shape.clone(),
        )]));
    }
    records.push(ShapeNode::record(vec![
        FieldShape::new("a", int64.clone()),
        FieldShape::new("a", int64.clone()),
    ]));
    records.push(ShapeNode::record(vec![
        FieldShape::new("a", int64.clone()),
        FieldShape::new("A", int64.clone()),
        FieldShape::new("a", int64.clone()),
    ]));
    for inner in records.clone().into_iter().take(6) {
        records.push(ShapeNode::record(vec![
            FieldShape::new("outer", inner),
            FieldShape::new("b", ShapeNode::optional(int64.clone())),
        ]));
    }
    shapes.extend(records);
    shapes
}

/// Brute-force acceptance predicate for raw shapes: no optional directly
/// inside an optional, no exactly duplicated field names, atomic map keys
/// only, and no bare optional at the root. Written against the documented
/// rules, not the canonicalizer.
pub fn plausibly_canonical(shape: &ShapeNode) -> bool {
    fn no_double_optional(node: &ShapeNode) -> bool {
        match node {
            ShapeNode::Primitive(_) => true,
            ShapeNode::Optional(inner) => {
                !matches!(inner.as_ref(), ShapeNode::Optional(_)) && no_double_optional(inner)
            }
            ShapeNode::Sequence(element) => no_double_optional(element),
            ShapeNode::Mapping { value, .. } => no_double_optional(value),
            ShapeNode::Record(fields) => fields.iter().all(|f| no_double_optional(&f.shape)),
        }
    }
    fn no_duplicate_names(node: &ShapeNode) -> bool {
        match node {
            ShapeNode::Primitive(_) => true,
            ShapeNode::Optional(inner) => no_duplicate_names(inner),
            ShapeNode::Sequence(element) => no_duplicate_names(element),
            ShapeNode::Mapping { value, .. } => no_duplicate_names(value),
            ShapeNode::Record(fields) => {
                let mut names: Vec<&str> = fields.iter().map(|f| f.name.as_str()).collect();
                names.sort_unstable();
                names.windows(2).all(|w| w[0] != w[1])
                    && fields.iter().all(|f| no_duplicate_names(&f.shape))
            }
        }
    }
    !matches!(shape, ShapeNode::Optional(_)) && no_double_optional(shape) && no_duplicate_names(shape)
}

/// True when any record in the tree has two field names that case-fold to
/// the same string. Such records drift against themselves under the folding
/// unordered policies.
pub fn has_fold_collision_anywhere(shape: &ShapeNode) -> bool {
    match shape {
        ShapeNode::Primitive(_) => false,
        ShapeNode::Optional(inner) => has_fold_collision_anywhere(inner),
        ShapeNode::Sequence(element) => has_fold_collision_anywhere(element),
        ShapeNode::Mapping { value, .. } => has_fold_collision_anywhere(value),
        ShapeNode::Record(fields) => {
            folded_collision(fields)
                || fields.iter().any(|f| has_fold_collision_anywhere(&f.shape))
        }
    }
}

fn nullability_sites(ty: &RuntimeType) -> usize {
    match ty {
        RuntimeType::Atomic(_) => 0,
        RuntimeType::Array { element, .. } => 1 + nullability_sites(element),
        RuntimeType::Map { value, .. } => 1 + nullability_sites(value),
        RuntimeType::Record(fields) => fields.iter().map(|f| nullability_sites(&f.data_type)).sum(),
    }
}

fn flip_site(ty: &mut RuntimeType, remaining: &mut isize) {
    match ty {
        RuntimeType::Atomic(_) => {}
        RuntimeType::Array {
            element,
            contains_null,
        } => {
            if *remaining == 0 {
                *contains_null = !*contains_null;
            }
            *remaining -= 1;
            flip_site(element, remaining);
        }
        RuntimeType::Map {
            value,
            value_contains_null,
            ..
        } => {
            if *remaining == 0 {
                *value_contains_null = !*value_contains_null;
            }
            *remaining -= 1;
            flip_site(value, remaining);
        }
        RuntimeType::Record(fields) => {
            for field in fields {
                flip_site(&mut field.data_type, remaining);
            }
        }
    }
}

/// Every variant of `schema` that differs in exactly one nested nullability
/// flag, plus one variant with every flag flipped.
pub fn nullability_variants(schema: &RuntimeSchema) -> Vec<RuntimeSchema> {
    let sites: usize = schema.fields.iter().map(|f| nullability_sites(&f.data_type)).sum();
    let mut variants = Vec::new();
    for site in 0..sites {
        let mut variant = schema.clone();
        let mut remaining = site as isize;
        for field in &mut variant.fields {
            flip_site(&mut field.data_type, &mut remaining);
        }
        variants.push(variant);
    }
    if sites > 1 {
        let mut all = schema.clone();
        for site in 0..sites {
            let mut remaining = site as isize;
            for field in &mut all.fields {
                flip_site(&mut field.data_type, &mut remaining);
            }
        }
        variants.push(all);
    }
    variants
}

/// Naive transcription of the policy semantics: recursive boolean verdicts,
/// no reports, no paths, no sharing with the engine.
pub fn reference_conforms(producer: &ShapeNode, contract: &ShapeNode, policy: SchemaPolicy) -> bool {
    if matches!(policy, SchemaPolicy::Full) {
        return true;
    }
    nodes_agree(producer, contract, policy)
}

fn nodes_agree(producer: &ShapeNode, contract: &ShapeNode, policy: SchemaPolicy) -> bool {
    match (producer, contract) {
        (ShapeNode::Primitive(p), ShapeNode::Primitive(c)) => p == c,
        (ShapeNode::Sequence(p), ShapeNode::Sequence(c)) => wrapped_agree(p, c, policy),
        (
            ShapeNode::Mapping {
                key: pk,
                value: pv,
            },
            ShapeNode::Mapping {
                key: ck,
                value: cv,
            },
        ) => pk == ck && wrapped_agree(pv, cv, policy),
        (ShapeNode::Record(p), ShapeNode::Record(c)) => fields_agree(p, c, policy),
        _ => false,
    }
}

fn wrapped_agree(producer: &ShapeNode, contract: &ShapeNode, policy: SchemaPolicy) -> bool {
    match (producer, contract) {
        (ShapeNode::Optional(p), ShapeNode::Optional(c)) => nodes_agree(p, c, policy),
        (ShapeNode::Optional(_), _) | (_, ShapeNode::Optional(_)) => false,
        _ => nodes_agree(producer, contract, policy),
    }
}

fn fold(name: &str) -> String {
    name.to_lowercase()
}

fn folded_collision(fields: &[FieldShape]) -> bool {
    let mut folded: Vec<String> = fields.iter().map(|f| fold(&f.name)).collect();
    folded.sort_unstable();
    folded.windows(2).any(|w| w[0] == w[1])
}

fn fields_agree(producer: &[FieldShape], contract: &[FieldShape], policy: SchemaPolicy) -> bool {
    match policy {
        SchemaPolicy::Full => true,
        SchemaPolicy::Exact | SchemaPolicy::ExactUnorderedCi => {
            if folded_collision(producer) || folded_collision(contract) {
                return false;
            }
            producer.len() == contract.len()
                && producer.iter().all(|p| {
                    match contract.iter().find(|c| fold(&c.name) == fold(&p.name)) {
                        Some(c) => nodes_agree(&p.shape, &c.shape, policy),
                        None => false,
                    }
                })
        }
        SchemaPolicy::ExactOrdered => {
            producer.len() == contract.len()
                && producer
                    .iter()
                    .zip(contract)
                    .all(|(p, c)| p.name == c.name && nodes_agree(&p.shape, &c.shape, policy))
        }
        SchemaPolicy::ExactOrderedCi => {
            producer.len() == contract.len()
                && producer.iter().zip(contract).all(|(p, c)| {
                    fold(&p.name) == fold(&c.name) && nodes_agree(&p.shape, &c.shape, policy)
                })
        }
        SchemaPolicy::ExactByPosition => {
            producer.len() == contract.len()
                && producer
                    .iter()
                    .zip(contract)
                    .all(|(p, c)| nodes_agree(&p.shape, &c.shape, policy))
        }
        SchemaPolicy::Backward => contract.iter().all(|c| {
            match producer.iter().find(|p| p.name == c.name) {
                Some(p) => nodes_agree(&p.shape, &c.shape, policy),
                None => c.is_optional || c.has_default,
            }
        }),
        SchemaPolicy::Forward => producer.iter().all(|p| {
            match contract.iter().find(|c| c.name == p.name) {
                Some(c) => nodes_agree(&p.shape, &c.shape, policy),
                None => false,
            }
        }),
    }
}
