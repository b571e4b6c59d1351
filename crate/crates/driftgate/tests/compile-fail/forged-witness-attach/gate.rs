use std::io::Cursor;

use driftgate::dataset::{read_jsonl, Dataset};
use driftgate::gate::{static_assert_conforms, TypeDescriptor, TypeRef};
use driftgate::pipeline::new_pipeline;
use driftgate::{FieldShape, PrimitiveKind, SchemaPolicy, ShapeNode};

fn main() {
    let unrelated = TypeDescriptor::new("Other")
        .field("x", TypeRef::primitive(PrimitiveKind::Boolean));
    let witness = static_assert_conforms(&unrelated, &unrelated, SchemaPolicy::Exact)
        .expect("identical descriptors conform");

    let out_shape = ShapeNode::record(vec![FieldShape::new(
        "id",
        ShapeNode::primitive(PrimitiveKind::Int64),
    )]);
    let sourced = new_pipeline()
        .source(|| read_jsonl(Cursor::new("{\"id\":1}\n")), &out_shape)
        .expect("record source");
    if let Err(err) = sourced.add_sink(|_: &Dataset| Ok(0), &out_shape, SchemaPolicy::Exact, witness)
    {
        eprintln!("{err}");
        std::process::exit(1);
    }
}
