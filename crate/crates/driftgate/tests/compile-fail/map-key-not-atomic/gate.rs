use driftgate::gate::{static_assert_conforms, TypeDescriptor, TypeRef};
use driftgate::{PrimitiveKind, SchemaPolicy};

fn main() {
    let key = TypeRef::record(
        TypeDescriptor::new("Key").field("part", TypeRef::primitive(PrimitiveKind::String)),
    );
    let producer = TypeDescriptor::new("Lookup").field(
        "m",
        TypeRef::mapping(key, TypeRef::primitive(PrimitiveKind::Int64)),
    );
    let contract = TypeDescriptor::new("Lookup")
        .field("m", TypeRef::primitive(PrimitiveKind::Int64));
    if let Err(failure) = static_assert_conforms(&producer, &contract, SchemaPolicy::Exact) {
        eprintln!("{failure}");
        std::process::exit(1);
    }
}
