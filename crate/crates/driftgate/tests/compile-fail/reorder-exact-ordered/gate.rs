use driftgate::gate::{static_assert_conforms, TypeDescriptor, TypeRef};
use driftgate::{PrimitiveKind, SchemaPolicy};

fn main() {
    let producer = TypeDescriptor::new("Event")
        .field("id", TypeRef::primitive(PrimitiveKind::Int64))
        .field("name", TypeRef::primitive(PrimitiveKind::String));
    let contract = TypeDescriptor::new("Event")
        .field("name", TypeRef::primitive(PrimitiveKind::String))
        .field("id", TypeRef::primitive(PrimitiveKind::Int64));
    if let Err(failure) = static_assert_conforms(&producer, &contract, SchemaPolicy::ExactOrdered) {
        eprintln!("{failure}");
        std::process::exit(1);
    }
}
