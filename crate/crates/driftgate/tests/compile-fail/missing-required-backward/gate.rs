use driftgate::gate::{static_assert_conforms, TypeDescriptor, TypeRef};
use driftgate::{PrimitiveKind, SchemaPolicy};

fn main() {
    let producer = TypeDescriptor::new("User")
        .field("id", TypeRef::primitive(PrimitiveKind::Int64));
    let contract = TypeDescriptor::new("User")
        .field("id", TypeRef::primitive(PrimitiveKind::Int64))
        .field("email", TypeRef::primitive(PrimitiveKind::String));
    if let Err(failure) = static_assert_conforms(&producer, &contract, SchemaPolicy::Backward) {
        eprintln!("{failure}");
        std::process::exit(1);
    }
}
