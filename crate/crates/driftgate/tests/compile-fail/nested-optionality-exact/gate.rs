use driftgate::gate::{static_assert_conforms, TypeDescriptor, TypeRef};
use driftgate::{PrimitiveKind, SchemaPolicy};

fn main() {
    let producer = TypeDescriptor::new("Post").field(
        "tags",
        TypeRef::sequence(TypeRef::optional(TypeRef::primitive(PrimitiveKind::String))),
    );
    let contract = TypeDescriptor::new("Post").field(
        "tags",
        TypeRef::sequence(TypeRef::primitive(PrimitiveKind::String)),
    );
    if let Err(failure) = static_assert_conforms(&producer, &contract, SchemaPolicy::Exact) {
        eprintln!("{failure}");
        std::process::exit(1);
    }
}
