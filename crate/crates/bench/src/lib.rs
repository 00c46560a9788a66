//! Shared fixtures for the benchmark targets.

use kontact_core::corpus::{load, Document};
use kontact_core::exterior::VectorField;
use kontact_core::kcontact::KContact;

/// Loads a bundled example and resolves its document.
pub fn document(name: &str) -> Document {
    let file = load(name).expect("bundled example");
    Document::resolve(file.doc).expect("document resolves")
}

/// Generator fields of a bundled example.
pub fn generator_fields(doc: &Document) -> Vec<VectorField> {
    doc.fields_named(&doc.raw.generators).expect("generators resolve")
}

/// The verified structure of an example with an explicit kform.
pub fn structure(doc: &Document) -> KContact {
    KContact::new(doc.kform.clone().expect("kform present")).expect("verifies")
}
