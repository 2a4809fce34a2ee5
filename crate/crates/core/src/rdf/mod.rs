//! RDF terms, quads and datasets, with a TriG-subset reader and a canonical
//! TriG / N-Quads writer.

mod dataset;
mod parser;
mod serializer;
mod term;

pub use dataset::{expand, to_nquads, Dataset, PrefixMap, Quad, Triple};
pub use parser::{parse_trig, parse_turtle_into};
pub use serializer::serialize_trig;
pub use term::{BlankNode, Iri, Literal, NQuadsForm, Subject, Term, RDF_LANG_STRING, XSD_STRING};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RdfError {
    #[error("invalid IRI {iri:?}: {reason}")]
    InvalidIri { iri: String, reason: String },
    #[error("invalid blank node label {0:?}")]
    InvalidBlankNode(String),
    #[error("invalid language tag {0:?}")]
    InvalidLanguageTag(String),
    #[error("invalid prefix label {0:?}")]
    InvalidPrefixLabel(String),
    #[error("{0:?} is not a prefixed name")]
    NotAPrefixedName(String),
    #[error("undefined prefix {0:?}")]
    UndefinedPrefix(String),
    #[error("{line}:{column}: undefined prefix {prefix:?}")]
    UndefinedPrefixAt { prefix: String, line: usize, column: usize },
    #[error("{line}:{column}: relative IRI {iri:?} without base")]
    RelativeIri { iri: String, line: usize, column: usize },
    #[error("{line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
}
