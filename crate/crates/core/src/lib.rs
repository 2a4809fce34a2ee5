//! Living literature reviews on top of nanopublications.

pub mod aida;
pub mod ingest;
pub mod living;
pub mod model;
pub mod nanopub;
pub mod query;
pub mod rdf;
#[cfg(feature = "testkit")]
pub mod testkit;
pub mod vocab;
