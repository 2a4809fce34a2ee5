//! Bringing external data in: DOI metadata, supplemental study tables, and
//! assembly of a complete review corpus.

mod corpus;
pub mod replica;
pub(crate) mod table;

use std::path::PathBuf;
use std::time::Duration;

use crate::model::{Author, BibMetadata, Doi, ModelError};
use crate::rdf::{parse_turtle_into, Dataset, Iri, RdfError, Subject, Term};
use crate::vocab;

pub use corpus::{build_corpus, BuiltCorpus, CorpusInput};
pub use table::{ingest_relation_table, ingest_study_table, ColumnMapping, Gazetteer, StudyTable};

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("no metadata fixture for {doi} at {path}")]
    MissingFixture { doi: String, path: PathBuf },
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("metadata for {doi}: {message}")]
    Unparseable { doi: String, message: String },
    #[error("fetching {doi}: {message}")]
    Network { doi: String, message: String },
    #[error("table: {0}")]
    Table(String),
    #[error("table row {row}: {message}")]
    Row { row: usize, message: String },
    #[error(transparent)]
    Rdf(#[from] RdfError),
}

/// Where DOI metadata comes from. Both sources yield the same RDF, which is
/// parsed by the same code.
#[derive(Debug, Clone)]
pub enum MetadataSource {
    /// `<dir>/<escaped-doi>.trig`, see [`fixture_file_name`].
    Fixtures(PathBuf),
    /// Content negotiation (`text/turtle`) against a resolver such as `https://doi.org/`.
    Live { endpoint: String, timeout: Duration },
}

/// Lower-cased DOI with every reserved byte percent-escaped, e.g.
/// `10.1177%2F1931243114546448.trig`.
pub fn fixture_file_name(doi: &Doi) -> String {
    let escaped: String = percent_encoding::utf8_percent_encode(&doi.key(), crate::aida::UNRESERVED_COMPLEMENT).collect();
    format!("{escaped}.trig")
}

/// Resolves `doi` (bare or as a resolver URL) to bibliographic metadata.
/// The DOI is validated before any lookup.
pub fn fetch_doi_metadata(doi: &str, source: &MetadataSource) -> Result<BibMetadata, IngestError> {
    let doi = Doi::parse(doi)?;
    let text = match source {
        MetadataSource::Fixtures(dir) => {
            let path = dir.join(fixture_file_name(&doi));
            if !path.exists() {
                return Err(IngestError::MissingFixture { doi: doi.to_string(), path });
            }
            std::fs::read_to_string(&path).map_err(|source| IngestError::Io { path, source })?
        }
        MetadataSource::Live { endpoint, timeout } => fetch_live(&doi, endpoint, *timeout)?,
    };
    parse_doi_record(&doi, &text)
}

#[cfg(feature = "live")]
fn fetch_live(doi: &Doi, endpoint: &str, timeout: Duration) -> Result<String, IngestError> {
    let net = |e: reqwest::Error| IngestError::Network {
        doi: doi.to_string(),
        message: e.to_string(),
    };
    let client = reqwest::blocking::Client::builder().timeout(timeout).build().map_err(net)?;
    let url = format!("{}/{}", endpoint.trim_end_matches('/'), doi.as_str());
    let resp = client
        .get(url)
        .header("Accept", "text/turtle")
        .send()
        .and_then(|r| r.error_for_status())
        .map_err(net)?;
    resp.text().map_err(net)
}

#[cfg(not(feature = "live"))]
fn fetch_live(doi: &Doi, _endpoint: &str, _timeout: Duration) -> Result<String, IngestError> {
    Err(IngestError::Network {
        doi: doi.to_string(),
        message: "built without the `live` feature".into(),
    })
}

/// Extracts the bibliographic core (title, creators, date, venue,
/// publisher) from a resolver's Turtle response; other triples are ignored.
pub fn parse_doi_record(doi: &Doi, text: &str) -> Result<BibMetadata, IngestError> {
    let graph = Iri::from_static("urn:x-llr:doi-record");
    let data = parse_turtle_into(text, &graph).map_err(|e| IngestError::Unparseable {
        doi: doi.to_string(),
        message: e.to_string(),
    })?;
    let unparseable = |message: &str| IngestError::Unparseable {
        doi: doi.to_string(),
        message: message.to_string(),
    };
    let subject = data
        .iter()
        .find(|q| {
            &q.predicate == vocab::bibo_doi()
                && q.object.as_literal().is_some_and(|l| l.lexical().eq_ignore_ascii_case(doi.as_str()))
        })
        .map(|q| q.subject.clone())
        .ok_or_else(|| unparseable("no bibo:doi statement for the requested DOI"))?;

    let title = text_value(&data, &subject, vocab::dct_title()).ok_or_else(|| unparseable("no dct:title"))?;
    let year = text_value(&data, &subject, vocab::dct_date())
        .and_then(|d| d.get(..4).and_then(|y| y.parse::<i32>().ok()));
    let venue = named_value(&data, &subject, vocab::dct_is_part_of());
    let publisher = named_value(&data, &subject, vocab::dct_publisher());
    let mut authors = Vec::new();
    for q in data.iter().filter(|q| q.subject == subject && &q.predicate == vocab::dct_creator()) {
        let Some(node) = q.object.as_subject() else {
            return Err(unparseable("dct:creator is a literal"));
        };
        let Some(name) = text_value(&data, &node, vocab::foaf_name()) else {
            return Err(unparseable("creator without foaf:name"));
        };
        let orcid = data
            .iter()
            .filter(|a| a.subject == node && &a.predicate == vocab::owl_same_as())
            .filter_map(|a| a.object.as_iri())
            .find(|i| i.as_str().contains("orcid.org/"))
            .cloned();
        authors.push(Author {
            name,
            given: text_value(&data, &node, vocab::foaf_given_name()),
            family: text_value(&data, &node, vocab::foaf_family_name()),
            orcid,
        });
    }
    Ok(BibMetadata {
        iri: doi.to_iri(),
        doi: doi.clone(),
        title,
        authors,
        year,
        venue,
        publisher,
    })
}

fn text_value(data: &Dataset, s: &Subject, p: &Iri) -> Option<String> {
    data.iter()
        .filter(|q| &q.subject == s && &q.predicate == p)
        .find_map(|q| q.object.as_literal())
        .map(|l| l.lexical().to_string())
}

/// A literal value, or the title / name of a linked resource.
fn named_value(data: &Dataset, s: &Subject, p: &Iri) -> Option<String> {
    data.iter()
        .filter(|q| &q.subject == s && &q.predicate == p)
        .find_map(|q| match &q.object {
            Term::Literal(l) => Some(l.lexical().to_string()),
            Term::Iri(_) | Term::Blank(_) => {
                let node = q.object.as_subject()?;
                text_value(data, &node, vocab::dct_title()).or_else(|| text_value(data, &node, vocab::foaf_name()))
            }
        })
}
