//! Nanopublication containers: four named graphs (head, assertion,
//! provenance, publication info) under one URI.
//!
//! Graph IRIs are the nanopublication URI plus a fragment (`#head`,
//! `#assertion`, `#provenance`, `#pubinfo`). Freshly assembled nanopubs carry
//! a placeholder URI (the minting base); [`make_trusty`] replaces it with
//! `base + artifact code`.

mod index;
mod trusty;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use crate::rdf::{Dataset, Iri, Literal, Quad, RdfError, Subject, Term, Triple};
use crate::vocab;

pub use index::{build_index, resolve_latest, version_chain, NanopubIndex};
pub use trusty::{artifact_code_of, is_trusty_uri, make_trusty, trusty_digest_input, verify_trusty, ArtifactCode, SELF_SENTINEL};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NanopubError {
    #[error("assertion is empty")]
    EmptyAssertion,
    #[error("invalid nanopublication: {}", .0.violations.join("; "))]
    Invalid(ValidationReport),
    #[error("{0} is not a trusty URI")]
    NotTrusty(Iri),
    #[error("index has no elements")]
    EmptyIndex,
    #[error("not a nanopublication: {0}")]
    Structure(String),
    #[error("version chain: {0}")]
    Chain(String),
    #[error(transparent)]
    Rdf(#[from] RdfError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nanopublication {
    pub uri: Iri,
    pub head: Iri,
    pub assertion: Iri,
    pub provenance: Iri,
    pub pubinfo: Iri,
    pub data: Dataset,
}

/// Where an assertion came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    DerivedFrom(Iri),
    AttributedTo(Iri),
}

/// Publication metadata shared by every nanopub a caller mints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MintInfo {
    pub base: Iri,
    pub creator: Iri,
    pub timestamp: DateTime<Utc>,
}

pub fn format_timestamp(ts: &DateTime<Utc>) -> String {
    ts.to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// Graph IRIs for a nanopub URI.
pub fn graph_iris(uri: &Iri) -> Result<[Iri; 4], RdfError> {
    Ok([
        uri.join_str("#head")?,
        uri.join_str("#assertion")?,
        uri.join_str("#provenance")?,
        uri.join_str("#pubinfo")?,
    ])
}

/// Builds a structurally valid nanopub with placeholder URI `base`: the
/// provenance graph states `assertion prov:wasDerivedFrom derived_from`, the
/// pubinfo graph records creator and timestamp.
pub fn assemble(
    assertion_quads: Vec<Triple>,
    derived_from: Iri,
    creator: Iri,
    timestamp: DateTime<Utc>,
    base: Iri,
) -> Result<Nanopublication, NanopubError> {
    let info = MintInfo { base, creator, timestamp };
    assemble_with(assertion_quads, Provenance::DerivedFrom(derived_from), &info)
}

pub fn assemble_with(
    assertion_quads: Vec<Triple>,
    provenance: Provenance,
    info: &MintInfo,
) -> Result<Nanopublication, NanopubError> {
    if assertion_quads.is_empty() {
        return Err(NanopubError::EmptyAssertion);
    }
    let uri = info.base.clone();
    let [head, assertion, prov, pubinfo] = graph_iris(&uri)?;
    let mut prefixes = vocab::standard_prefixes();
    prefixes.insert("this", uri.clone())?;
    prefixes.insert("sub", uri.join_str("#")?)?;
    let mut data = Dataset::with_prefixes(prefixes);

    let this = Subject::Iri(uri.clone());
    for (p, o) in [
        (vocab::rdf_type(), vocab::np_nanopublication()),
        (vocab::np_has_assertion(), &assertion),
        (vocab::np_has_provenance(), &prov),
        (vocab::np_has_publication_info(), &pubinfo),
    ] {
        data.insert(Triple::new(this.clone(), p.clone(), o.clone()).in_graph(head.clone()));
    }
    for t in assertion_quads {
        data.insert(t.in_graph(assertion.clone()));
    }
    let (p, o) = match provenance {
        Provenance::DerivedFrom(src) => (vocab::prov_was_derived_from(), src),
        Provenance::AttributedTo(agent) => (vocab::prov_was_attributed_to(), agent),
    };
    data.insert(Quad::new(assertion.clone(), p.clone(), o, prov.clone()));
    data.insert(Quad::new(uri.clone(), vocab::dct_creator().clone(), info.creator.clone(), pubinfo.clone()));
    data.insert(Quad::new(
        uri.clone(),
        vocab::dct_created().clone(),
        Literal::typed(format_timestamp(&info.timestamp), vocab::xsd_date_time().clone()),
        pubinfo.clone(),
    ));
    Ok(Nanopublication {
        uri,
        head,
        assertion,
        provenance: prov,
        pubinfo,
        data,
    })
}

impl Nanopublication {
    /// Recovers the container structure from a parsed dataset by locating the
    /// head graph's `np:Nanopublication` declaration.
    pub fn from_dataset(data: Dataset) -> Result<Self, NanopubError> {
        let decls: Vec<&Quad> = data
            .iter()
            .filter(|q| &q.predicate == vocab::rdf_type() && q.object.as_iri() == Some(vocab::np_nanopublication()))
            .collect();
        let decl = match decls.as_slice() {
            [one] => *one,
            [] => return Err(NanopubError::Structure("no np:Nanopublication declaration".into())),
            _ => return Err(NanopubError::Structure("several np:Nanopublication declarations".into())),
        };
        let uri = decl
            .subject
            .as_iri()
            .cloned()
            .ok_or_else(|| NanopubError::Structure("nanopublication subject is a blank node".into()))?;
        let head = decl.graph.clone();
        let link = |p: &Iri| -> Result<Iri, NanopubError> {
            let mut found = data
                .graph(&head)
                .filter(|q| q.subject.as_iri() == Some(&uri) && &q.predicate == p)
                .filter_map(|q| q.object.as_iri().cloned());
            let first = found
                .next()
                .ok_or_else(|| NanopubError::Structure(format!("head lacks {p}")))?;
            if found.next().is_some() {
                return Err(NanopubError::Structure(format!("head has several {p}")));
            }
            Ok(first)
        };
        let assertion = link(vocab::np_has_assertion())?;
        let provenance = link(vocab::np_has_provenance())?;
        let pubinfo = link(vocab::np_has_publication_info())?;
        Ok(Self {
            uri,
            head,
            assertion,
            provenance,
            pubinfo,
            data,
        })
    }

    pub fn parse_trig(text: &str) -> Result<Self, NanopubError> {
        Self::from_dataset(crate::rdf::parse_trig(text)?)
    }

    pub fn to_trig(&self) -> String {
        crate::rdf::serialize_trig(&self.data)
    }

    pub fn assertion_quads(&self) -> impl Iterator<Item = &Quad> {
        self.data.graph(&self.assertion)
    }

    pub fn provenance_quads(&self) -> impl Iterator<Item = &Quad> {
        self.data.graph(&self.provenance)
    }

    pub fn pubinfo_quads(&self) -> impl Iterator<Item = &Quad> {
        self.data.graph(&self.pubinfo)
    }

    /// Sources the assertion is derived from.
    pub fn derived_from(&self) -> Vec<&Iri> {
        self.provenance_quads()
            .filter(|q| q.subject.as_iri() == Some(&self.assertion) && &q.predicate == vocab::prov_was_derived_from())
            .filter_map(|q| q.object.as_iri())
            .collect()
    }

    pub fn creators(&self) -> Vec<&Iri> {
        self.pubinfo_quads()
            .filter(|q| q.subject.as_iri() == Some(&self.uri) && &q.predicate == vocab::dct_creator())
            .filter_map(|q| q.object.as_iri())
            .collect()
    }

    /// Publication timestamp from pubinfo, if present and well formed.
    pub fn created(&self) -> Option<DateTime<Utc>> {
        self.pubinfo_quads()
            .filter(|q| q.subject.as_iri() == Some(&self.uri) && &q.predicate == vocab::dct_created())
            .find_map(|q| q.object.as_literal())
            .and_then(|l| DateTime::parse_from_rfc3339(l.lexical()).ok())
            .map(|t| t.with_timezone(&Utc))
    }

    pub fn artifact_code(&self) -> Option<ArtifactCode> {
        artifact_code_of(&self.uri)
    }
}

/// Lists every violated container invariant; empty iff valid.
pub fn validate(np: &Nanopublication) -> ValidationReport {
    let mut v = Vec::new();
    let graphs = [
        ("head", &np.head),
        ("assertion", &np.assertion),
        ("provenance", &np.provenance),
        ("pubinfo", &np.pubinfo),
    ];
    for (i, (name, g)) in graphs.iter().enumerate() {
        if graphs[..i].iter().any(|(_, other)| other == g) {
            v.push(format!("{name} graph IRI is not distinct"));
        }
    }
    let present = np.data.graphs();
    for (name, g) in graphs {
        if !present.contains(g) {
            v.push(format!("{name} missing"));
        }
    }
    for g in &present {
        if !graphs.iter().any(|(_, known)| known == g) {
            v.push(format!("unexpected graph {g}"));
        }
    }

    let this = Subject::Iri(np.uri.clone());
    let declares = |p: &Iri, o: &Iri| {
        np.data.contains(&Quad {
            subject: this.clone(),
            predicate: p.clone(),
            object: Term::Iri(o.clone()),
            graph: np.head.clone(),
        })
    };
    if !declares(vocab::rdf_type(), vocab::np_nanopublication()) {
        v.push("head does not declare the nanopublication type".into());
    }
    for (label, p, o) in [
        ("assertion", vocab::np_has_assertion(), &np.assertion),
        ("provenance", vocab::np_has_provenance(), &np.provenance),
        ("pubinfo", vocab::np_has_publication_info(), &np.pubinfo),
    ] {
        if !declares(p, o) {
            v.push(format!("head does not link the {label} graph"));
        }
    }
    if np.data.graph(&np.head).count() != 4 {
        v.push("head graph holds statements beyond the container links".into());
    }
    if !np.provenance_quads().any(|q| q.subject.as_iri() == Some(&np.assertion)) {
        v.push("provenance does not describe the assertion".into());
    }
    let about_this = |p: &Iri| np.pubinfo_quads().any(|q| q.subject == this && &q.predicate == p);
    if !about_this(vocab::dct_creator()) {
        v.push("pubinfo lacks a creator".into());
    }
    if !about_this(vocab::dct_created()) {
        v.push("pubinfo lacks a creation timestamp".into());
    } else if np.created().is_none() {
        v.push("pubinfo timestamp is not an ISO-8601 instant".into());
    }
    ValidationReport { violations: v }
}
