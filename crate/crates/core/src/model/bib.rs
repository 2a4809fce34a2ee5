//! DOIs and the bibliographic metadata harvested for them.

use std::fmt;

use percent_encoding::{utf8_percent_encode, AsciiSet, CONTROLS};
use serde::{Deserialize, Serialize};

use super::{mint_iri, EntityKind, ModelError};
use crate::nanopub::{assemble_with, MintInfo, Nanopublication, Provenance};
use crate::rdf::{Iri, Literal, Subject, Term, Triple};
use crate::vocab;

const DOI_RESOLVER: &str = "https://doi.org/";
const RESOLVER_PREFIXES: [&str; 5] = ["https://doi.org/", "http://doi.org/", "https://dx.doi.org/", "http://dx.doi.org/", "doi:"];
const IRI_UNSAFE: &AsciiSet = &CONTROLS
    .add(b' ')
    .add(b'"')
    .add(b'<')
    .add(b'>')
    .add(b'\\')
    .add(b'^')
    .add(b'`')
    .add(b'{')
    .add(b'|')
    .add(b'}')
    .add(b'#')
    .add(b'?')
    .add(b'%');

/// A DOI name such as `10.1177/1931243114546448`, kept in its original case.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Doi(String);

impl Doi {
    /// Accepts a bare DOI, a `doi:` name or a resolver URL.
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let text = text.trim();
        let bare = RESOLVER_PREFIXES
            .iter()
            .find_map(|p| text.strip_prefix(p))
            .unwrap_or(text);
        let bad = || ModelError::InvalidDoi(text.to_string());
        let rest = bare.strip_prefix("10.").ok_or_else(bad)?;
        let (registrant, suffix) = rest.split_once('/').ok_or_else(bad)?;
        let registrant_ok = !registrant.is_empty()
            && registrant.split('.').all(|part| !part.is_empty() && part.bytes().all(|b| b.is_ascii_digit()));
        if !registrant_ok || suffix.is_empty() || suffix.chars().any(char::is_whitespace) {
            return Err(bad());
        }
        Ok(Self(bare.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Case-folded form; DOI names compare case-insensitively.
    pub fn key(&self) -> String {
        self.0.to_ascii_lowercase()
    }

    /// `https://doi.org/<doi>` with IRI-unsafe characters escaped.
    pub fn to_iri(&self) -> Iri {
        let escaped: String = utf8_percent_encode(&self.0, IRI_UNSAFE).collect();
        Iri::new(format!("{DOI_RESOLVER}{escaped}")).expect("DOI IRI")
    }

    /// The DOI behind a resolver IRI, if it is one.
    pub fn from_iri(iri: &Iri) -> Option<Self> {
        let s = iri.as_str();
        RESOLVER_PREFIXES[..4].iter().find_map(|p| s.strip_prefix(p))?;
        let decoded = percent_encoding::percent_decode_str(s).decode_utf8().ok()?;
        Self::parse(&decoded).ok()
    }
}

impl fmt::Display for Doi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for Doi {
    type Error = ModelError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        Self::parse(&value)
    }
}

impl From<Doi> for String {
    fn from(value: Doi) -> Self {
        value.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Author {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub given: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orcid: Option<Iri>,
}

impl Author {
    /// Identity used when counting distinct authors: ORCID when known,
    /// otherwise the whitespace-normalized, case-folded name.
    pub fn identity(&self) -> String {
        match &self.orcid {
            Some(o) => o.as_str().to_string(),
            None => self.name.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase(),
        }
    }
}

/// Metadata of one paper. `iri` is the paper as referenced from the review.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BibMetadata {
    pub iri: Iri,
    pub doi: Doi,
    pub title: String,
    pub authors: Vec<Author>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub year: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub venue: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub publisher: Option<String>,
}

/// Authors are minted as `sub:author<k>` so their order survives the round
/// trip; an ORCID is attached with `owl:sameAs`.
pub fn bib_to_nanopub(m: &BibMetadata, info: &MintInfo) -> Result<Nanopublication, ModelError> {
    if m.title.trim().is_empty() {
        return Err(ModelError::Invalid("metadata title is empty".into()));
    }
    let s = m.iri.clone();
    let lit = |v: &str| Term::Literal(Literal::string(v));
    let mut t = vec![
        Triple::new(s.clone(), vocab::bibo_doi().clone(), lit(m.doi.as_str())),
        Triple::new(s.clone(), vocab::dct_title().clone(), lit(&m.title)),
    ];
    if let Some(y) = m.year {
        t.push(Triple::new(s.clone(), vocab::dct_date().clone(), lit(&y.to_string())));
    }
    if let Some(v) = &m.venue {
        t.push(Triple::new(s.clone(), vocab::dct_is_part_of().clone(), lit(v)));
    }
    if let Some(p) = &m.publisher {
        t.push(Triple::new(s.clone(), vocab::dct_publisher().clone(), lit(p)));
    }
    for (k, a) in m.authors.iter().enumerate() {
        let node = mint_iri(EntityKind::Author, &info.base, &(k + 1).to_string());
        t.push(Triple::new(s.clone(), vocab::dct_creator().clone(), node.clone()));
        t.push(Triple::new(node.clone(), vocab::rdf_type().clone(), vocab::foaf_person().clone()));
        t.push(Triple::new(node.clone(), vocab::foaf_name().clone(), lit(&a.name)));
        if let Some(g) = &a.given {
            t.push(Triple::new(node.clone(), vocab::foaf_given_name().clone(), lit(g)));
        }
        if let Some(f) = &a.family {
            t.push(Triple::new(node.clone(), vocab::foaf_family_name().clone(), lit(f)));
        }
        if let Some(o) = &a.orcid {
            t.push(Triple::new(node.clone(), vocab::owl_same_as().clone(), o.clone()));
        }
    }
    Ok(assemble_with(t, Provenance::DerivedFrom(m.doi.to_iri()), info)?)
}

pub fn bib_from_nanopub(np: &Nanopublication) -> Result<BibMetadata, ModelError> {
    super::expect_kind(np, super::NanopubKind::DoiMetadata)?;
    let doi_quad = np
        .assertion_quads()
        .find(|q| &q.predicate == vocab::bibo_doi())
        .ok_or_else(|| ModelError::WrongKind("no bibo:doi in assertion".into()))?;
    let Subject::Iri(iri) = &doi_quad.subject else {
        return Err(ModelError::Invalid("metadata subject is a blank node".into()));
    };
    let text_of = |subject: &Iri, p: &Iri| -> Result<Option<String>, ModelError> {
        let mut values = np
            .assertion_quads()
            .filter(|q| q.subject.as_iri() == Some(subject) && &q.predicate == p)
            .map(|q| {
                q.object
                    .as_literal()
                    .map(|l| l.lexical().to_string())
                    .ok_or_else(|| ModelError::Invalid(format!("{p} must be a literal")))
            });
        let first = values.next().transpose()?;
        if values.next().is_some() {
            return Err(ModelError::Invalid(format!("several values for {p}")));
        }
        Ok(first)
    };
    let doi = Doi::parse(&text_of(iri, vocab::bibo_doi())?.unwrap_or_default())?;
    let title = text_of(iri, vocab::dct_title())?.ok_or_else(|| ModelError::Invalid("metadata lacks a title".into()))?;
    let year = text_of(iri, vocab::dct_date())?
        .map(|y| y.parse::<i32>().map_err(|_| ModelError::Invalid(format!("bad year {y}"))))
        .transpose()?;

    let mut nodes: Vec<(usize, Iri)> = Vec::new();
    for q in np.assertion_quads().filter(|q| q.subject.as_iri() == Some(iri) && &q.predicate == vocab::dct_creator()) {
        let node = q
            .object
            .as_iri()
            .ok_or_else(|| ModelError::Invalid("dct:creator must be an IRI".into()))?;
        let ordinal = node
            .as_str()
            .rsplit_once("#author")
            .and_then(|(_, k)| k.parse::<usize>().ok())
            .ok_or_else(|| ModelError::Invalid(format!("unexpected author node {node}")))?;
        nodes.push((ordinal, node.clone()));
    }
    nodes.sort();
    let mut authors = Vec::new();
    for (_, node) in nodes {
        let orcid = np
            .assertion_quads()
            .find(|q| q.subject.as_iri() == Some(&node) && &q.predicate == vocab::owl_same_as())
            .and_then(|q| q.object.as_iri().cloned());
        authors.push(Author {
            name: text_of(&node, vocab::foaf_name())?.ok_or_else(|| ModelError::Invalid("author lacks a name".into()))?,
            given: text_of(&node, vocab::foaf_given_name())?,
            family: text_of(&node, vocab::foaf_family_name())?,
            orcid,
        });
    }
    Ok(BibMetadata {
        iri: iri.clone(),
        doi,
        title,
        authors,
        year,
        venue: text_of(iri, vocab::dct_is_part_of())?,
        publisher: text_of(iri, vocab::dct_publisher())?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doi_forms() {
        let d = Doi::parse("10.1177/1931243114546448").unwrap();
        assert_eq!(d.to_iri().as_str(), "https://doi.org/10.1177/1931243114546448");
        assert_eq!(Doi::parse("https://doi.org/10.1177/1931243114546448").unwrap(), d);
        assert_eq!(Doi::parse("doi:10.1177/1931243114546448").unwrap(), d);
        let hicss = Iri::new("http://doi.org/10.1109/HICSS.2010.412").unwrap();
        assert_eq!(Doi::from_iri(&hicss).unwrap().key(), "10.1109/hicss.2010.412");
        assert_eq!(Doi::from_iri(&Iri::new("http://example.org/10.1/x").unwrap()), None);
    }

    #[test]
    fn malformed_dois() {
        for bad in ["10.", "10./x", "11.1/x", "10.12a/x", "10.1/", "10.1/a b", ""] {
            assert!(Doi::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn unsafe_suffix_characters_are_escaped() {
        let d = Doi::parse("10.1002/(SICI)1097<x>#1").unwrap();
        let iri = d.to_iri();
        assert_eq!(iri.as_str(), "https://doi.org/10.1002/(SICI)1097%3Cx%3E%231");
        assert_eq!(Doi::from_iri(&iri).unwrap(), d);
    }
}
