//! Content-addressed ("trusty") nanopublication URIs.
//!
//! Digest input: the canonical N-Quads of the nanopub in which every
//! self-reference (the URI itself, or the URI followed by `#...`) has its URI
//! part replaced by [`SELF_SENTINEL`]. The artifact code is `RA` followed by
//! the unpadded base64url SHA-256 of that text (43 characters).

use std::fmt;

use base64::engine::general_purpose::URL_SAFE_NO_PAD;
use base64::Engine;
use sha2::{Digest, Sha256};

use super::{validate, Nanopublication, NanopubError};
use crate::rdf::{to_nquads, Dataset, Iri};

pub const SELF_SENTINEL: &str = "urn:trusty:self";
const CODE_PREFIX: &str = "RA";
const CODE_LEN: usize = 45;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArtifactCode(String);

impl ArtifactCode {
    pub fn parse(code: &str) -> Option<Self> {
        let well_formed = code.len() == CODE_LEN
            && code.starts_with(CODE_PREFIX)
            && code[2..].bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_');
        well_formed.then(|| Self(code.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn of_digest_input(text: &str) -> Self {
        let digest = Sha256::digest(text.as_bytes());
        Self(format!("{CODE_PREFIX}{}", URL_SAFE_NO_PAD.encode(digest)))
    }
}

impl fmt::Display for ArtifactCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The trailing artifact code of a trusty URI.
pub fn artifact_code_of(uri: &Iri) -> Option<ArtifactCode> {
    let s = uri.as_str();
    let at = s.len().checked_sub(CODE_LEN)?;
    ArtifactCode::parse(s.get(at..)?)
}

pub fn is_trusty_uri(uri: &Iri) -> bool {
    artifact_code_of(uri).is_some()
}

fn substitute_self(data: &Dataset, self_uri: &str) -> Dataset {
    data.map_iris(|iri| {
        let s = iri.as_str();
        match s.strip_prefix(self_uri) {
            Some(rest) if rest.is_empty() || rest.starts_with('#') => {
                Iri::new(format!("{SELF_SENTINEL}{rest}")).expect("sentinel IRI")
            }
            _ => iri.clone(),
        }
    })
}

/// The exact text that is hashed for a nanopub whose self URI is `self_uri`.
pub fn trusty_digest_input(data: &Dataset, self_uri: &Iri) -> String {
    to_nquads(&substitute_self(data, self_uri.as_str()))
}

/// Hashes the nanopub and rewrites its placeholder URI to `base + code`.
/// Already-trusty input is returned unchanged.
pub fn make_trusty(np: &Nanopublication) -> Result<Nanopublication, NanopubError> {
    let report = validate(np);
    if !report.is_valid() {
        return Err(NanopubError::Invalid(report));
    }
    if verify_trusty(np) {
        return Ok(np.clone());
    }
    let placeholder = np.uri.as_str();
    let code = ArtifactCode::of_digest_input(&trusty_digest_input(&np.data, &np.uri));
    let rewrite = |iri: &Iri| -> Iri {
        match iri.as_str().strip_prefix(placeholder) {
            Some(rest) if rest.is_empty() || rest.starts_with('#') => {
                Iri::new(format!("{placeholder}{code}{rest}")).expect("trusty IRI")
            }
            _ => iri.clone(),
        }
    };
    let data = np.data.map_iris(rewrite);
    Ok(Nanopublication {
        uri: rewrite(&np.uri),
        head: rewrite(&np.head),
        assertion: rewrite(&np.assertion),
        provenance: rewrite(&np.provenance),
        pubinfo: rewrite(&np.pubinfo),
        data,
    })
}

/// True iff the URI carries an artifact code reproduced by rehashing.
pub fn verify_trusty(np: &Nanopublication) -> bool {
    let Some(code) = artifact_code_of(&np.uri) else {
        return false;
    };
    ArtifactCode::of_digest_input(&trusty_digest_input(&np.data, &np.uri)) == code
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nanopub::assemble;
    use crate::rdf::{Literal, Triple};
    use chrono::{TimeZone, Utc};

    fn iri(s: &str) -> Iri {
        Iri::new(s).unwrap()
    }

    fn np_with(value: &str) -> Nanopublication {
        assemble(
            vec![Triple::new(iri("https://w3id.org/np/#study"), iri("http://x/p"), Literal::string(value))],
            iri("https://doi.org/10.1/x"),
            iri("https://example.org/c"),
            Utc.with_ymd_and_hms(2021, 1, 1, 0, 0, 0).unwrap(),
            iri("https://w3id.org/np/"),
        )
        .unwrap()
    }

    #[test]
    fn make_then_verify() {
        let t = make_trusty(&np_with("417")).unwrap();
        assert!(verify_trusty(&t));
        let code = t.artifact_code().unwrap();
        assert_eq!(code.as_str().len(), 45);
        assert!(t.uri.as_str().starts_with("https://w3id.org/np/RA"));
        assert_eq!(t.assertion.as_str(), format!("{}#assertion", t.uri));
        // minted entity IRIs move along with the nanopub
        assert!(t.assertion_quads().all(|q| q.subject.as_iri().unwrap().as_str() == format!("{}#study", t.uri)));
        assert!(validate(&t).is_valid());
    }

    #[test]
    fn idempotent() {
        let t = make_trusty(&np_with("417")).unwrap();
        assert_eq!(make_trusty(&t).unwrap(), t);
    }

    #[test]
    fn placeholder_is_not_trusty() {
        assert!(!verify_trusty(&np_with("417")));
    }

    #[test]
    fn content_change_changes_code() {
        let a = make_trusty(&np_with("417")).unwrap();
        let b = make_trusty(&np_with("418")).unwrap();
        assert_ne!(a.artifact_code(), b.artifact_code());
    }

    #[test]
    fn references_to_sibling_nanopubs_are_kept() {
        let sibling = make_trusty(&np_with("1")).unwrap();
        let sibling_study = sibling.uri.join_str("#study").unwrap();
        let np = assemble(
            vec![Triple::new(iri("http://doi.org/10.1/p"), iri("http://x/study"), sibling_study.clone())],
            iri("http://doi.org/10.1/p"),
            iri("https://example.org/c"),
            Utc.with_ymd_and_hms(2021, 1, 1, 0, 0, 0).unwrap(),
            iri("https://w3id.org/np/"),
        )
        .unwrap();
        let t = make_trusty(&np).unwrap();
        assert!(t.assertion_quads().any(|q| q.object.as_iri() == Some(&sibling_study)));
        assert!(verify_trusty(&t));
    }

    #[test]
    fn artifact_code_parsing() {
        assert!(ArtifactCode::parse("RA").is_none());
        let ok = format!("RA{}", "a".repeat(43));
        assert!(ArtifactCode::parse(&ok).is_some());
        assert!(ArtifactCode::parse(&format!("RB{}", "a".repeat(43))).is_none());
        assert!(ArtifactCode::parse(&format!("RA{}=", "a".repeat(42))).is_none());
    }
}
