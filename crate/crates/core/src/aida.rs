//! AIDA sentences (atomic, independent, declarative, absolute claims) and
//! their URI form.
//!
//! A statement IRI is the namespace followed by the sentence percent-encoded
//! byte-wise as UTF-8: every byte outside the RFC 3986 unreserved set
//! (`A-Z a-z 0-9 - . _ ~`) becomes `%XX` with upper-case hex. Decoding is strict
//! and only accepts that exact encoding, so the mapping is a bijection.

use std::fmt;

use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use serde::{Deserialize, Serialize};

use crate::rdf::Iri;

pub const DEFAULT_NAMESPACE: &str = "http://purl.org/aida/";

/// Every byte outside the RFC 3986 unreserved set.
pub const UNRESERVED_COMPLEMENT: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'.').remove(b'_').remove(b'~');

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AidaError {
    #[error("not an AIDA sentence: {}", .0.join("; "))]
    Invalid(Vec<String>),
    #[error("IRI {0} is outside the AIDA namespace")]
    WrongNamespace(String),
    #[error("malformed percent escape at byte {0}")]
    MalformedEscape(usize),
    #[error("percent-decoded bytes are not UTF-8")]
    NotUtf8,
    #[error("IRI is not in canonical AIDA encoding")]
    NonCanonical,
}

/// Surface-rule violations, empty when the sentence is well formed.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the machine-checkable subset of the AIDA rules; atomicity and
/// independence are semantic and not checked.
pub fn validate_aida(text: &str) -> ValidationReport {
    let mut violations = Vec::new();
    if text.is_empty() {
        violations.push("sentence is empty".to_string());
    }
    if !text.ends_with('.') || text.ends_with("..") {
        violations.push("sentence must end with exactly one period".to_string());
    }
    match text.chars().next() {
        Some(c) if c.is_uppercase() || c.is_ascii_digit() => {}
        _ => violations.push("sentence must start with an uppercase letter or digit".to_string()),
    }
    if text.contains(['\n', '\r']) {
        violations.push("sentence must be a single line".to_string());
    }
    ValidationReport { violations }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AidaStatement(String);

impl AidaStatement {
    pub fn new(text: impl Into<String>) -> Result<Self, AidaError> {
        let text = text.into();
        let report = validate_aida(&text);
        if !report.is_valid() {
            return Err(AidaError::Invalid(report.violations));
        }
        Ok(Self(text))
    }

    pub fn text(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for AidaStatement {
    type Error = AidaError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<AidaStatement> for String {
    fn from(value: AidaStatement) -> Self {
        value.0
    }
}

impl fmt::Display for AidaStatement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Converts between sentences and IRIs under one namespace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AidaCodec {
    namespace: String,
}

impl Default for AidaCodec {
    fn default() -> Self {
        Self {
            namespace: DEFAULT_NAMESPACE.to_string(),
        }
    }
}

impl AidaCodec {
    pub fn new(namespace: &Iri) -> Self {
        Self {
            namespace: namespace.as_str().to_string(),
        }
    }

    pub fn namespace(&self) -> &str {
        &self.namespace
    }

    pub fn to_iri(&self, s: &AidaStatement) -> Iri {
        let encoded: String = utf8_percent_encode(s.text(), UNRESERVED_COMPLEMENT).collect();
        Iri::new(format!("{}{}", self.namespace, encoded)).expect("encoded AIDA IRI")
    }

    pub fn from_iri(&self, iri: &Iri) -> Result<AidaStatement, AidaError> {
        let encoded = iri
            .as_str()
            .strip_prefix(&self.namespace)
            .ok_or_else(|| AidaError::WrongNamespace(iri.to_string()))?;
        let text = strict_decode(encoded)?;
        let statement = AidaStatement::new(text)?;
        if self.to_iri(&statement) != *iri {
            return Err(AidaError::NonCanonical);
        }
        Ok(statement)
    }

    pub fn is_statement_iri(&self, iri: &Iri) -> bool {
        iri.as_str().starts_with(&self.namespace)
    }

    /// Parses and encodes plain sentence text.
    pub fn sentence_iri(&self, text: &str) -> Result<Iri, AidaError> {
        Ok(self.to_iri(&AidaStatement::new(text)?))
    }
}

fn strict_decode(encoded: &str) -> Result<String, AidaError> {
    let bytes = encoded.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' {
            let hex = bytes.get(i + 1..i + 3).ok_or(AidaError::MalformedEscape(i))?;
            let hi = (hex[0] as char).to_digit(16).ok_or(AidaError::MalformedEscape(i))?;
            let lo = (hex[1] as char).to_digit(16).ok_or(AidaError::MalformedEscape(i))?;
            out.push((hi * 16 + lo) as u8);
            i += 3;
        } else {
            out.push(bytes[i]);
            i += 1;
        }
    }
    String::from_utf8(out).map_err(|_| AidaError::NotUtf8)
}

/// Encodes with the default namespace.
pub fn aida_to_iri(s: &AidaStatement) -> Iri {
    AidaCodec::default().to_iri(s)
}

/// Decodes with the default namespace.
pub fn aida_from_iri(i: &Iri) -> Result<AidaStatement, AidaError> {
    AidaCodec::default().from_iri(i)
}
