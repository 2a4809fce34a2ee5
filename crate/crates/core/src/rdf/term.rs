use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::RdfError;

pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";
pub const RDF_LANG_STRING: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString";

/// An absolute IRI.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, RdfError> {
        let value = value.into();
        check_iri(&value)?;
        Ok(Self(value))
    }

    /// Builds an IRI from a string already known to be absolute and well formed.
    /// Panics otherwise; reserved for compile-time constants.
    pub fn from_static(value: &'static str) -> Self {
        Self::new(value).unwrap_or_else(|e| panic!("invalid static IRI {value}: {e}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0
    }

    /// Appends `suffix` and re-validates.
    pub fn join_str(&self, suffix: &str) -> Result<Self, RdfError> {
        Self::new(format!("{}{}", self.0, suffix))
    }
}

impl std::str::FromStr for Iri {
    type Err = RdfError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(s)
    }
}

fn check_iri(value: &str) -> Result<(), RdfError> {
    let invalid = |reason: &str| RdfError::InvalidIri {
        iri: value.to_string(),
        reason: reason.to_string(),
    };
    if value.is_empty() {
        return Err(invalid("empty"));
    }
    let Some(colon) = value.find(':') else {
        return Err(invalid("no scheme"));
    };
    let scheme = &value[..colon];
    let mut chars = scheme.chars();
    let scheme_ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
    if !scheme_ok {
        return Err(invalid("bad scheme"));
    }
    if let Some(c) = value
        .chars()
        .find(|c| c.is_whitespace() || c.is_control() || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\'))
    {
        return Err(invalid(&format!("forbidden character {c:?}")));
    }
    Ok(())
}

impl TryFrom<String> for Iri {
    type Error = RdfError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<Iri> for String {
    fn from(value: Iri) -> Self {
        value.0
    }
}

impl AsRef<str> for Iri {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A document-scoped blank node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlankNode(String);

impl BlankNode {
    pub fn new(label: impl Into<String>) -> Result<Self, RdfError> {
        let label = label.into();
        if label.is_empty() || !label.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(RdfError::InvalidBlankNode(label));
        }
        Ok(Self(label))
    }

    pub fn label(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Literal {
    lexical: String,
    datatype: Iri,
    language: Option<String>,
}

impl Literal {
    /// An `xsd:string` literal.
    pub fn string(lexical: impl Into<String>) -> Self {
        Self {
            lexical: lexical.into(),
            datatype: Iri(XSD_STRING.to_string()),
            language: None,
        }
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Self {
        Self {
            lexical: lexical.into(),
            datatype,
            language: None,
        }
    }

    pub fn lang(lexical: impl Into<String>, language: impl Into<String>) -> Result<Self, RdfError> {
        let language = language.into();
        let valid = !language.is_empty()
            && language.split('-').enumerate().all(|(i, part)| {
                !part.is_empty()
                    && part.len() <= 8
                    && if i == 0 {
                        part.chars().all(|c| c.is_ascii_alphabetic())
                    } else {
                        part.chars().all(|c| c.is_ascii_alphanumeric())
                    }
            });
        if !valid {
            return Err(RdfError::InvalidLanguageTag(language));
        }
        Ok(Self {
            lexical: lexical.into(),
            datatype: Iri(RDF_LANG_STRING.to_string()),
            language: Some(language.to_ascii_lowercase()),
        })
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &Iri {
        &self.datatype
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }

    /// Same literal with another datatype; language-tagged literals are unchanged.
    pub(crate) fn with_datatype(&self, datatype: Iri) -> Self {
        if self.language.is_some() {
            return self.clone();
        }
        Self {
            lexical: self.lexical.clone(),
            datatype,
            language: None,
        }
    }

    pub fn is_plain_string(&self) -> bool {
        self.language.is_none() && self.datatype.as_str() == XSD_STRING
    }
}

/// Subject position: IRI or blank node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Subject {
    Iri(Iri),
    Blank(BlankNode),
}

/// Object position: any RDF term.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Iri(Iri),
    Blank(BlankNode),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            _ => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(l) => Some(l),
            _ => None,
        }
    }

    pub fn as_subject(&self) -> Option<Subject> {
        match self {
            Term::Iri(i) => Some(Subject::Iri(i.clone())),
            Term::Blank(b) => Some(Subject::Blank(b.clone())),
            Term::Literal(_) => None,
        }
    }
}

impl Subject {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Subject::Iri(iri) => Some(iri),
            Subject::Blank(_) => None,
        }
    }
}

impl From<Iri> for Term {
    fn from(value: Iri) -> Self {
        Term::Iri(value)
    }
}

impl From<Literal> for Term {
    fn from(value: Literal) -> Self {
        Term::Literal(value)
    }
}

impl From<BlankNode> for Term {
    fn from(value: BlankNode) -> Self {
        Term::Blank(value)
    }
}

impl From<Iri> for Subject {
    fn from(value: Iri) -> Self {
        Subject::Iri(value)
    }
}

impl From<Subject> for Term {
    fn from(value: Subject) -> Self {
        match value {
            Subject::Iri(i) => Term::Iri(i),
            Subject::Blank(b) => Term::Blank(b),
        }
    }
}

pub(crate) fn escape_string(out: &mut String, value: &str) {
    for c in value.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            '\u{8}' => out.push_str("\\b"),
            '\u{c}' => out.push_str("\\f"),
            c if c.is_control() => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
}

/// N-Quads rendering of terms.
pub trait NQuadsForm {
    fn write_nquads(&self, out: &mut String);

    fn to_nquads(&self) -> String {
        let mut s = String::new();
        self.write_nquads(&mut s);
        s
    }
}

impl NQuadsForm for Iri {
    fn write_nquads(&self, out: &mut String) {
        out.push('<');
        out.push_str(&self.0);
        out.push('>');
    }
}

impl NQuadsForm for BlankNode {
    fn write_nquads(&self, out: &mut String) {
        out.push_str("_:");
        out.push_str(&self.0);
    }
}

impl NQuadsForm for Literal {
    fn write_nquads(&self, out: &mut String) {
        out.push('"');
        escape_string(out, &self.lexical);
        out.push('"');
        if let Some(lang) = &self.language {
            out.push('@');
            out.push_str(lang);
        } else if self.datatype.as_str() != XSD_STRING {
            out.push_str("^^");
            self.datatype.write_nquads(out);
        }
    }
}

impl NQuadsForm for Subject {
    fn write_nquads(&self, out: &mut String) {
        match self {
            Subject::Iri(i) => i.write_nquads(out),
            Subject::Blank(b) => b.write_nquads(out),
        }
    }
}

impl NQuadsForm for Term {
    fn write_nquads(&self, out: &mut String) {
        match self {
            Term::Iri(i) => i.write_nquads(out),
            Term::Blank(b) => b.write_nquads(out),
            Term::Literal(l) => l.write_nquads(out),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_nquads())
    }
}

// Terms order by their N-Quads form so that sorted sets match canonical output.
impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Term::Iri(a), Term::Iri(b)) => cmp_bracketed(a.as_str(), b.as_str()),
            _ => self.to_nquads().cmp(&other.to_nquads()),
        }
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Subject {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Subject::Iri(a), Subject::Iri(b)) => cmp_bracketed(a.as_str(), b.as_str()),
            _ => self.to_nquads().cmp(&other.to_nquads()),
        }
    }
}

impl PartialOrd for Subject {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Compares `<a>` with `<b>` without allocating.
pub(crate) fn cmp_bracketed(a: &str, b: &str) -> Ordering {
    a.bytes().chain(std::iter::once(b'>')).cmp(b.bytes().chain(std::iter::once(b'>')))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iri_rules() {
        assert!(Iri::new("http://purl.org/spar/cito/reviews").is_ok());
        assert!(Iri::new("urn:x").is_ok());
        assert!(Iri::new("").is_err());
        assert!(Iri::new("no-scheme").is_err());
        assert!(Iri::new("http://a b").is_err());
        assert!(Iri::new("http://a<b").is_err());
        assert!(Iri::new("http://a\"b").is_err());
        assert!(Iri::new("1http://x").is_err());
    }

    #[test]
    fn literal_defaults_to_xsd_string() {
        let l = Literal::string("417");
        assert_eq!(l.datatype().as_str(), XSD_STRING);
        assert_eq!(l.to_nquads(), "\"417\"");
        let l = Literal::lang("hi", "EN-gb").unwrap();
        assert_eq!(l.datatype().as_str(), RDF_LANG_STRING);
        assert_eq!(l.to_nquads(), "\"hi\"@en-gb");
        assert!(Literal::lang("x", "").is_err());
        assert!(Literal::lang("x", "1a").is_err());
    }

    #[test]
    fn escapes() {
        assert_eq!(Literal::string("a\"b\\c\nd").to_nquads(), r#""a\"b\\c\nd""#);
    }

    #[test]
    fn bracketed_order_matches_string_order() {
        let pairs = [("a", "a#"), ("a#", "ab"), ("http://x/a", "http://x/a/b"), ("a", "a")];
        for (a, b) in pairs {
            assert_eq!(cmp_bracketed(a, b), format!("<{a}>").cmp(&format!("<{b}>")), "{a} {b}");
        }
    }

    #[test]
    fn blank_labels() {
        assert!(BlankNode::new("b0_x").is_ok());
        assert!(BlankNode::new("").is_err());
        assert!(BlankNode::new("a-b").is_err());
    }
}
