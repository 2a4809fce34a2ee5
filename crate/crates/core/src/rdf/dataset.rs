use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use super::term::{NQuadsForm, Subject, Term};
use super::{Iri, RdfError};

/// A quad in a named graph. Nanopublications never use the default graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Quad {
    pub subject: Subject,
    pub predicate: Iri,
    pub object: Term,
    pub graph: Iri,
}

impl Quad {
    pub fn new(subject: impl Into<Subject>, predicate: Iri, object: impl Into<Term>, graph: Iri) -> Self {
        Self {
            subject: subject.into(),
            predicate,
            object: object.into(),
            graph,
        }
    }

    pub fn write_nquads(&self, out: &mut String) {
        self.subject.write_nquads(out);
        out.push(' ');
        self.predicate.write_nquads(out);
        out.push(' ');
        self.object.write_nquads(out);
        out.push(' ');
        self.graph.write_nquads(out);
        out.push_str(" .\n");
    }
}

/// Graph-less statement, placed into a graph by the nanopub builders.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    pub subject: Subject,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: impl Into<Subject>, predicate: Iri, object: impl Into<Term>) -> Self {
        Self {
            subject: subject.into(),
            predicate,
            object: object.into(),
        }
    }

    pub fn in_graph(self, graph: Iri) -> Quad {
        Quad {
            subject: self.subject,
            predicate: self.predicate,
            object: self.object,
            graph,
        }
    }
}

impl Quad {
    pub fn triple(&self) -> Triple {
        Triple {
            subject: self.subject.clone(),
            predicate: self.predicate.clone(),
            object: self.object.clone(),
        }
    }
}

// Canonical order: graph IRI, then subject, predicate, object by N-Quads form.
impl Ord for Quad {
    fn cmp(&self, other: &Self) -> Ordering {
        self.graph
            .as_str()
            .cmp(other.graph.as_str())
            .then_with(|| self.subject.cmp(&other.subject))
            .then_with(|| super::term::cmp_bracketed(self.predicate.as_str(), other.predicate.as_str()))
            .then_with(|| self.object.cmp(&other.object))
    }
}

impl PartialOrd for Quad {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Prefix label to namespace IRI.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrefixMap {
    entries: BTreeMap<String, Iri>,
}

impl PrefixMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds `label`, replacing any previous binding.
    pub fn insert(&mut self, label: impl Into<String>, namespace: Iri) -> Result<(), RdfError> {
        let label = label.into();
        if !is_prefix_label(&label) {
            return Err(RdfError::InvalidPrefixLabel(label));
        }
        self.entries.insert(label, namespace);
        Ok(())
    }

    pub fn with(mut self, label: &str, namespace: Iri) -> Self {
        self.insert(label, namespace).expect("valid prefix label");
        self
    }

    pub fn get(&self, label: &str) -> Option<&Iri> {
        self.entries.get(label)
    }

    pub fn remove(&mut self, label: &str) -> Option<Iri> {
        self.entries.remove(label)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Iri)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Expands `prefix:local` to `namespace + local`.
    pub fn expand(&self, name: &str) -> Result<Iri, RdfError> {
        let (label, local) = name
            .split_once(':')
            .ok_or_else(|| RdfError::NotAPrefixedName(name.to_string()))?;
        let ns = self
            .entries
            .get(label)
            .ok_or_else(|| RdfError::UndefinedPrefix(label.to_string()))?;
        Iri::new(format!("{}{}", ns.as_str(), local))
    }

    pub(crate) fn map_namespaces(&mut self, mut f: impl FnMut(&Iri) -> Iri) {
        for ns in self.entries.values_mut() {
            *ns = f(ns);
        }
    }
}

pub(crate) fn is_prefix_label(label: &str) -> bool {
    if label.is_empty() {
        return true;
    }
    let mut chars = label.chars();
    let first_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic());
    first_ok
        && label.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        && !label.ends_with('.')
}

/// Expands `prefix:local` against `pm`.
pub fn expand(pm: &PrefixMap, name: &str) -> Result<Iri, RdfError> {
    pm.expand(name)
}

/// A set of named-graph quads plus the prefixes used to display them.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Dataset {
    quads: BTreeSet<Quad>,
    pub prefixes: PrefixMap,
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_prefixes(prefixes: PrefixMap) -> Self {
        Self {
            quads: BTreeSet::new(),
            prefixes,
        }
    }

    /// Returns false when the quad was already present.
    pub fn insert(&mut self, quad: Quad) -> bool {
        self.quads.insert(quad)
    }

    pub fn remove(&mut self, quad: &Quad) -> bool {
        self.quads.remove(quad)
    }

    pub fn contains(&self, quad: &Quad) -> bool {
        self.quads.contains(quad)
    }

    pub fn len(&self) -> usize {
        self.quads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quads.is_empty()
    }

    /// Quads in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = &Quad> {
        self.quads.iter()
    }

    pub fn graphs(&self) -> BTreeSet<&Iri> {
        self.quads.iter().map(|q| &q.graph).collect()
    }

    pub fn graph<'a>(&'a self, graph: &'a Iri) -> impl Iterator<Item = &'a Quad> + 'a {
        self.quads.iter().filter(move |q| &q.graph == graph)
    }

    pub fn same_quads(&self, other: &Dataset) -> bool {
        self.quads == other.quads
    }

    /// Rewrites every IRI (terms, graphs, datatypes and prefix namespaces) through `f`.
    pub fn map_iris(&self, mut f: impl FnMut(&Iri) -> Iri) -> Dataset {
        let mut out = Dataset::with_prefixes(self.prefixes.clone());
        out.prefixes.map_namespaces(&mut f);
        for q in &self.quads {
            let subject = match &q.subject {
                Subject::Iri(i) => Subject::Iri(f(i)),
                Subject::Blank(b) => Subject::Blank(b.clone()),
            };
            let object = match &q.object {
                Term::Iri(i) => Term::Iri(f(i)),
                Term::Blank(b) => Term::Blank(b.clone()),
                Term::Literal(l) => Term::Literal(l.with_datatype(f(l.datatype()))),
            };
            out.insert(Quad {
                subject,
                predicate: f(&q.predicate),
                object,
                graph: f(&q.graph),
            });
        }
        out
    }
}

impl Extend<Quad> for Dataset {
    fn extend<T: IntoIterator<Item = Quad>>(&mut self, iter: T) {
        self.quads.extend(iter)
    }
}

impl FromIterator<Quad> for Dataset {
    fn from_iter<T: IntoIterator<Item = Quad>>(iter: T) -> Self {
        Self {
            quads: iter.into_iter().collect(),
            prefixes: PrefixMap::new(),
        }
    }
}

/// One line per quad in canonical order; empty dataset gives an empty string.
pub fn to_nquads(d: &Dataset) -> String {
    let mut out = String::new();
    for q in d.iter() {
        q.write_nquads(&mut out);
    }
    out
}
