//! Index nanopublications: a trusty set of element nanopubs, optionally
//! superseding a previous index to form a version chain.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, Utc};

use super::{assemble_with, is_trusty_uri, make_trusty, MintInfo, Nanopublication, NanopubError, Provenance};
use crate::rdf::{Iri, Subject, Triple};
use crate::vocab;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NanopubIndex {
    pub uri: Iri,
    /// Sorted, deduplicated.
    pub elements: Vec<Iri>,
    pub supersedes: Option<Iri>,
}

impl NanopubIndex {
    pub fn from_nanopub(np: &Nanopublication) -> Result<Self, NanopubError> {
        let this = Subject::Iri(np.uri.clone());
        let typed = np
            .assertion_quads()
            .any(|q| q.subject == this && &q.predicate == vocab::rdf_type() && q.object.as_iri() == Some(vocab::npx_nanopub_index()));
        if !typed {
            return Err(NanopubError::Structure(format!("{} is not an index", np.uri)));
        }
        let mut elements = BTreeSet::new();
        let mut supersedes = None;
        for q in np.assertion_quads().filter(|q| q.subject == this) {
            let Some(o) = q.object.as_iri() else { continue };
            if &q.predicate == vocab::npx_includes_element() {
                elements.insert(o.clone());
            } else if &q.predicate == vocab::npx_supersedes() && supersedes.replace(o.clone()).is_some() {
                return Err(NanopubError::Structure("index supersedes several indexes".into()));
            }
        }
        if elements.is_empty() {
            return Err(NanopubError::EmptyIndex);
        }
        Ok(Self {
            uri: np.uri.clone(),
            elements: elements.into_iter().collect(),
            supersedes,
        })
    }
}

/// Builds a trusty index over `elements`, all of which must be trusty.
pub fn build_index(
    elements: &[Iri],
    supersedes: Option<&Iri>,
    creator: &Iri,
    timestamp: DateTime<Utc>,
    base: &Iri,
) -> Result<Nanopublication, NanopubError> {
    if elements.is_empty() {
        return Err(NanopubError::EmptyIndex);
    }
    if let Some(bad) = elements.iter().chain(supersedes).find(|e| !is_trusty_uri(e)) {
        return Err(NanopubError::NotTrusty(bad.clone()));
    }
    if let Some(prev) = supersedes {
        if elements.contains(prev) {
            return Err(NanopubError::Chain(format!("{prev} is both an element and the superseded index")));
        }
    }
    let this = base.clone();
    let mut triples = vec![Triple::new(this.clone(), vocab::rdf_type().clone(), vocab::npx_nanopub_index().clone())];
    triples.extend(
        elements
            .iter()
            .map(|e| Triple::new(this.clone(), vocab::npx_includes_element().clone(), e.clone())),
    );
    if let Some(prev) = supersedes {
        triples.push(Triple::new(this.clone(), vocab::npx_supersedes().clone(), prev.clone()));
    }
    let info = MintInfo {
        base: base.clone(),
        creator: creator.clone(),
        timestamp,
    };
    make_trusty(&assemble_with(triples, Provenance::AttributedTo(creator.clone()), &info)?)
}

fn successors(indexes: &[NanopubIndex]) -> Result<BTreeMap<&Iri, &Iri>, NanopubError> {
    let mut next = BTreeMap::new();
    for ix in indexes {
        if let Some(prev) = &ix.supersedes {
            if let Some(other) = next.insert(prev, &ix.uri) {
                return Err(NanopubError::Chain(format!("{prev} is superseded by both {other} and {}", ix.uri)));
            }
        }
    }
    Ok(next)
}

/// Follows supersedes links forward from `start` to the newest index.
pub fn resolve_latest(indexes: &[NanopubIndex], start: &Iri) -> Result<Iri, NanopubError> {
    let next = successors(indexes)?;
    let mut current = start;
    let mut seen = BTreeSet::from([start]);
    while let Some(n) = next.get(current) {
        if !seen.insert(*n) {
            return Err(NanopubError::Chain(format!("cycle through {n}")));
        }
        current = n;
    }
    Ok(current.clone())
}

/// The chain ending at `head`, oldest first.
pub fn version_chain(indexes: &[NanopubIndex], head: &Iri) -> Result<Vec<Iri>, NanopubError> {
    let by_uri: BTreeMap<&Iri, &NanopubIndex> = indexes.iter().map(|ix| (&ix.uri, ix)).collect();
    let mut chain = Vec::new();
    let mut current = Some(head);
    while let Some(uri) = current {
        if chain.contains(uri) {
            return Err(NanopubError::Chain(format!("cycle through {uri}")));
        }
        let ix = by_uri
            .get(uri)
            .ok_or_else(|| NanopubError::Chain(format!("unknown index {uri}")))?;
        chain.push(uri.clone());
        current = ix.supersedes.as_ref();
    }
    chain.reverse();
    Ok(chain)
}
