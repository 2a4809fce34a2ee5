//! Corpus of nanopubs with quad indexes and typed review views, and the
//! descriptive analyses run over it.
//!
//! Denominators: field and size queries count statements (a statement
//! qualifies if at least one study evidencing it does); the class query counts
//! (study, statement) evidence pairs. Only `llr:providesEvidenceFor` counts as
//! evidence. Statements whose evidencing studies all lack the queried field
//! are left out of the denominator.

mod store;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize, Serializer};

use crate::model::{self, BibMetadata, Doi, ModelError, NanopubKind, Place, ResearchPaper, ReviewArticle, Revision, StatementRelation, Study};
use crate::nanopub::{validate, NanopubIndex, Nanopublication, NanopubError};
use crate::rdf::{Iri, Subject, Term};
use crate::vocab;

pub use store::QuadIndex;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Nanopub(#[from] NanopubError),
    #[error("{uri} is invalid: {}", .violations.join("; "))]
    Invalid { uri: Iri, violations: Vec<String> },
    #[error("graph {graph} belongs to both {first} and {second}")]
    GraphClash { graph: Iri, first: Iri, second: Iri },
    #[error("{0} is loaded twice with different content")]
    Conflict(Iri),
    #[error("unknown statement {0}")]
    UnknownStatement(Iri),
    #[error("unknown study field {0:?}")]
    UnknownField(String),
}

/// An immutable snapshot; [`Corpus::with`] derives a new one.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    nanopubs: BTreeMap<Iri, Arc<Nanopublication>>,
    kinds: BTreeMap<Iri, NanopubKind>,
    graph_owner: HashMap<Iri, Iri>,
    store: QuadIndex,
    reviews: BTreeMap<Iri, ReviewArticle>,
    papers: BTreeMap<Iri, ResearchPaper>,
    studies: BTreeMap<Iri, Study>,
    relations: BTreeMap<Iri, StatementRelation>,
    metadata: BTreeMap<Iri, BibMetadata>,
    revisions: BTreeMap<Iri, Revision>,
    indexes: BTreeMap<Iri, NanopubIndex>,
}

impl Corpus {
    pub fn load<I>(nanopubs: I) -> Result<Self, QueryError>
    where
        I: IntoIterator,
        I::Item: Into<Arc<Nanopublication>>,
    {
        Corpus::default().with(nanopubs)
    }

    /// This snapshot plus `nanopubs`; `self` is left untouched.
    pub fn with<I>(&self, nanopubs: I) -> Result<Self, QueryError>
    where
        I: IntoIterator,
        I::Item: Into<Arc<Nanopublication>>,
    {
        let mut next = self.clone();
        for np in nanopubs {
            next.insert(np.into())?;
        }
        Ok(next)
    }

    fn insert(&mut self, np: Arc<Nanopublication>) -> Result<(), QueryError> {
        if let Some(existing) = self.nanopubs.get(&np.uri) {
            if existing.data.same_quads(&np.data) {
                return Ok(());
            }
            return Err(QueryError::Conflict(np.uri.clone()));
        }
        let report = validate(&np);
        if !report.is_valid() {
            return Err(QueryError::Invalid {
                uri: np.uri.clone(),
                violations: report.violations,
            });
        }
        for g in [&np.head, &np.assertion, &np.provenance, &np.pubinfo] {
            if let Some(first) = self.graph_owner.get(g) {
                return Err(QueryError::GraphClash {
                    graph: g.clone(),
                    first: first.clone(),
                    second: np.uri.clone(),
                });
            }
        }
        let kind = model::classify(&np)?;
        let uri = np.uri.clone();
        match kind {
            NanopubKind::Review => drop(self.reviews.insert(uri.clone(), model::review_from_nanopub(&np)?)),
            NanopubKind::Paper => drop(self.papers.insert(uri.clone(), model::paper_from_nanopub(&np)?)),
            NanopubKind::Study => drop(self.studies.insert(uri.clone(), model::study_from_nanopub(&np)?)),
            NanopubKind::Relation => drop(self.relations.insert(uri.clone(), model::relation_from_nanopub(&np)?)),
            NanopubKind::DoiMetadata => drop(self.metadata.insert(uri.clone(), model::bib_from_nanopub(&np)?)),
            NanopubKind::Revision => drop(self.revisions.insert(uri.clone(), model::revision_from_nanopub(&np)?)),
            NanopubKind::Index => drop(self.indexes.insert(uri.clone(), NanopubIndex::from_nanopub(&np)?)),
            NanopubKind::Schema => {}
        }
        for g in [&np.head, &np.assertion, &np.provenance, &np.pubinfo] {
            self.graph_owner.insert(g.clone(), uri.clone());
        }
        for q in np.data.iter() {
            self.store.insert(q);
        }
        self.kinds.insert(uri.clone(), kind);
        self.nanopubs.insert(uri, np);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nanopubs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nanopubs.is_empty()
    }

    pub fn nanopub(&self, uri: &Iri) -> Option<&Arc<Nanopublication>> {
        self.nanopubs.get(uri)
    }

    pub fn nanopubs(&self) -> impl Iterator<Item = &Arc<Nanopublication>> {
        self.nanopubs.values()
    }

    pub fn kind(&self, uri: &Iri) -> Option<NanopubKind> {
        self.kinds.get(uri).copied()
    }

    /// The nanopub owning `graph`.
    pub fn owner_of(&self, graph: &Iri) -> Option<&Iri> {
        self.graph_owner.get(graph)
    }

    pub fn store(&self) -> &QuadIndex {
        &self.store
    }

    pub fn reviews(&self) -> impl Iterator<Item = (&Iri, &ReviewArticle)> {
        self.reviews.iter()
    }

    pub fn papers(&self) -> impl Iterator<Item = (&Iri, &ResearchPaper)> {
        self.papers.iter()
    }

    pub fn studies(&self) -> impl Iterator<Item = (&Iri, &Study)> {
        self.studies.iter()
    }

    pub fn relations(&self) -> impl Iterator<Item = (&Iri, &StatementRelation)> {
        self.relations.iter()
    }

    pub fn metadata(&self) -> impl Iterator<Item = (&Iri, &BibMetadata)> {
        self.metadata.iter()
    }

    pub fn indexes(&self) -> impl Iterator<Item = &NanopubIndex> {
        self.indexes.values()
    }

    /// Revisions of `fragment`, oldest first: by pubinfo timestamp, then by
    /// artifact code.
    pub fn revisions_of(&self, fragment: &Iri) -> Vec<(&Iri, &Revision)> {
        let mut found: Vec<_> = self
            .revisions
            .iter()
            .filter(|(_, r)| &r.fragment == fragment)
            .map(|(uri, r)| {
                let np = &self.nanopubs[uri];
                (np.created(), np.artifact_code(), uri, r)
            })
            .collect();
        found.sort_by(|a, b| (a.0, &a.1, a.2).cmp(&(b.0, &b.1, b.2)));
        found.into_iter().map(|(_, _, uri, r)| (uri, r)).collect()
    }
}

/// A count over a count, kept exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
pub struct Share {
    pub numerator: u64,
    pub denominator: u64,
}

impl Share {
    pub fn new(numerator: u64, denominator: u64) -> Self {
        Self { numerator, denominator }
    }

    /// `None` for an empty denominator.
    pub fn ratio(&self) -> Option<Ratio<u64>> {
        (self.denominator > 0).then(|| Ratio::new(self.numerator, self.denominator))
    }

    /// Percentage as a float; 0 for an empty denominator.
    pub fn percent(&self) -> f64 {
        if self.denominator == 0 {
            0.0
        } else {
            self.numerator as f64 * 100.0 / self.denominator as f64
        }
    }

    /// Percentage rounded half-up to `10^-decimals`, as exact integer units.
    fn rounded_units(&self, decimals: u32) -> u64 {
        if self.denominator == 0 {
            return 0;
        }
        let scale = 100 * 10u64.pow(decimals);
        (2 * scale * self.numerator + self.denominator) / (2 * self.denominator)
    }

    /// Whole percent, half-up: `83.87` shows as `84`.
    pub fn whole_percent(&self) -> u64 {
        self.rounded_units(0)
    }

    /// E.g. `44.44%`.
    pub fn display_2dp(&self) -> String {
        let units = self.rounded_units(2);
        format!("{}.{:02}%", units / 100, units % 100)
    }

    /// E.g. `84%`.
    pub fn display_whole(&self) -> String {
        format!("{}%", self.whole_percent())
    }
}

impl fmt::Display for Share {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

impl Serialize for Share {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            numerator: u64,
            denominator: u64,
            percent: f64,
        }
        Repr {
            numerator: self.numerator,
            denominator: self.denominator,
            percent: self.percent(),
        }
        .serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    /// Every kind except indexes, zero counts included.
    pub counts: BTreeMap<NanopubKind, usize>,
    pub total: usize,
    pub indexes: usize,
}

impl CensusReport {
    pub fn count(&self, kind: NanopubKind) -> usize {
        self.counts.get(&kind).copied().unwrap_or(0)
    }
}

pub fn counts_by_kind(c: &Corpus) -> CensusReport {
    let mut counts: BTreeMap<NanopubKind, usize> = NanopubKind::ALL
        .iter()
        .filter(|k| **k != NanopubKind::Index)
        .map(|k| (*k, 0))
        .collect();
    let mut indexes = 0;
    for kind in c.kinds.values() {
        match kind {
            NanopubKind::Index => indexes += 1,
            k => *counts.entry(*k).or_default() += 1,
        }
    }
    CensusReport {
        total: counts.values().sum(),
        counts,
        indexes,
    }
}

/// Relation predicate to its share of all relation nanopubs.
pub fn relation_distribution(c: &Corpus) -> BTreeMap<Iri, Share> {
    let total = c.relations.len() as u64;
    let mut counts: BTreeMap<Iri, u64> = BTreeMap::new();
    for rel in c.relations.values() {
        *counts.entry(rel.relation.clone()).or_default() += 1;
    }
    counts.into_iter().map(|(r, n)| (r, Share::new(n, total))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyField {
    LandOfFocus,
    FirstAuthorOrigin,
    Country,
}

impl std::str::FromStr for StudyField {
    type Err = QueryError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "land_of_focus" => Ok(StudyField::LandOfFocus),
            "first_author_origin" => Ok(StudyField::FirstAuthorOrigin),
            "country" => Ok(StudyField::Country),
            other => Err(QueryError::UnknownField(other.to_string())),
        }
    }
}

impl StudyField {
    pub fn of<'a>(&self, s: &'a Study) -> Option<&'a Place> {
        match self {
            StudyField::LandOfFocus => s.land_of_focus.as_ref(),
            StudyField::FirstAuthorOrigin => s.first_author_origin.as_ref(),
            StudyField::Country => s.country.as_ref(),
        }
    }
}

/// Statement to the studies providing evidence for it.
fn evidencing_studies(c: &Corpus) -> BTreeMap<&Iri, Vec<&Study>> {
    let mut map: BTreeMap<&Iri, Vec<&Study>> = BTreeMap::new();
    for s in c.studies.values() {
        for st in &s.evidence_for {
            map.entry(st).or_default().push(s);
        }
    }
    map
}

/// Statement-level share over studies that record a value for the field.
fn statement_share(c: &Corpus, known: impl Fn(&Study) -> Option<bool>) -> Share {
    let mut num = 0;
    let mut den = 0;
    for studies in evidencing_studies(c).values() {
        let verdicts: Vec<bool> = studies.iter().filter_map(|s| known(s)).collect();
        if verdicts.is_empty() {
            continue;
        }
        den += 1;
        if verdicts.contains(&true) {
            num += 1;
        }
    }
    Share::new(num, den)
}

pub fn pct_statements_by_study_field(c: &Corpus, field: StudyField, predicate: impl Fn(&Place) -> bool) -> Share {
    statement_share(c, |s| field.of(s).map(&predicate))
}

/// Statements resting on a study with group size above `threshold`, among
/// statements with at least one evidencing study of known size.
pub fn pct_statements_large_study(c: &Corpus, threshold: u64) -> Share {
    statement_share(c, |s| s.overall_size.map(|n| n > threshold))
}

/// Share of (study, statement) evidence pairs whose study has class `cls`.
pub fn pct_statements_by_class(c: &Corpus, cls: &Iri) -> Share {
    let mut num = 0;
    let mut den = 0;
    for s in c.studies.values() {
        let n = s.evidence_for.len() as u64;
        den += n;
        if s.classes.contains(cls) {
            num += n;
        }
    }
    Share::new(num, den)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportCounts {
    pub statement: Iri,
    pub supporting_papers: usize,
    pub distinct_authors: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportReport {
    pub statement: Iri,
    pub supporting_papers: usize,
    pub distinct_authors: usize,
    pub conflicting: Vec<SupportCounts>,
}

/// Case-insensitive DOI identity where possible, else the IRI itself.
pub fn paper_key(iri: &Iri) -> String {
    match Doi::from_iri(iri) {
        Some(d) => format!("doi:{}", d.key()),
        None => iri.as_str().to_string(),
    }
}

/// Papers that claim `statement` or house a study evidencing it. A study
/// belongs to the papers listing it and to the paper it is derived from.
pub fn supporting_papers(c: &Corpus, statement: &Iri) -> BTreeSet<String> {
    let mut keys = BTreeSet::new();
    for p in c.papers.values() {
        if p.claims.contains(statement) {
            keys.insert(paper_key(&p.iri));
        }
    }
    for s in c.studies.values().filter(|s| s.evidence_for.contains(statement)) {
        keys.insert(paper_key(&s.source));
        for p in c.papers.values().filter(|p| p.studies.contains(&s.iri)) {
            keys.insert(paper_key(&p.iri));
        }
    }
    keys
}

fn support_counts(c: &Corpus, statement: &Iri) -> SupportCounts {
    let papers = supporting_papers(c, statement);
    let mut authors = BTreeSet::new();
    for m in c.metadata.values() {
        let key = format!("doi:{}", m.doi.key());
        if papers.contains(&key) || papers.contains(&paper_key(&m.iri)) {
            authors.extend(m.authors.iter().map(|a| a.identity()));
        }
    }
    SupportCounts {
        statement: statement.clone(),
        supporting_papers: papers.len(),
        distinct_authors: authors.len(),
    }
}

pub fn statement_support(c: &Corpus, statement: &Iri) -> Result<SupportReport, QueryError> {
    if !list_statements(c).contains(statement) {
        return Err(QueryError::UnknownStatement(statement.clone()));
    }
    let own = support_counts(c, statement);
    let conflicting = neighbors(c, statement, vocab::hycl_has_conflicting_meaning())
        .iter()
        .map(|n| support_counts(c, n))
        .collect();
    Ok(SupportReport {
        statement: own.statement,
        supporting_papers: own.supporting_papers,
        distinct_authors: own.distinct_authors,
        conflicting,
    })
}

/// Every statement mentioned as a claim, as (counter-)evidence or in a relation.
pub fn list_statements(c: &Corpus) -> BTreeSet<Iri> {
    let mut out = BTreeSet::new();
    for p in c.papers.values() {
        out.extend(p.claims.iter().cloned());
    }
    for s in c.studies.values() {
        out.extend(s.statements().cloned());
    }
    for r in c.relations.values() {
        out.insert(r.subject.clone());
        out.insert(r.object.clone());
    }
    out
}

/// Statements linked to `statement` by `relation`. Related and conflicting
/// meaning are symmetric; "more specific than" also follows asserted
/// "more general than" edges backwards, and vice versa.
pub fn neighbors(c: &Corpus, statement: &Iri, relation: &Iri) -> BTreeSet<Iri> {
    let specific = vocab::hycl_has_more_specific_meaning_than();
    let general = vocab::hycl_has_more_general_meaning_than();
    let (forward, backward) = if relation == specific {
        (specific, general)
    } else if relation == general {
        (general, specific)
    } else {
        (relation, relation)
    };
    let in_relation_graph = |g: &Iri| {
        c.graph_owner
            .get(g)
            .is_some_and(|np| c.kinds.get(np) == Some(&NanopubKind::Relation))
    };
    let subject = Subject::Iri(statement.clone());
    let object = Term::Iri(statement.clone());
    let mut out = BTreeSet::new();
    for q in c.store.matching(Some(&subject), Some(forward), None) {
        if let (true, Some(o)) = (in_relation_graph(&q.graph), q.object.as_iri()) {
            out.insert(o.clone());
        }
    }
    for q in c.store.matching(None, Some(backward), Some(&object)) {
        if let (true, Some(s)) = (in_relation_graph(&q.graph), q.subject.as_iri()) {
            out.insert(s.clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn share_rounding() {
        let related = Share::new(26, 31);
        assert_eq!(related.whole_percent(), 84);
        assert_eq!(related.display_2dp(), "83.87%");
        assert_eq!(Share::new(3, 31).whole_percent(), 10);
        assert_eq!(Share::new(3, 31).display_2dp(), "9.68%");
        assert_eq!(Share::new(2, 31).display_2dp(), "6.45%");
        assert_eq!(Share::new(4, 9).display_2dp(), "44.44%");
        assert_eq!(Share::new(1, 2).display_2dp(), "50.00%");
        assert_eq!(Share::new(1, 8).whole_percent(), 13);
        assert_eq!(Share::new(0, 0).percent(), 0.0);
        assert_eq!(Share::new(0, 0).ratio(), None);
    }

    #[test]
    fn empty_corpus() {
        let c = Corpus::default();
        let census = counts_by_kind(&c);
        assert_eq!(census.total, 0);
        assert!(census.counts.values().all(|n| *n == 0));
        assert!(relation_distribution(&c).is_empty());
        assert!(list_statements(&c).is_empty());
    }
}
