//! Typed review graph: review article, papers, studies, statements and the
//! relations between statements, with lossless nanopublication mappings.
//!
//! Each `*_to_nanopub` produces a placeholder (pre-trusty) nanopub minted
//! under `info.base`; entities minted inside it (`sub:study`, `sub:author1`,
//! ...) move along when it is made trusty.

mod bib;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::nanopub::{assemble_with, MintInfo, Nanopublication, NanopubError, Provenance};
use crate::rdf::{Iri, Literal, Quad, Subject, Term, Triple};
use crate::vocab::{self, SchemaTerm};

pub use bib::{bib_from_nanopub, bib_to_nanopub, Author, BibMetadata, Doi};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid value: {0}")]
    Invalid(String),
    #[error("invalid DOI {0:?}")]
    InvalidDoi(String),
    #[error("nanopub has the wrong shape: {0}")]
    WrongKind(String),
    #[error("nanopub matches no known kind")]
    Unclassifiable,
    #[error("nanopub matches several kinds: {0:?}")]
    Ambiguous(Vec<NanopubKind>),
    #[error(transparent)]
    Nanopub(#[from] NanopubError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NanopubKind {
    Review,
    DoiMetadata,
    Paper,
    Study,
    Relation,
    Schema,
    Index,
    Revision,
}

impl NanopubKind {
    pub const ALL: [NanopubKind; 8] = [
        NanopubKind::Review,
        NanopubKind::DoiMetadata,
        NanopubKind::Paper,
        NanopubKind::Study,
        NanopubKind::Relation,
        NanopubKind::Schema,
        NanopubKind::Index,
        NanopubKind::Revision,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntityKind {
    Study,
    Author,
    Revision,
}

impl EntityKind {
    fn local(self) -> &'static str {
        match self {
            EntityKind::Study => "study",
            EntityKind::Author => "author",
            EntityKind::Revision => "revision",
        }
    }
}

/// `parent#<kind>` for an empty discriminator, `parent#<kind><n>` for a
/// numeric one and `parent#<kind>_<escaped>` otherwise. Injective in the
/// discriminator.
pub fn mint_iri(kind: EntityKind, parent: &Iri, discriminator: &str) -> Iri {
    let suffix = if discriminator.is_empty() || discriminator.bytes().all(|b| b.is_ascii_digit()) {
        discriminator.to_string()
    } else {
        let escaped: String =
            percent_encoding::utf8_percent_encode(discriminator, crate::aida::UNRESERVED_COMPLEMENT).collect();
        format!("_{escaped}")
    };
    Iri::new(format!("{parent}#{}{suffix}", kind.local())).expect("minted IRI")
}

/// A place-valued study field: a resource such as `dbpedia:United_States`,
/// or a plain name when no resource is known.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Place {
    Resource(Iri),
    Name(String),
}

impl Place {
    fn to_term(&self) -> Term {
        match self {
            Place::Resource(i) => Term::Iri(i.clone()),
            Place::Name(n) => Term::Literal(Literal::string(n)),
        }
    }

    fn from_term(t: &Term) -> Result<Self, ModelError> {
        match t {
            Term::Iri(i) => Ok(Place::Resource(i.clone())),
            Term::Literal(l) if l.is_plain_string() => Ok(Place::Name(l.lexical().to_string())),
            other => Err(ModelError::Invalid(format!("unexpected place value {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReviewArticle {
    pub iri: Iri,
    pub reviews: BTreeSet<Iri>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResearchPaper {
    pub iri: Iri,
    pub claims: BTreeSet<Iri>,
    pub studies: BTreeSet<Iri>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Study {
    pub iri: Iri,
    /// The paper the study is described in (provenance of its nanopub).
    pub source: Iri,
    pub classes: BTreeSet<Iri>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub country: Option<Place>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overall_size: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_author_origin: Option<Place>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub land_of_focus: Option<Place>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primary_object: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theoretical_approach: Option<String>,
    #[serde(default)]
    pub evidence_for: BTreeSet<Iri>,
    #[serde(default)]
    pub counter_evidence_for: BTreeSet<Iri>,
}

impl Study {
    /// A study carrying only the mandatory `cdoc:Study` class.
    pub fn new(iri: Iri, source: Iri) -> Self {
        Self {
            iri,
            source,
            classes: BTreeSet::from([vocab::cdoc_study().clone()]),
            country: None,
            overall_size: None,
            first_author_origin: None,
            land_of_focus: None,
            primary_object: None,
            theoretical_approach: None,
            evidence_for: BTreeSet::new(),
            counter_evidence_for: BTreeSet::new(),
        }
    }

    /// Statements the study evidences or counter-evidences.
    pub fn statements(&self) -> impl Iterator<Item = &Iri> {
        self.evidence_for.union(&self.counter_evidence_for)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatementRelation {
    pub subject: Iri,
    pub relation: Iri,
    pub object: Iri,
    pub derived_from: Iri,
}

impl StatementRelation {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.subject == self.object {
            return Err(ModelError::Invalid("a statement cannot be related to itself".into()));
        }
        if !vocab::is_relation_predicate(&self.relation) {
            return Err(ModelError::Invalid(format!("{} is not a statement relation", self.relation)));
        }
        Ok(())
    }
}

/// A post-publication replacement value for one document fragment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Revision {
    pub fragment: Iri,
    pub value: String,
    pub submitter: Iri,
}

fn lit(v: &str) -> Term {
    Term::Literal(Literal::string(v))
}

pub fn review_to_nanopub(r: &ReviewArticle, info: &MintInfo) -> Result<Nanopublication, ModelError> {
    if r.reviews.is_empty() {
        return Err(ModelError::Invalid("a review must review at least one paper".into()));
    }
    let mut t = vec![Triple::new(r.iri.clone(), vocab::rdf_type().clone(), vocab::fabio_review_article().clone())];
    t.extend(r.reviews.iter().map(|p| Triple::new(r.iri.clone(), vocab::cito_reviews().clone(), p.clone())));
    Ok(assemble_with(t, Provenance::DerivedFrom(r.iri.clone()), info)?)
}

pub fn paper_to_nanopub(p: &ResearchPaper, info: &MintInfo) -> Result<Nanopublication, ModelError> {
    let mut t = vec![Triple::new(p.iri.clone(), vocab::rdf_type().clone(), vocab::fabio_research_paper().clone())];
    t.extend(p.claims.iter().map(|c| Triple::new(p.iri.clone(), vocab::hycl_claims().clone(), c.clone())));
    t.extend(p.studies.iter().map(|s| Triple::new(p.iri.clone(), vocab::cdop_study().clone(), s.clone())));
    Ok(assemble_with(t, Provenance::DerivedFrom(p.iri.clone()), info)?)
}

pub fn study_to_nanopub(s: &Study, info: &MintInfo) -> Result<Nanopublication, ModelError> {
    if !s.classes.contains(vocab::cdoc_study()) {
        return Err(ModelError::Invalid("study classes must include cdoc:Study".into()));
    }
    if s.overall_size == Some(0) {
        return Err(ModelError::Invalid("study size must be positive".into()));
    }
    if s.evidence_for.is_empty() && s.counter_evidence_for.is_empty() {
        return Err(ModelError::Invalid("study provides no evidence".into()));
    }
    let subj = s.iri.clone();
    let mut t: Vec<Triple> = s
        .classes
        .iter()
        .map(|c| Triple::new(subj.clone(), vocab::rdf_type().clone(), c.clone()))
        .collect();
    let mut push = |p: &Iri, o: Term| t.push(Triple::new(subj.clone(), p.clone(), o));
    if let Some(c) = &s.country {
        push(vocab::cdop_country(), c.to_term());
    }
    if let Some(n) = s.overall_size {
        push(vocab::cdop_overall(), lit(&n.to_string()));
    }
    if let Some(c) = &s.first_author_origin {
        push(vocab::llr_first_author_origin(), c.to_term());
    }
    if let Some(c) = &s.land_of_focus {
        push(vocab::llr_land_of_focus(), c.to_term());
    }
    if let Some(v) = &s.primary_object {
        push(vocab::llr_primary_object(), lit(v));
    }
    if let Some(v) = &s.theoretical_approach {
        push(vocab::llr_theoretical_approach(), lit(v));
    }
    for e in &s.evidence_for {
        push(vocab::llr_provides_evidence_for(), Term::Iri(e.clone()));
    }
    for e in &s.counter_evidence_for {
        push(vocab::llr_provides_counter_evidence_for(), Term::Iri(e.clone()));
    }
    Ok(assemble_with(t, Provenance::DerivedFrom(s.source.clone()), info)?)
}

/// The assertion is exactly one triple linking the two statements.
pub fn relation_to_nanopub(rel: &StatementRelation, info: &MintInfo) -> Result<Nanopublication, ModelError> {
    rel.validate()?;
    let t = Triple::new(rel.subject.clone(), rel.relation.clone(), rel.object.clone());
    Ok(assemble_with(vec![t], Provenance::DerivedFrom(rel.derived_from.clone()), info)?)
}

pub fn revision_to_nanopub(rev: &Revision, info: &MintInfo) -> Result<Nanopublication, ModelError> {
    let node = mint_iri(EntityKind::Revision, &info.base, "");
    let t = vec![
        Triple::new(node.clone(), vocab::llr_revises_fragment().clone(), rev.fragment.clone()),
        Triple::new(node, vocab::llr_revised_value().clone(), lit(&rev.value)),
    ];
    Ok(assemble_with(t, Provenance::AttributedTo(rev.submitter.clone()), info)?)
}

/// One vocabulary-definition nanopub: `llr:X a owl:Class ; rdfs:label "x"`.
pub fn schema_to_nanopub(term: &SchemaTerm, info: &MintInfo) -> Result<Nanopublication, ModelError> {
    let s = term.iri();
    let t = vec![
        Triple::new(s.clone(), vocab::rdf_type().clone(), term.kind_iri().clone()),
        Triple::new(s, vocab::rdfs_label().clone(), lit(term.label)),
    ];
    Ok(assemble_with(t, Provenance::AttributedTo(info.creator.clone()), info)?)
}

pub fn schema_nanopubs(info: &MintInfo) -> Result<Vec<Nanopublication>, ModelError> {
    vocab::SCHEMA_TERMS.iter().map(|t| schema_to_nanopub(t, info)).collect()
}

fn kind_of_type(class: &Iri) -> Option<NanopubKind> {
    if class == vocab::fabio_review_article() {
        Some(NanopubKind::Review)
    } else if class == vocab::fabio_research_paper() {
        Some(NanopubKind::Paper)
    } else if class == vocab::cdoc_study() {
        Some(NanopubKind::Study)
    } else if class == vocab::npx_nanopub_index() {
        Some(NanopubKind::Index)
    } else if vocab::schema_types().contains(&class) {
        Some(NanopubKind::Schema)
    } else {
        None
    }
}

/// Assigns a nanopub to exactly one kind: by kind-marking `rdf:type` objects
/// in the assertion, by marker predicates (`bibo:doi`, `llr:revisesFragment`),
/// or by the single-relation-triple shape.
pub fn classify(np: &Nanopublication) -> Result<NanopubKind, ModelError> {
    let mut kinds = BTreeSet::new();
    let mut count = 0;
    let mut only_relation = true;
    for q in np.assertion_quads() {
        count += 1;
        if &q.predicate == vocab::rdf_type() {
            if let Some(k) = q.object.as_iri().and_then(kind_of_type) {
                kinds.insert(k);
            }
        } else if &q.predicate == vocab::bibo_doi() {
            kinds.insert(NanopubKind::DoiMetadata);
        } else if &q.predicate == vocab::llr_revises_fragment() {
            kinds.insert(NanopubKind::Revision);
        }
        only_relation &= vocab::is_relation_predicate(&q.predicate);
    }
    if count == 1 && only_relation {
        kinds.insert(NanopubKind::Relation);
    }
    match kinds.len() {
        0 => Err(ModelError::Unclassifiable),
        1 => Ok(kinds.into_iter().next().expect("one kind")),
        _ => Err(ModelError::Ambiguous(kinds.into_iter().collect())),
    }
}

fn expect_kind(np: &Nanopublication, kind: NanopubKind) -> Result<(), ModelError> {
    let found = classify(np)?;
    if found != kind {
        return Err(ModelError::WrongKind(format!("expected {kind:?}, found {found:?}")));
    }
    Ok(())
}

/// The unique subject typed `class` in the assertion.
fn typed_subject(np: &Nanopublication, class: &Iri) -> Result<Iri, ModelError> {
    let mut subjects = np
        .assertion_quads()
        .filter(|q| &q.predicate == vocab::rdf_type() && q.object.as_iri() == Some(class))
        .map(|q| &q.subject);
    match (subjects.next(), subjects.next()) {
        (Some(Subject::Iri(i)), None) => Ok(i.clone()),
        (Some(Subject::Blank(_)), None) => Err(ModelError::Invalid(format!("{class} subject is a blank node"))),
        _ => Err(ModelError::WrongKind(format!("expected exactly one {class}"))),
    }
}

/// Rejects assertion quads outside the mapped vocabulary so that
/// `from_nanopub` never silently drops content.
fn ensure_all_about(np: &Nanopublication, subject: &Iri, known: &[&Iri]) -> Result<(), ModelError> {
    match np
        .assertion_quads()
        .find(|q| q.subject.as_iri() != Some(subject) || !known.contains(&&q.predicate))
    {
        Some(q) => Err(ModelError::Invalid(format!("unmapped assertion quad about {:?} via {}", q.subject, q.predicate))),
        None => Ok(()),
    }
}

fn iri_objects(np: &Nanopublication, s: &Iri, p: &Iri) -> Result<BTreeSet<Iri>, ModelError> {
    about(np, s, p)
        .map(|q| {
            q.object
                .as_iri()
                .cloned()
                .ok_or_else(|| ModelError::Invalid(format!("{p} expects an IRI")))
        })
        .collect()
}

fn about<'a>(np: &'a Nanopublication, s: &'a Iri, p: &'a Iri) -> impl Iterator<Item = &'a Quad> + 'a {
    np.assertion_quads()
        .filter(move |q| q.subject.as_iri() == Some(s) && &q.predicate == p)
}

fn single<'a>(np: &'a Nanopublication, s: &'a Iri, p: &'a Iri) -> Result<Option<&'a Term>, ModelError> {
    let mut it = about(np, s, p).map(|q| &q.object);
    let first = it.next();
    if it.next().is_some() {
        return Err(ModelError::Invalid(format!("several values for {p}")));
    }
    Ok(first)
}

fn single_text(np: &Nanopublication, s: &Iri, p: &Iri) -> Result<Option<String>, ModelError> {
    match single(np, s, p)? {
        None => Ok(None),
        Some(Term::Literal(l)) if l.is_plain_string() => Ok(Some(l.lexical().to_string())),
        Some(_) => Err(ModelError::Invalid(format!("{p} expects a plain literal"))),
    }
}

fn single_derived_from(np: &Nanopublication) -> Result<Iri, ModelError> {
    match np.derived_from().as_slice() {
        [one] => Ok((*one).clone()),
        _ => Err(ModelError::Invalid("expected exactly one prov:wasDerivedFrom source".into())),
    }
}

pub fn review_from_nanopub(np: &Nanopublication) -> Result<ReviewArticle, ModelError> {
    expect_kind(np, NanopubKind::Review)?;
    let iri = typed_subject(np, vocab::fabio_review_article())?;
    ensure_all_about(np, &iri, &[vocab::rdf_type(), vocab::cito_reviews()])?;
    let reviews = iri_objects(np, &iri, vocab::cito_reviews())?;
    if reviews.is_empty() || about(np, &iri, vocab::rdf_type()).count() != 1 {
        return Err(ModelError::Invalid("review must be typed once and review at least one paper".into()));
    }
    Ok(ReviewArticle { iri, reviews })
}

pub fn paper_from_nanopub(np: &Nanopublication) -> Result<ResearchPaper, ModelError> {
    expect_kind(np, NanopubKind::Paper)?;
    let iri = typed_subject(np, vocab::fabio_research_paper())?;
    ensure_all_about(np, &iri, &[vocab::rdf_type(), vocab::hycl_claims(), vocab::cdop_study()])?;
    if about(np, &iri, vocab::rdf_type()).count() != 1 {
        return Err(ModelError::Invalid("paper carries extra types".into()));
    }
    Ok(ResearchPaper {
        claims: iri_objects(np, &iri, vocab::hycl_claims())?,
        studies: iri_objects(np, &iri, vocab::cdop_study())?,
        iri,
    })
}

pub fn study_from_nanopub(np: &Nanopublication) -> Result<Study, ModelError> {
    expect_kind(np, NanopubKind::Study)?;
    let iri = typed_subject(np, vocab::cdoc_study())?;
    ensure_all_about(
        np,
        &iri,
        &[
            vocab::rdf_type(),
            vocab::cdop_country(),
            vocab::cdop_overall(),
            vocab::llr_first_author_origin(),
            vocab::llr_land_of_focus(),
            vocab::llr_primary_object(),
            vocab::llr_theoretical_approach(),
            vocab::llr_provides_evidence_for(),
            vocab::llr_provides_counter_evidence_for(),
        ],
    )?;
    let place = |p: &Iri| single(np, &iri, p)?.map(Place::from_term).transpose();
    let overall_size = single_text(np, &iri, vocab::cdop_overall())?
        .map(|v| match v.parse::<u64>() {
            Ok(n) if n > 0 && n.to_string() == v => Ok(n),
            _ => Err(ModelError::Invalid(format!("study size {v:?} is not a positive integer"))),
        })
        .transpose()?;
    let study = Study {
        source: single_derived_from(np)?,
        classes: iri_objects(np, &iri, vocab::rdf_type())?,
        country: place(vocab::cdop_country())?,
        overall_size,
        first_author_origin: place(vocab::llr_first_author_origin())?,
        land_of_focus: place(vocab::llr_land_of_focus())?,
        primary_object: single_text(np, &iri, vocab::llr_primary_object())?,
        theoretical_approach: single_text(np, &iri, vocab::llr_theoretical_approach())?,
        evidence_for: iri_objects(np, &iri, vocab::llr_provides_evidence_for())?,
        counter_evidence_for: iri_objects(np, &iri, vocab::llr_provides_counter_evidence_for())?,
        iri,
    };
    if study.evidence_for.is_empty() && study.counter_evidence_for.is_empty() {
        return Err(ModelError::Invalid("study provides no evidence".into()));
    }
    Ok(study)
}

pub fn relation_from_nanopub(np: &Nanopublication) -> Result<StatementRelation, ModelError> {
    expect_kind(np, NanopubKind::Relation)?;
    let q = np.assertion_quads().next().expect("relation has one quad");
    let (Subject::Iri(subject), Term::Iri(object)) = (&q.subject, &q.object) else {
        return Err(ModelError::Invalid("relation must link two statement IRIs".into()));
    };
    let rel = StatementRelation {
        subject: subject.clone(),
        relation: q.predicate.clone(),
        object: object.clone(),
        derived_from: single_derived_from(np)?,
    };
    rel.validate()?;
    Ok(rel)
}

pub fn revision_from_nanopub(np: &Nanopublication) -> Result<Revision, ModelError> {
    expect_kind(np, NanopubKind::Revision)?;
    let q = about_predicate(np, vocab::llr_revises_fragment())?;
    let node = q
        .subject
        .as_iri()
        .ok_or_else(|| ModelError::Invalid("revision node is a blank node".into()))?
        .clone();
    ensure_all_about(np, &node, &[vocab::llr_revises_fragment(), vocab::llr_revised_value()])?;
    let fragment = q
        .object
        .as_iri()
        .ok_or_else(|| ModelError::Invalid("revised fragment must be an IRI".into()))?
        .clone();
    let value = single_text(np, &node, vocab::llr_revised_value())?
        .ok_or_else(|| ModelError::Invalid("revision lacks a value".into()))?;
    let submitter = np
        .provenance_quads()
        .find(|q| q.subject.as_iri() == Some(&np.assertion) && &q.predicate == vocab::prov_was_attributed_to())
        .and_then(|q| q.object.as_iri().cloned())
        .ok_or_else(|| ModelError::Invalid("revision is not attributed".into()))?;
    Ok(Revision { fragment, value, submitter })
}

fn about_predicate<'a>(np: &'a Nanopublication, p: &Iri) -> Result<&'a Quad, ModelError> {
    let mut it = np.assertion_quads().filter(|q| &q.predicate == p);
    match (it.next(), it.next()) {
        (Some(q), None) => Ok(q),
        _ => Err(ModelError::Invalid(format!("expected exactly one {p}"))),
    }
}
