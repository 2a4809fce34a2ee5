use std::collections::BTreeSet;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{Binding, LivingDocument};
use crate::aida::AidaCodec;
use crate::ingest::table::{paper_iri, resolve_place, Gazetteer};
use crate::model::{
    self, bib_to_nanopub, mint_iri, Author, BibMetadata, Doi, EntityKind, ModelError, Place, ResearchPaper, Revision,
    StatementRelation, Study,
};
use crate::nanopub::{build_index, make_trusty, validate, verify_trusty, MintInfo, NanopubError, Nanopublication};
use crate::query::{paper_key, Corpus, QueryError};
use crate::rdf::Iri;
use crate::vocab;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldError {
    pub field: String,
    pub message: String,
}

impl FieldError {
    fn new(field: &str, message: impl Into<String>) -> Self {
        Self {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum UpdateError {
    #[error("invalid submission: {}", fmt_fields(.0))]
    Validation(Vec<FieldError>),
    #[error("{field} refers to unknown {target}")]
    Dangling { field: String, target: String },
    #[error("{0} is already part of the corpus")]
    Duplicate(Iri),
    #[error("submitter {0} may not update this review")]
    Forbidden(Iri),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Nanopub(#[from] NanopubError),
    #[error(transparent)]
    Query(#[from] QueryError),
}

fn fmt_fields(errors: &[FieldError]) -> String {
    errors.iter().map(|e| format!("{}: {}", e.field, e.message)).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorInput {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub orcid: Option<Iri>,
}

/// One update, tagged by its template name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "template", rename_all = "kebab-case")]
pub enum UpdatePayload {
    /// A paper with its bibliographic record.
    NewPaper {
        doi: String,
        title: String,
        #[serde(default)]
        authors: Vec<AuthorInput>,
        #[serde(default)]
        year: Option<i32>,
        #[serde(default)]
        venue: Option<String>,
        /// Sentences or statement IRIs.
        #[serde(default)]
        claims: Vec<String>,
    },
    /// A study of a paper already in the corpus.
    NewStudy {
        paper: String,
        /// `llr` class local names or full IRIs.
        #[serde(default)]
        classes: Vec<String>,
        #[serde(default)]
        country: Option<String>,
        #[serde(default)]
        overall_size: Option<u64>,
        #[serde(default)]
        first_author_origin: Option<String>,
        #[serde(default)]
        land_of_focus: Option<String>,
        #[serde(default)]
        primary_object: Option<String>,
        #[serde(default)]
        theoretical_approach: Option<String>,
        #[serde(default)]
        evidence: Vec<String>,
        #[serde(default)]
        counter_evidence: Vec<String>,
    },
    NewRelation {
        subject: String,
        /// A HYCL local name or full IRI.
        relation: String,
        object: String,
        /// DOI or IRI the relation is derived from; defaults to the review.
        #[serde(default)]
        source: Option<String>,
    },
    ReviseFragment { fragment: String, value: String },
}

impl UpdatePayload {
    pub fn template(&self) -> &'static str {
        match self {
            UpdatePayload::NewPaper { .. } => "new-paper",
            UpdatePayload::NewStudy { .. } => "new-study",
            UpdatePayload::NewRelation { .. } => "new-relation",
            UpdatePayload::ReviseFragment { .. } => "revise-fragment",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpdateSubmission {
    pub submitter: Iri,
    /// Creation time of the new nanopubs; the caller fills in "now" when absent.
    #[serde(default)]
    pub timestamp: Option<DateTime<Utc>>,
    #[serde(flatten)]
    pub payload: UpdatePayload,
}

/// Who may submit updates to a review.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum Policy {
    Open,
    /// A bearer token from the list is required.
    TokenList { tokens: BTreeSet<String> },
    /// Only the document's listed authors may submit.
    OriginalAuthors,
}

impl Default for Policy {
    fn default() -> Self {
        Policy::TokenList { tokens: BTreeSet::new() }
    }
}

impl Policy {
    pub fn name(&self) -> &'static str {
        match self {
            Policy::Open => "open",
            Policy::TokenList { .. } => "token-list",
            Policy::OriginalAuthors => "original-authors",
        }
    }

    pub fn authorize(&self, doc: &LivingDocument, submitter: &Iri, token: Option<&str>) -> Result<(), UpdateError> {
        let allowed = match self {
            Policy::Open => true,
            Policy::TokenList { tokens } => token.is_some_and(|t| tokens.contains(t)),
            Policy::OriginalAuthors => doc.authors.contains(submitter),
        };
        if allowed {
            Ok(())
        } else {
            Err(UpdateError::Forbidden(submitter.clone()))
        }
    }
}

#[derive(Debug, Clone)]
pub struct UpdateOutcome {
    pub nanopubs: Vec<Nanopublication>,
    pub index: Nanopublication,
    /// The previous snapshot plus the new nanopubs and index.
    pub corpus: Corpus,
}

/// Everything an update needs besides the document and the corpus.
pub struct UpdateContext<'a> {
    pub base: &'a Iri,
    pub codec: &'a AidaCodec,
    pub gazetteer: &'a Gazetteer,
}

fn statement(codec: &AidaCodec, field: &str, text: &str, errors: &mut Vec<FieldError>) -> Option<Iri> {
    let text = text.trim();
    let result = match Iri::new(text) {
        Ok(iri) if codec.is_statement_iri(&iri) => codec.from_iri(&iri).map(|_| iri),
        _ => codec.sentence_iri(text),
    };
    result.map_err(|e| errors.push(FieldError::new(field, e.to_string()))).ok()
}

fn statements(codec: &AidaCodec, field: &str, texts: &[String], errors: &mut Vec<FieldError>) -> BTreeSet<Iri> {
    texts
        .iter()
        .enumerate()
        .filter_map(|(i, t)| statement(codec, &format!("{field}[{i}]"), t, errors))
        .collect()
}

fn place(gazetteer: &Gazetteer, field: &str, value: &Option<String>, errors: &mut Vec<FieldError>) -> Option<Place> {
    let value = value.as_deref()?.trim();
    match resolve_place(value, gazetteer) {
        Ok(p) => p.map(|(p, _)| p),
        Err(e) => {
            errors.push(FieldError::new(field, e));
            None
        }
    }
}

fn source_iri(value: &str, field: &str, errors: &mut Vec<FieldError>) -> Option<Iri> {
    paper_iri(value.trim()).map_err(|e| errors.push(FieldError::new(field, e))).ok()
}

fn relation_iri(value: &str) -> Option<Iri> {
    let full = if value.contains(':') {
        value.to_string()
    } else {
        format!("{}{value}", vocab::ns::HYCL)
    };
    Iri::new(full).ok().filter(vocab::is_relation_predicate)
}

fn not_blank(field: &str, value: &str, errors: &mut Vec<FieldError>) {
    if value.trim().is_empty() {
        errors.push(FieldError::new(field, "must not be empty"));
    }
}

/// Turns one submission into placeholder nanopubs, checking fields and
/// references against the document and the current corpus.
fn draft(
    doc: &LivingDocument,
    payload: &UpdatePayload,
    corpus: &Corpus,
    info: &MintInfo,
    cx: &UpdateContext<'_>,
) -> Result<Vec<Nanopublication>, UpdateError> {
    let mut errors = Vec::new();
    let out = match payload {
        UpdatePayload::NewPaper {
            doi,
            title,
            authors,
            year,
            venue,
            claims,
        } => {
            not_blank("title", title, &mut errors);
            let doi = Doi::parse(doi).map_err(|e| errors.push(FieldError::new("doi", e.to_string()))).ok();
            for (i, a) in authors.iter().enumerate() {
                not_blank(&format!("authors[{i}].name"), &a.name, &mut errors);
            }
            let claims = statements(cx.codec, "claims", claims, &mut errors);
            if let Some(doi) = &doi {
                let key = doi.key();
                if corpus.papers().any(|(_, p)| paper_key(&p.iri) == format!("doi:{key}")) {
                    errors.push(FieldError::new("doi", format!("paper {} is already in the corpus", doi.as_str())));
                }
            }
            match doi {
                Some(doi) if errors.is_empty() => {
                    let iri = doi.to_iri();
                    let meta = BibMetadata {
                        iri: iri.clone(),
                        doi,
                        title: title.trim().to_string(),
                        authors: authors
                            .iter()
                            .map(|a| Author {
                                name: a.name.trim().to_string(),
                                given: None,
                                family: None,
                                orcid: a.orcid.clone(),
                            })
                            .collect(),
                        year: *year,
                        venue: venue.clone(),
                        publisher: None,
                    };
                    let paper = ResearchPaper {
                        iri,
                        claims,
                        studies: BTreeSet::new(),
                    };
                    vec![bib_to_nanopub(&meta, info)?, model::paper_to_nanopub(&paper, info)?]
                }
                _ => vec![],
            }
        }
        UpdatePayload::NewStudy {
            paper,
            classes,
            country,
            overall_size,
            first_author_origin,
            land_of_focus,
            primary_object,
            theoretical_approach,
            evidence,
            counter_evidence,
        } => {
            let source = source_iri(paper, "paper", &mut errors);
            let mut study = Study::new(mint_iri(EntityKind::Study, &info.base, ""), vocab::cdoc_study().clone());
            for (i, c) in classes.iter().enumerate() {
                let iri = if c.contains(':') { Iri::new(c.as_str()) } else { vocab::llr_class(c) };
                match iri {
                    Ok(i) => drop(study.classes.insert(i)),
                    Err(e) => errors.push(FieldError::new(&format!("classes[{i}]"), e.to_string())),
                }
            }
            study.country = place(cx.gazetteer, "country", country, &mut errors);
            study.first_author_origin = place(cx.gazetteer, "first_author_origin", first_author_origin, &mut errors);
            study.land_of_focus = place(cx.gazetteer, "land_of_focus", land_of_focus, &mut errors);
            if *overall_size == Some(0) {
                errors.push(FieldError::new("overall_size", "must be positive"));
            }
            study.overall_size = *overall_size;
            study.primary_object = primary_object.clone().filter(|s| !s.trim().is_empty());
            study.theoretical_approach = theoretical_approach.clone().filter(|s| !s.trim().is_empty());
            study.evidence_for = statements(cx.codec, "evidence", evidence, &mut errors);
            study.counter_evidence_for = statements(cx.codec, "counter_evidence", counter_evidence, &mut errors);
            if evidence.is_empty() && counter_evidence.is_empty() {
                errors.push(FieldError::new("evidence", "a study must evidence at least one statement"));
            }
            if !errors.is_empty() {
                return Err(UpdateError::Validation(errors));
            }
            let source = source.expect("checked above");
            let key = paper_key(&source);
            let Some((_, paper)) = corpus.papers().find(|(_, p)| paper_key(&p.iri) == key) else {
                return Err(UpdateError::Dangling {
                    field: "paper".into(),
                    target: format!("paper {source}"),
                });
            };
            study.source = paper.iri.clone();
            vec![model::study_to_nanopub(&study, info)?]
        }
        UpdatePayload::NewRelation {
            subject,
            relation,
            object,
            source,
        } => {
            let s = statement(cx.codec, "subject", subject, &mut errors);
            let o = statement(cx.codec, "object", object, &mut errors);
            let r = relation_iri(relation.trim());
            if r.is_none() {
                errors.push(FieldError::new("relation", format!("{relation:?} is not a statement relation")));
            }
            let from = match source {
                Some(v) => source_iri(v, "source", &mut errors),
                None => Some(doc.review.clone()),
            };
            match (s, r, o, from) {
                (Some(subject), Some(relation), Some(object), Some(derived_from)) if errors.is_empty() => {
                    let rel = StatementRelation {
                        subject,
                        relation,
                        object,
                        derived_from,
                    };
                    let same = |r: &StatementRelation| {
                        r.subject == rel.subject && r.relation == rel.relation && r.object == rel.object
                    };
                    if let Some((existing, _)) = corpus.relations().find(|(_, r)| same(r)) {
                        return Err(UpdateError::Duplicate(existing.clone()));
                    }
                    match rel.validate() {
                        Ok(()) => vec![model::relation_to_nanopub(&rel, info)?],
                        Err(e) => {
                            errors.push(FieldError::new("object", e.to_string()));
                            vec![]
                        }
                    }
                }
                _ => vec![],
            }
        }
        UpdatePayload::ReviseFragment { fragment, value } => {
            not_blank("value", value, &mut errors);
            if !errors.is_empty() {
                return Err(UpdateError::Validation(errors));
            }
            let Some(f) = doc.fragment(fragment) else {
                return Err(UpdateError::Dangling {
                    field: "fragment".into(),
                    target: format!("fragment {fragment:?}"),
                });
            };
            if !matches!(f.binding, Binding::StatementText { .. }) {
                return Err(UpdateError::Validation(vec![FieldError::new(
                    "fragment",
                    format!("{fragment:?} is recomputed from the corpus and cannot be revised"),
                )]));
            }
            let rev = Revision {
                fragment: doc.fragment_iri(fragment),
                value: value.clone(),
                submitter: info.creator.clone(),
            };
            vec![model::revision_to_nanopub(&rev, info)?]
        }
    };
    if !errors.is_empty() {
        return Err(UpdateError::Validation(errors));
    }
    Ok(out)
}

/// Validates a submission, mints trusty nanopubs for it and an index that
/// supersedes `head`. Nothing is persisted; the returned corpus is a new
/// snapshot and `corpus` is unchanged.
pub fn register_update(
    doc: &LivingDocument,
    submission: &UpdateSubmission,
    corpus: &Corpus,
    head: &Iri,
    cx: &UpdateContext<'_>,
) -> Result<UpdateOutcome, UpdateError> {
    let Some(head_index) = corpus.indexes().find(|ix| &ix.uri == head) else {
        return Err(UpdateError::Dangling {
            field: "version".into(),
            target: format!("index {head}"),
        });
    };
    let info = MintInfo {
        base: cx.base.clone(),
        creator: submission.submitter.clone(),
        timestamp: submission.timestamp.unwrap_or_else(Utc::now),
    };
    let mut minted = Vec::new();
    for np in draft(doc, &submission.payload, corpus, &info, cx)? {
        let np = make_trusty(&np)?;
        if corpus.nanopub(&np.uri).is_some() {
            return Err(UpdateError::Duplicate(np.uri));
        }
        minted.push(np);
    }
    let mut elements = head_index.elements.clone();
    elements.extend(minted.iter().map(|np| np.uri.clone()));
    let index = build_index(&elements, Some(head), &info.creator, info.timestamp, cx.base)?;
    for np in minted.iter().chain(std::iter::once(&index)) {
        let report = validate(np);
        if !report.is_valid() || !verify_trusty(np) {
            return Err(NanopubError::Structure(format!("minted {} fails validation: {}", np.uri, report.violations.join("; "))).into());
        }
    }
    let next = corpus.with(minted.iter().cloned().chain(std::iter::once(index.clone())))?;
    Ok(UpdateOutcome {
        nanopubs: minted,
        index,
        corpus: next,
    })
}
