//! A synthetic corpus with the group sizes and query results reported for
//! the case-study review, for tests and demos when the original data set is
//! not at hand.
//!
//! 118 papers (each with a metadata record), 163 studies and 31 relations
//! (26 related, 3 more specific, 2 conflicting) over 100 statements. Study
//! attributes are assigned per statement group so that:
//! - 63 of 100 statements rest on US-focused studies with US first authors,
//! - 22 of the 50 statements with a known group size rest on studies > 1000,
//! - 76 of the 171 (study, statement) evidence pairs come from surveys.

use std::collections::BTreeSet;

use chrono::{TimeZone, Utc};

use super::CorpusInput;
use crate::aida::AidaCodec;
use crate::model::{Author, BibMetadata, Doi, Place, ResearchPaper, StatementRelation, Study};
use crate::nanopub::MintInfo;
use crate::rdf::Iri;
use crate::vocab;

pub const PAPERS: usize = 118;
pub const STUDIES: usize = 163;
pub const STATEMENTS: usize = 100;
pub const REVIEW_DOI: &str = "10.1177/2056305115610141";

pub fn statement(i: usize) -> Iri {
    AidaCodec::default()
        .sentence_iri(&format!("Replica statement {i} holds."))
        .expect("replica sentence")
}

pub fn paper(p: usize) -> Iri {
    Doi::parse(&format!("10.5555/llr.replica.{p}")).expect("replica DOI").to_iri()
}

pub fn mint_info() -> MintInfo {
    MintInfo {
        base: Iri::from_static("https://w3id.org/np/"),
        creator: Iri::from_static("https://w3id.org/livingreviews/agent/replica"),
        timestamp: Utc.with_ymd_and_hms(2021, 5, 1, 12, 0, 0).unwrap(),
    }
}

struct Group {
    us: bool,
    size: Option<u64>,
}

fn group(statement: usize) -> Group {
    let (us, size) = match statement {
        1..=14 => (true, Some(1500)),
        15..=32 => (true, Some(300)),
        33..=63 => (true, None),
        64..=71 => (false, Some(2500)),
        72..=81 => (false, Some(120)),
        _ => (false, None),
    };
    Group { us, size }
}

/// Statements evidenced by study `j` (1-based).
fn evidence_of(j: usize) -> Vec<usize> {
    match j {
        1..=100 => vec![j],
        _ => {
            let k = j - 100;
            if k <= 8 {
                vec![k, k + 1]
            } else {
                vec![k]
            }
        }
    }
}

fn is_survey(j: usize) -> bool {
    j <= 60 || (101..=108).contains(&j)
}

fn paper_of(j: usize) -> usize {
    if j <= PAPERS {
        j
    } else {
        j - PAPERS
    }
}

pub fn input() -> CorpusInput {
    let base = mint_info().base;
    let united_states = Iri::new(format!("{}United_States", vocab::ns::DBPEDIA)).expect("dbpedia IRI");
    let germany = Iri::new(format!("{}Germany", vocab::ns::DBPEDIA)).expect("dbpedia IRI");
    let mut papers: Vec<(ResearchPaper, Vec<Study>)> = (1..=PAPERS)
        .map(|p| {
            let paper = ResearchPaper {
                iri: paper(p),
                claims: BTreeSet::new(),
                studies: BTreeSet::new(),
            };
            (paper, Vec::new())
        })
        .collect();
    for j in 1..=STUDIES {
        let evidence = evidence_of(j);
        let g = group(evidence[0]);
        let p = paper_of(j);
        let mut s = Study::new(crate::model::mint_iri(crate::model::EntityKind::Study, &base, ""), paper(p));
        s.classes.insert(vocab::llr_empirical_article().clone());
        if is_survey(j) {
            s.classes.insert(vocab::llr_survey().clone());
            s.classes.insert(vocab::llr_quantatitive_analysis().clone());
        }
        let place = Place::Resource(if g.us { united_states.clone() } else { germany.clone() });
        s.country = Some(place.clone());
        s.first_author_origin = Some(place.clone());
        s.land_of_focus = Some(place);
        s.overall_size = g.size;
        s.primary_object = Some("People".into());
        // the study ordinal keeps otherwise identical studies apart
        s.theoretical_approach = Some(format!("Replica approach {j}"));
        s.evidence_for = evidence.iter().map(|&i| statement(i)).collect();
        let (paper, studies) = &mut papers[p - 1];
        paper.claims.extend(s.evidence_for.iter().cloned());
        studies.push(s);
    }
    let metadata = (1..=PAPERS)
        .map(|p| BibMetadata {
            iri: paper(p),
            doi: Doi::from_iri(&paper(p)).expect("replica DOI"),
            title: format!("Replica paper {p}"),
            authors: ["a", "b"]
                .iter()
                .map(|x| Author {
                    name: format!("Author {p}{x}"),
                    given: None,
                    family: None,
                    orcid: None,
                })
                .collect(),
            year: Some(2015),
            venue: Some("Replica Journal".into()),
            publisher: None,
        })
        .collect();
    let review = Doi::parse(REVIEW_DOI).expect("review DOI").to_iri();
    let mut relations = Vec::new();
    let mut relate = |a: usize, b: usize, r: &Iri| {
        relations.push(StatementRelation {
            subject: statement(a),
            relation: r.clone(),
            object: statement(b),
            derived_from: review.clone(),
        })
    };
    for i in 1..=26 {
        relate(2 * i - 1, 2 * i, vocab::hycl_has_related_meaning());
    }
    for a in [53, 55, 57] {
        relate(a, a + 1, vocab::hycl_has_more_specific_meaning_than());
    }
    for a in [59, 61] {
        relate(a, a + 1, vocab::hycl_has_conflicting_meaning());
    }
    CorpusInput {
        review,
        papers,
        metadata,
        relations,
    }
}
