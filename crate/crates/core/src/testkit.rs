//! Seeded generators for datasets, nanopubs and small review corpora, and
//! brute-force reference implementations of the corpus queries that work on
//! raw quads only. Enabled by the `testkit` feature.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::aida::AidaCodec;
use crate::model::{self, Author, BibMetadata, Doi, Place, ResearchPaper, ReviewArticle, StatementRelation, Study};
use crate::nanopub::{assemble, make_trusty, MintInfo, Nanopublication};
use crate::rdf::{BlankNode, Dataset, Iri, Literal, PrefixMap, Quad, Subject, Term, Triple};
use crate::vocab;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const NAMESPACES: [&str; 6] = [
    "http://ex.org/",
    "http://ex.org/ns#",
    "https://w3id.org/np/RAexample#",
    "urn:x:",
    "http://purl.org/aida/",
    "http://ex.org/a.b/",
];

const LOCAL_CHARS: &[char] = &[
    'a', 'b', 'X', 'Z', '0', '9', '_', '-', '.', ':', '%', '2', 'F', '~', '!', '$', '&', '\'', '(', ')', '*', '+', ',', ';',
    '=', '/', '?', '#', '@', 'é', '日',
];

const LEXICAL_CHARS: &[char] = &[
    'a', 'Q', '7', ' ', '"', '\\', '\n', '\r', '\t', '\u{8}', '\u{c}', '\u{1}', '\u{7f}', 'é', '😀', '\'', '#', '<', '>', '{',
    '}', '@', '^', '.', ',', ';',
];

fn pick<'a, T>(rng: &mut impl Rng, items: &'a [T]) -> &'a T {
    items.choose(rng).expect("non-empty pool")
}

fn string_from(rng: &mut impl Rng, pool: &[char], max: usize) -> String {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| *pick(rng, pool)).collect()
}

pub fn iri(rng: &mut impl Rng) -> Iri {
    loop {
        let ns = pick(rng, &NAMESPACES);
        if let Ok(i) = Iri::new(format!("{ns}{}", string_from(rng, LOCAL_CHARS, 6))) {
            return i;
        }
    }
}

fn blank(rng: &mut impl Rng) -> BlankNode {
    BlankNode::new(*pick(rng, &["b0", "b1", "x_2", "B3"])).expect("label")
}

fn literal(rng: &mut impl Rng) -> Literal {
    let lexical = string_from(rng, LEXICAL_CHARS, 8);
    match rng.gen_range(0..4) {
        0 => Literal::string(lexical),
        1 => Literal::lang(lexical, *pick(rng, &["en", "en-US", "DE", "nl-be"])).expect("tag"),
        2 => Literal::typed(lexical, vocab::xsd_date_time().clone()),
        _ => Literal::typed(lexical, iri(rng)),
    }
}

fn subject(rng: &mut impl Rng) -> Subject {
    if rng.gen_bool(0.2) {
        Subject::Blank(blank(rng))
    } else {
        Subject::Iri(iri(rng))
    }
}

fn object(rng: &mut impl Rng) -> Term {
    match rng.gen_range(0..10) {
        0 | 1 => Term::Blank(blank(rng)),
        2..=5 => Term::Literal(literal(rng)),
        _ => Term::Iri(iri(rng)),
    }
}

/// A dataset of up to 25 quads over a few graphs, with a random prefix map.
pub fn dataset(rng: &mut impl Rng) -> Dataset {
    let mut prefixes = PrefixMap::new();
    for label in ["ex", "ns", "sub", "", "a1"] {
        if rng.gen_bool(0.5) {
            let ns = Iri::new(*pick(rng, &NAMESPACES)).expect("namespace");
            prefixes.insert(label, ns).expect("label");
        }
    }
    let mut d = Dataset::with_prefixes(prefixes);
    let graphs: Vec<Iri> = (0..rng.gen_range(1..=3)).map(|_| iri(rng)).collect();
    for _ in 0..rng.gen_range(0..=25) {
        let g = pick(rng, &graphs).clone();
        d.insert(Quad::new(subject(rng), iri(rng), object(rng), g));
    }
    d
}

pub fn timestamp(rng: &mut impl Rng) -> DateTime<Utc> {
    Utc.timestamp_opt(rng.gen_range(1_500_000_000..1_800_000_000), 0).single().expect("in range")
}

fn marker_triple(rng: &mut impl Rng, s: Iri) -> Triple {
    let o = match rng.gen_range(0..8) {
        0 => vocab::fabio_review_article().clone(),
        1 => vocab::fabio_research_paper().clone(),
        2 => vocab::cdoc_study().clone(),
        3 => vocab::owl_class().clone(),
        4 => vocab::npx_nanopub_index().clone(),
        _ => iri(rng),
    };
    Triple::new(s, vocab::rdf_type().clone(), o)
}

/// An assembled, pre-trusty nanopub with a random assertion. Some assertion
/// triples carry kind markers so that every classification outcome occurs;
/// some reference the nanopub itself.
pub fn nanopub(rng: &mut impl Rng) -> Nanopublication {
    let base = Iri::new(*pick(rng, &["https://w3id.org/np/", "http://ex.org/np/tmp"])).expect("base");
    let mut triples = Vec::new();
    for _ in 0..rng.gen_range(1..=6) {
        let s = if rng.gen_bool(0.2) {
            base.join_str("#thing").expect("self IRI")
        } else {
            iri(rng)
        };
        let t = match rng.gen_range(0..6) {
            0 => marker_triple(rng, s),
            1 => Triple::new(s, vocab::bibo_doi().clone(), Literal::string("10.5555/x")),
            2 => Triple::new(s, (*pick(rng, &vocab::relation_predicates())).clone(), iri(rng)),
            _ => Triple::new(s, iri(rng), object(rng)),
        };
        triples.push(t);
    }
    let creator = iri(rng);
    assemble(triples, iri(rng), creator, timestamp(rng), base).expect("non-empty assertion")
}

fn sentence_pool(n: usize) -> Vec<Iri> {
    let codec = AidaCodec::default();
    (0..n)
        .map(|k| codec.sentence_iri(&format!("Generated statement {k}, with punctuation's sake.")).expect("sentence"))
        .collect()
}

fn doi_iri(k: usize, shout: bool) -> Iri {
    let name = format!("10.5555/Rnd.{k}");
    let name = if shout { name.to_uppercase() } else { name };
    Doi::parse(&name).expect("doi").to_iri()
}

fn place(rng: &mut impl Rng) -> Option<Place> {
    match rng.gen_range(0..5) {
        0 => None,
        1 | 2 => Some(Place::Resource(Iri::from_static("http://dbpedia.org/resource/United_States"))),
        3 => Some(Place::Resource(Iri::from_static("http://dbpedia.org/resource/Germany"))),
        _ => Some(Place::Name("Atlantis".into())),
    }
}

fn subset(rng: &mut impl Rng, pool: &[Iri], p: f64) -> BTreeSet<Iri> {
    pool.iter().filter(|_| rng.gen_bool(p)).cloned().collect()
}

const AUTHORS: [(&str, Option<&str>); 5] = [
    ("Ann Lee", None),
    ("ann  LEE", None),
    ("Bo Chen", Some("https://orcid.org/0000-0002-1825-0097")),
    ("B. Chen", Some("https://orcid.org/0000-0002-1825-0097")),
    ("Cy Diaz", None),
];

/// A trusty review corpus of at most `max` nanopubs: one review, papers with
/// optional metadata, studies (some not listed by their paper, some citing
/// their paper's DOI in another case) and statement relations.
pub fn corpus(rng: &mut impl Rng, max: usize) -> Vec<Nanopublication> {
    let info = MintInfo {
        base: Iri::from_static("https://w3id.org/np/"),
        creator: Iri::from_static("https://w3id.org/livingreviews/agent/generator"),
        timestamp: timestamp(rng),
    };
    let trusty = |np: Nanopublication| make_trusty(&np).expect("trusty");
    let statements = sentence_pool(rng.gen_range(2..=7));
    let review_iri = Doi::parse("10.5555/rnd.review").expect("doi").to_iri();
    let n_papers = rng.gen_range(1..=5);
    let mut out: Vec<Nanopublication> = Vec::new();
    out.push(trusty(
        model::review_to_nanopub(
            &ReviewArticle {
                iri: review_iri.clone(),
                reviews: (0..n_papers).map(|k| doi_iri(k, false)).collect(),
            },
            &info,
        )
        .expect("review"),
    ));
    for k in 0..n_papers {
        let paper_iri = doi_iri(k, false);
        if rng.gen_bool(0.8) {
            let authors = (0..rng.gen_range(1..=3))
                .map(|_| {
                    let (name, orcid) = *pick(rng, &AUTHORS);
                    Author {
                        name: name.into(),
                        given: None,
                        family: None,
                        orcid: orcid.map(Iri::from_static),
                    }
                })
                .collect();
            let m = BibMetadata {
                iri: paper_iri.clone(),
                doi: Doi::from_iri(&paper_iri).expect("doi"),
                title: format!("Generated paper {k}"),
                authors,
                year: Some(2000 + k as i32),
                venue: None,
                publisher: None,
            };
            out.push(trusty(model::bib_to_nanopub(&m, &info).expect("metadata")));
        }
        let mut listed = BTreeSet::new();
        for _ in 0..rng.gen_range(0..=3) {
            let base_study = Iri::from_static("https://w3id.org/np/#study");
            let mut s = Study::new(base_study, doi_iri(k, rng.gen_bool(0.3)));
            for cls in [vocab::llr_survey(), vocab::llr_quantatitive_analysis(), vocab::llr_empirical_article()] {
                if rng.gen_bool(0.4) {
                    s.classes.insert(cls.clone());
                }
            }
            s.country = place(rng);
            s.first_author_origin = place(rng);
            s.land_of_focus = place(rng);
            s.overall_size = match rng.gen_range(0..4) {
                0 => None,
                1 => Some(1000),
                _ => Some(rng.gen_range(1..3000)),
            };
            s.evidence_for = subset(rng, &statements, 0.4);
            s.counter_evidence_for = subset(rng, &statements, 0.15);
            if s.evidence_for.is_empty() && s.counter_evidence_for.is_empty() {
                s.evidence_for.insert(pick(rng, &statements).clone());
            }
            let np = trusty(model::study_to_nanopub(&s, &info).expect("study"));
            if rng.gen_bool(0.8) {
                listed.insert(np.uri.join_str("#study").expect("study IRI"));
            }
            out.push(np);
        }
        let p = ResearchPaper {
            iri: paper_iri,
            claims: subset(rng, &statements, 0.3),
            studies: listed,
        };
        out.push(trusty(model::paper_to_nanopub(&p, &info).expect("paper")));
    }
    for _ in 0..rng.gen_range(0..=5) {
        let (a, b) = (pick(rng, &statements).clone(), pick(rng, &statements).clone());
        if a == b {
            continue;
        }
        let rel = StatementRelation {
            subject: a,
            relation: (*pick(rng, &vocab::relation_predicates())).clone(),
            object: b,
            derived_from: review_iri.clone(),
        };
        out.push(trusty(model::relation_to_nanopub(&rel, &info).expect("relation")));
    }
    let mut seen = BTreeSet::new();
    out.retain(|np| seen.insert(np.uri.clone()));
    out.truncate(max);
    out
}

/// Reference implementations over raw quads: no typed views, no indexes.
pub mod oracle {
    use super::*;
    use crate::model::NanopubKind;

    const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    const STUDY: &str = "https://data.cooperationdatabank.org/vocab/class/Study";
    const PAPER: &str = "http://purl.org/spar/fabio/ResearchPaper";
    const EVIDENCE: &str = "https://w3id.org/livingreviews/vocab/providesEvidenceFor";
    const COUNTER: &str = "https://w3id.org/livingreviews/vocab/providesCounterEvidenceFor";
    const CLAIMS: &str = "http://purl.org/petapico/o/hycl#claims";
    const HAS_STUDY: &str = "https://data.cooperationdatabank.org/vocab/prop/study";
    const OVERALL: &str = "https://data.cooperationdatabank.org/vocab/prop/overall";
    const DERIVED: &str = "http://www.w3.org/ns/prov#wasDerivedFrom";
    const BIBO_DOI: &str = "http://purl.org/ontology/bibo/doi";
    const CREATOR: &str = "http://purl.org/dc/terms/creator";
    const SAME_AS: &str = "http://www.w3.org/2002/07/owl#sameAs";
    const NAME: &str = "http://xmlns.com/foaf/0.1/name";
    const HYCL: &str = "http://purl.org/petapico/o/hycl#";
    const CONFLICTING: &str = "http://purl.org/petapico/o/hycl#hasConflictingMeaning";
    const SPECIFIC: &str = "http://purl.org/petapico/o/hycl#hasMoreSpecificMeaningThan";
    const GENERAL: &str = "http://purl.org/petapico/o/hycl#hasMoreGeneralMeaningThan";

    /// Assertion triples as plain strings: (subject, predicate, object, object is a literal).
    fn triples(np: &Nanopublication) -> Vec<(String, String, String, bool)> {
        np.data
            .iter()
            .filter(|q| q.graph == np.assertion)
            .map(|q| {
                let s = match &q.subject {
                    Subject::Iri(i) => i.as_str().to_string(),
                    Subject::Blank(b) => format!("_:{}", b.label()),
                };
                let (o, lit) = match &q.object {
                    Term::Iri(i) => (i.as_str().to_string(), false),
                    Term::Blank(b) => (format!("_:{}", b.label()), false),
                    Term::Literal(l) => (l.lexical().to_string(), true),
                };
                (s, q.predicate.as_str().to_string(), o, lit)
            })
            .collect()
    }

    fn has(t: &[(String, String, String, bool)], s: &str, p: &str, o: &str) -> bool {
        t.iter().any(|(a, b, c, _)| a == s && b == p && c == o)
    }

    fn objects<'a>(t: &'a [(String, String, String, bool)], s: &'a str, p: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        t.iter().filter(move |(a, b, _, _)| a == s && b == p).map(|(_, _, c, _)| c.as_str())
    }

    fn typed<'a>(t: &'a [(String, String, String, bool)], class: &'a str) -> impl Iterator<Item = &'a str> + 'a {
        t.iter()
            .filter(move |(_, p, o, _)| p == RDF_TYPE && o == class)
            .map(|(s, _, _, _)| s.as_str())
    }

    fn is_relation(t: &[(String, String, String, bool)]) -> bool {
        t.len() == 1 && is_relation_predicate(&t[0].1)
    }

    fn is_relation_predicate(p: &str) -> bool {
        ["hasRelatedMeaning", "hasMoreSpecificMeaningThan", "hasMoreGeneralMeaningThan", "hasConflictingMeaning"]
            .iter()
            .any(|l| p == format!("{HYCL}{l}"))
    }

    /// Kind by scanning every assertion predicate; `None` when no kind or
    /// more than one applies.
    pub fn kind(np: &Nanopublication) -> Option<NanopubKind> {
        let t = triples(np);
        let mut kinds = BTreeSet::new();
        for (_, p, o, _) in &t {
            let k = match (p.as_str(), o.as_str()) {
                (RDF_TYPE, "http://purl.org/spar/fabio/ReviewArticle") => Some(NanopubKind::Review),
                (RDF_TYPE, PAPER) => Some(NanopubKind::Paper),
                (RDF_TYPE, STUDY) => Some(NanopubKind::Study),
                (RDF_TYPE, "http://purl.org/nanopub/x/NanopubIndex") => Some(NanopubKind::Index),
                (RDF_TYPE, c) if vocab::schema_types().iter().any(|s| s.as_str() == c) => Some(NanopubKind::Schema),
                (BIBO_DOI, _) => Some(NanopubKind::DoiMetadata),
                ("https://w3id.org/livingreviews/vocab/revisesFragment", _) => Some(NanopubKind::Revision),
                _ => None,
            };
            kinds.extend(k);
        }
        if is_relation(&t) {
            kinds.insert(NanopubKind::Relation);
        }
        (kinds.len() == 1).then(|| kinds.into_iter().next().expect("one"))
    }

    pub fn census(nps: &[Nanopublication]) -> BTreeMap<NanopubKind, usize> {
        let mut out = BTreeMap::new();
        for np in nps {
            if let Some(k) = kind(np) {
                *out.entry(k).or_default() += 1;
            }
        }
        out
    }

    struct StudyRow {
        iri: String,
        source: String,
        types: BTreeSet<String>,
        fields: Vec<(String, String, bool)>,
        evidence: BTreeSet<String>,
    }

    fn studies(nps: &[Nanopublication]) -> Vec<StudyRow> {
        let mut out = Vec::new();
        for np in nps {
            let t = triples(np);
            let source = np
                .data
                .iter()
                .find(|q| q.graph == np.provenance && q.predicate.as_str() == DERIVED)
                .and_then(|q| q.object.as_iri())
                .map(|i| i.as_str().to_string())
                .unwrap_or_default();
            for s in typed(&t, STUDY) {
                out.push(StudyRow {
                    iri: s.to_string(),
                    source: source.clone(),
                    types: objects(&t, s, RDF_TYPE).map(String::from).collect(),
                    fields: t
                        .iter()
                        .filter(|(a, _, _, _)| a == s)
                        .map(|(_, p, o, l)| (p.clone(), o.clone(), *l))
                        .collect(),
                    evidence: objects(&t, s, EVIDENCE).map(String::from).collect(),
                });
            }
        }
        out
    }

    /// (study, statement) evidence pairs whose study has `class`, over all pairs.
    pub fn class_share(nps: &[Nanopublication], class: &Iri) -> (u64, u64) {
        let mut num = 0;
        let mut den = 0;
        for s in studies(nps) {
            for _statement in &s.evidence {
                den += 1;
                if s.types.contains(class.as_str()) {
                    num += 1;
                }
            }
        }
        (num, den)
    }

    /// Statement-level share: for each evidenced statement, is there an
    /// evidencing study with a value for `field`, and one whose value passes?
    pub fn field_share(nps: &[Nanopublication], field: &Iri, pass: impl Fn(&str, bool) -> bool) -> (u64, u64) {
        let rows = studies(nps);
        let statements: BTreeSet<&String> = rows.iter().flat_map(|s| s.evidence.iter()).collect();
        let mut num = 0;
        let mut den = 0;
        for st in statements {
            let mut known = false;
            let mut hit = false;
            for s in rows.iter().filter(|s| s.evidence.contains(st)) {
                for (p, o, lit) in &s.fields {
                    if p == field.as_str() {
                        known = true;
                        hit |= pass(o, *lit);
                    }
                }
            }
            den += u64::from(known);
            num += u64::from(hit);
        }
        (num, den)
    }

    pub fn large_share(nps: &[Nanopublication], threshold: u64) -> (u64, u64) {
        let overall = Iri::from_static(OVERALL);
        field_share(nps, &overall, |o, _| o.parse::<u64>().map(|n| n > threshold).unwrap_or(false))
    }

    fn doi_key(iri: &str) -> String {
        for p in ["https://doi.org/", "http://doi.org/", "https://dx.doi.org/", "http://dx.doi.org/"] {
            if let Some(rest) = iri.strip_prefix(p) {
                let decoded = percent_encoding::percent_decode_str(rest).decode_utf8_lossy();
                return format!("doi:{}", decoded.to_lowercase());
            }
        }
        iri.to_string()
    }

    fn mentioned(nps: &[Nanopublication]) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for np in nps {
            let t = triples(np);
            for (s, p, o, _) in &t {
                if p == CLAIMS || p == EVIDENCE || p == COUNTER {
                    out.insert(o.clone());
                }
                if is_relation(&t) {
                    out.insert(s.clone());
                    out.insert(o.clone());
                }
            }
        }
        out
    }

    fn papers_for(nps: &[Nanopublication], statement: &str) -> BTreeSet<String> {
        let rows = studies(nps);
        let mut keys = BTreeSet::new();
        for np in nps {
            let t = triples(np);
            for p in typed(&t, PAPER) {
                if has(&t, p, CLAIMS, statement) {
                    keys.insert(doi_key(p));
                }
                for s in rows.iter().filter(|s| s.evidence.contains(statement)) {
                    if has(&t, p, HAS_STUDY, &s.iri) {
                        keys.insert(doi_key(p));
                    }
                }
            }
        }
        for s in rows.iter().filter(|s| s.evidence.contains(statement)) {
            keys.insert(doi_key(&s.source));
        }
        keys
    }

    fn counts(nps: &[Nanopublication], statement: &str) -> (usize, usize) {
        let papers = papers_for(nps, statement);
        let mut authors = BTreeSet::new();
        for np in nps {
            let t = triples(np);
            for (m, p, doi, _) in &t {
                if p != BIBO_DOI {
                    continue;
                }
                if !papers.contains(&format!("doi:{}", doi.to_lowercase())) && !papers.contains(&doi_key(m)) {
                    continue;
                }
                for a in objects(&t, m, CREATOR) {
                    let identity = match objects(&t, a, SAME_AS).next() {
                        Some(orcid) => orcid.to_string(),
                        None => objects(&t, a, NAME)
                            .next()
                            .unwrap_or_default()
                            .split_whitespace()
                            .collect::<Vec<_>>()
                            .join(" ")
                            .to_lowercase(),
                    };
                    authors.insert(identity);
                }
            }
        }
        (papers.len(), authors.len())
    }

    /// Statements reachable from `statement` over relation nanopubs, with
    /// related/conflicting symmetric and specific/general mutually inverse.
    pub fn neighbors(nps: &[Nanopublication], statement: &str, relation: &str) -> BTreeSet<String> {
        let inverse = match relation {
            SPECIFIC => GENERAL,
            GENERAL => SPECIFIC,
            r => r,
        };
        let mut out = BTreeSet::new();
        for np in nps {
            let t = triples(np);
            if !is_relation(&t) {
                continue;
            }
            let (s, p, o, _) = &t[0];
            if p == relation && s == statement {
                out.insert(o.clone());
            }
            if p == inverse && o == statement {
                out.insert(s.clone());
            }
        }
        out
    }

    /// (papers, authors, conflicting neighbors with their counts), or `None`
    /// for a statement the corpus never mentions.
    #[allow(clippy::type_complexity)]
    pub fn support(nps: &[Nanopublication], statement: &Iri) -> Option<(usize, usize, Vec<(String, usize, usize)>)> {
        if !mentioned(nps).contains(statement.as_str()) {
            return None;
        }
        let (papers, authors) = counts(nps, statement.as_str());
        let conflicting = neighbors(nps, statement.as_str(), CONFLICTING)
            .into_iter()
            .map(|n| {
                let (p, a) = counts(nps, &n);
                (n, p, a)
            })
            .collect();
        Some((papers, authors, conflicting))
    }

    /// Every statement the corpus mentions.
    pub fn statements(nps: &[Nanopublication]) -> BTreeSet<String> {
        mentioned(nps)
    }
}
