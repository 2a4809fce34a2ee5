use std::collections::BTreeSet;

use chrono::{TimeZone, Utc};
use llr_core::aida::AidaCodec;
use llr_core::model::{self, Author, BibMetadata, Doi, NanopubKind, Place, ResearchPaper, ReviewArticle, StatementRelation, Study};
use llr_core::nanopub::{MintInfo, Nanopublication};
use llr_core::query::Corpus;
use llr_core::rdf::Iri;
use llr_core::testkit;
use llr_core::vocab;
use proptest::collection::{btree_set, vec};
use proptest::option;
use proptest::prelude::*;

fn info() -> MintInfo {
    MintInfo {
        base: Iri::new("https://w3id.org/np/").unwrap(),
        creator: Iri::new("https://w3id.org/livingreviews/agent/test").unwrap(),
        timestamp: Utc.with_ymd_and_hms(2022, 2, 2, 2, 2, 2).unwrap(),
    }
}

fn doi() -> impl Strategy<Value = Iri> {
    "10\\.[0-9]{4,5}/[A-Za-z0-9._;()/-]{1,12}".prop_map(|d| Doi::parse(&d).unwrap().to_iri())
}

fn statement() -> impl Strategy<Value = Iri> {
    "[A-Z][a-z ,']{0,20}[a-z]\\.".prop_map(|s| AidaCodec::default().sentence_iri(&s).unwrap())
}

fn place() -> impl Strategy<Value = Place> {
    prop_oneof![
        "[A-Z][a-z_]{1,10}".prop_map(|n| Place::Resource(Iri::new(format!("http://dbpedia.org/resource/{n}")).unwrap())),
        "[A-Za-z ]{1,12}".prop_map(Place::Name),
    ]
}

fn study() -> impl Strategy<Value = Study> {
    (
        doi(),
        btree_set(prop_oneof![
            Just(vocab::llr_survey().clone()),
            Just(vocab::llr_quantatitive_analysis().clone()),
            Just(vocab::llr_empirical_article().clone()),
        ], 0..3),
        (option::of(place()), option::of(1u64..100_000), option::of(place()), option::of(place())),
        (option::of("[A-Za-z \"\\\\]{1,12}"), option::of("[A-Za-z é]{1,12}")),
        btree_set(statement(), 1..4),
        btree_set(statement(), 0..3),
    )
        .prop_map(|(source, classes, (country, size, origin, focus), (object, approach), ev, counter)| {
            let mut s = Study::new(Iri::new("https://w3id.org/np/#study").unwrap(), source);
            s.classes.extend(classes);
            s.country = country;
            s.overall_size = size;
            s.first_author_origin = origin;
            s.land_of_focus = focus;
            s.primary_object = object;
            s.theoretical_approach = approach;
            s.evidence_for = ev;
            s.counter_evidence_for = counter;
            s
        })
}

fn bib() -> impl Strategy<Value = BibMetadata> {
    let author = ("[A-Z][a-z]{1,6} [A-Z][a-z]{1,8}", option::of("[A-Z][a-z]{1,6}"), option::of("[0-9]{4}-[0-9]{4}"))
        .prop_map(|(name, given, orcid)| Author {
            family: given.as_ref().map(|_| name.split(' ').nth(1).unwrap().to_string()),
            given,
            name,
            orcid: orcid.map(|o| Iri::new(format!("https://orcid.org/0000-0001-{o}")).unwrap()),
        });
    (doi(), "[A-Za-z :\"]{1,30}", vec(author, 0..5), option::of(1900i32..2030), option::of("[A-Za-z ]{1,10}"), option::of("[A-Z]{2,8}"))
        .prop_map(|(iri, title, authors, year, venue, publisher)| BibMetadata {
            doi: Doi::from_iri(&iri).unwrap(),
            iri,
            title: format!("T{title}"),
            authors,
            year,
            venue,
            publisher,
        })
}

fn emitted_predicates(np: &Nanopublication) -> BTreeSet<Iri> {
    let mut out = BTreeSet::new();
    for q in np.data.iter() {
        out.insert(q.predicate.clone());
        if &q.predicate == vocab::rdf_type() {
            out.insert(q.object.as_iri().unwrap().clone());
        }
    }
    out
}

fn assert_registered(np: &Nanopublication) -> Result<(), TestCaseError> {
    let known: BTreeSet<&Iri> = vocab::all_terms().into_iter().collect();
    for p in emitted_predicates(np) {
        prop_assert!(known.contains(&p), "{p} is not in the registry");
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn review_round_trip(iri in doi(), reviews in btree_set(doi(), 1..6)) {
        let r = ReviewArticle { iri, reviews };
        let np = model::review_to_nanopub(&r, &info()).unwrap();
        prop_assert_eq!(np.assertion_quads().count(), 1 + r.reviews.len());
        prop_assert_eq!(model::review_from_nanopub(&np).unwrap(), r);
        assert_registered(&np)?;
    }

    #[test]
    fn paper_round_trip(iri in doi(), claims in btree_set(statement(), 0..4), studies in btree_set(0u32..9, 0..4)) {
        let studies = studies
            .into_iter()
            .map(|k| Iri::new(format!("https://w3id.org/np/RAstudy{k}#study")).unwrap())
            .collect();
        let p = ResearchPaper { iri, claims, studies };
        let np = model::paper_to_nanopub(&p, &info()).unwrap();
        prop_assert_eq!(model::paper_from_nanopub(&np).unwrap(), p);
        assert_registered(&np)?;
    }

    #[test]
    fn study_round_trip(s in study()) {
        let np = model::study_to_nanopub(&s, &info()).unwrap();
        prop_assert_eq!(model::classify(&np).unwrap(), NanopubKind::Study);
        prop_assert_eq!(model::study_from_nanopub(&np).unwrap(), s);
        assert_registered(&np)?;
    }

    #[test]
    fn relation_round_trip(a in statement(), b in statement(), k in 0usize..4, source in doi()) {
        prop_assume!(a != b);
        let rel = StatementRelation {
            subject: a,
            relation: vocab::relation_predicates()[k].clone(),
            object: b,
            derived_from: source,
        };
        let np = model::relation_to_nanopub(&rel, &info()).unwrap();
        prop_assert_eq!(np.assertion_quads().count(), 1);
        prop_assert_eq!(model::relation_from_nanopub(&np).unwrap(), rel);
        assert_registered(&np)?;
    }

    #[test]
    fn metadata_round_trip(m in bib()) {
        let np = model::bib_to_nanopub(&m, &info()).unwrap();
        prop_assert_eq!(model::bib_from_nanopub(&np).unwrap(), m);
        assert_registered(&np)?;
    }

    /// Every `cdop:study` target of a paper is a Study nanopub in the corpus.
    #[test]
    fn paper_study_links_resolve(seed in any::<u64>()) {
        let c = Corpus::load(testkit::corpus(&mut testkit::rng(seed), 50)).unwrap();
        for (_, p) in c.papers() {
            for s in &p.studies {
                let (np, _) = s.as_str().split_once('#').unwrap();
                prop_assert_eq!(c.kind(&Iri::new(np).unwrap()), Some(NanopubKind::Study));
            }
        }
    }
}

#[test]
fn schema_nanopubs_use_registered_terms() {
    for np in model::schema_nanopubs(&info()).unwrap() {
        for p in emitted_predicates(&np) {
            assert!(vocab::all_terms().contains(&&p), "{p}");
        }
    }
}
