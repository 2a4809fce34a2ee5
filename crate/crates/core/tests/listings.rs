//! The four example nanopublications of the case study (review, paper,
//! study, relation), rebuilt through the model and compared with committed
//! canonical TriG. Set `LLR_BLESS=1` to rewrite the golden files.

use std::collections::BTreeSet;
use std::path::PathBuf;

use chrono::{TimeZone, Utc};
use llr_core::aida::AidaCodec;
use llr_core::model::{self, classify, NanopubKind, Place, ResearchPaper, ReviewArticle, StatementRelation, Study};
use llr_core::nanopub::{make_trusty, validate, verify_trusty, MintInfo, Nanopublication};
use llr_core::query::{neighbors, Corpus};
use llr_core::rdf::Iri;
use llr_core::vocab;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn golden(name: &str, actual: &str) {
    let path = fixtures().join("listings").join(name);
    if std::env::var_os("LLR_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "{name} differs from the golden file");
}

fn iri(s: &str) -> Iri {
    Iri::new(s).unwrap()
}

fn info() -> MintInfo {
    MintInfo {
        base: iri("https://w3id.org/np/"),
        creator: iri("https://w3id.org/livingreviews/agent/case-study"),
        timestamp: Utc.with_ymd_and_hms(2021, 5, 1, 12, 0, 0).unwrap(),
    }
}

fn sentence(s: &str) -> Iri {
    AidaCodec::default().sentence_iri(s).unwrap()
}

const REVIEW_DOI: &str = "https://doi.org/10.1177/2056305115610141";
const OPINION_LEADERS: &str = "People who share news in social media tend to perceive themselves as opinion leaders.";
const FOLLOWERS: &str = "People who share news in social media tend to have more friends or followers.";
const ALTRUISM: &str = "Altruistic motive is one of the main drivers of information sharing.";
const REPUTATION: &str =
    "People share news to gain reputation, to draw people's attention, and to attain status among peers or other users.";
const HICSS: &str = "http://doi.org/10.1109/HICSS.2010.412";

fn review() -> ReviewArticle {
    // the entries printed in the listing; the elided middle is not reproduced
    let reviews = [
        "http://doi.org/10.1016/j.chb.2011.10.002",
        "http://doi.org/10.1016/j.chb.2014.03.006",
        "http://doi.org/10.1016/j.chb.2014.08.009",
        "http://doi.org/10.1080/08824096.2013.843165",
        "http://doi.org/10.1080/1369118X.2011.554572",
        "https://doi.org/10.1177/1077699013482906",
        "https://doi.org/10.1177/1931243114546448",
        "https://doi.org/10.1177/2056305115610141",
        "https://doi.org/10.1207/s15506878jobem4903_3",
        "https://doi.org/10.1287/isre.1100.0339",
    ];
    ReviewArticle {
        iri: iri(REVIEW_DOI),
        reviews: reviews.iter().map(|r| iri(r)).collect(),
    }
}

fn study() -> Study {
    let us = Place::Resource(iri("http://dbpedia.org/resource/United_States"));
    let mut s = Study::new(iri("https://w3id.org/np/#study"), iri("https://doi.org/10.1177/1931243114546448"));
    s.classes.extend([
        vocab::llr_empirical_article().clone(),
        vocab::llr_quantatitive_analysis().clone(),
        vocab::llr_survey().clone(),
    ]);
    s.country = Some(us.clone());
    s.overall_size = Some(417);
    s.first_author_origin = Some(us.clone());
    s.land_of_focus = Some(us);
    s.primary_object = Some("People".into());
    s.evidence_for.insert(sentence(OPINION_LEADERS));
    s.theoretical_approach = Some("Uses and gratifications".into());
    s
}

fn relation() -> StatementRelation {
    StatementRelation {
        subject: sentence(OPINION_LEADERS),
        relation: vocab::hycl_has_related_meaning().clone(),
        object: sentence(FOLLOWERS),
        derived_from: iri(REVIEW_DOI),
    }
}

/// The two studies the paper listing points to. Their content is not shown
/// in the case study, so these are stand-ins with one claim each.
fn hicss_studies() -> Vec<Nanopublication> {
    [ALTRUISM, REPUTATION]
        .iter()
        .enumerate()
        .map(|(i, claim)| {
            let mut s = Study::new(iri("https://w3id.org/np/#study"), iri(HICSS));
            s.classes.insert(vocab::llr_empirical_article().clone());
            s.evidence_for.insert(sentence(claim));
            s.theoretical_approach = Some(format!("Stand-in study {}", i + 1));
            make_trusty(&model::study_to_nanopub(&s, &info()).unwrap()).unwrap()
        })
        .collect()
}

fn paper() -> ResearchPaper {
    ResearchPaper {
        iri: iri(HICSS),
        claims: BTreeSet::from([sentence(ALTRUISM), sentence(REPUTATION)]),
        studies: hicss_studies().iter().map(|np| iri(&format!("{}#study", np.uri))).collect(),
    }
}

/// Rebuilding from the parsed golden file must reproduce it exactly.
fn info_of(np: &Nanopublication) -> MintInfo {
    MintInfo {
        base: np.uri.clone(),
        creator: np.creators()[0].clone(),
        timestamp: np.created().unwrap(),
    }
}

#[test]
fn review_listing() {
    let np = model::review_to_nanopub(&review(), &info()).unwrap();
    let text = np.to_trig();
    golden("review.trig", &text);
    let back = Nanopublication::parse_trig(&text).unwrap();
    let r = model::review_from_nanopub(&back).unwrap();
    assert_eq!(r, review());
    assert_eq!(model::review_to_nanopub(&r, &info_of(&back)).unwrap().to_trig(), text);
    assert!(text.contains("a fabio:ReviewArticle"));
    assert!(text.contains("cito:reviews"));
}

#[test]
fn paper_listing() {
    for (i, np) in hicss_studies().iter().enumerate() {
        golden(&format!("hicss-study-{}.trig", i + 1), &np.to_trig());
        assert!(verify_trusty(np));
    }
    let np = model::paper_to_nanopub(&paper(), &info()).unwrap();
    let text = np.to_trig();
    golden("paper.trig", &text);
    let back = Nanopublication::parse_trig(&text).unwrap();
    let p = model::paper_from_nanopub(&back).unwrap();
    assert_eq!(p, paper());
    assert_eq!(model::paper_to_nanopub(&p, &info_of(&back)).unwrap().to_trig(), text);
    assert!(p.studies.iter().all(|s| s.as_str().contains("/RA") && s.as_str().ends_with("#study")));
}

#[test]
fn study_listing() {
    let np = model::study_to_nanopub(&study(), &info()).unwrap();
    let text = np.to_trig();
    golden("study.trig", &text);
    let back = Nanopublication::parse_trig(&text).unwrap();
    let s = model::study_from_nanopub(&back).unwrap();
    assert_eq!(s, study());
    assert_eq!(model::study_to_nanopub(&s, &info_of(&back)).unwrap().to_trig(), text);
    for needle in [
        "cdop:overall \"417\"",
        "llr:landOfFocus dbpedia:United_States",
        "llr:QuantatitiveAnalysis",
        "llr:primaryObject \"People\"",
        "llr:theoreticalApproach \"Uses and gratifications\"",
    ] {
        assert!(text.contains(needle), "missing {needle}");
    }
}

#[test]
fn relation_listing() {
    let np = model::relation_to_nanopub(&relation(), &info()).unwrap();
    let text = np.to_trig();
    golden("relation.trig", &text);
    let back = Nanopublication::parse_trig(&text).unwrap();
    let r = model::relation_from_nanopub(&back).unwrap();
    assert_eq!(r, relation());
    assert_eq!(model::relation_to_nanopub(&r, &info_of(&back)).unwrap().to_trig(), text);
    assert_eq!(back.assertion_quads().count(), 1);
    assert!(text.contains("hycl:hasRelatedMeaning"));
    assert_eq!(back.derived_from(), vec![&iri(REVIEW_DOI)]);
}

#[test]
fn listings_are_valid_and_classify() {
    let cases = [
        (model::review_to_nanopub(&review(), &info()).unwrap(), NanopubKind::Review),
        (model::paper_to_nanopub(&paper(), &info()).unwrap(), NanopubKind::Paper),
        (model::study_to_nanopub(&study(), &info()).unwrap(), NanopubKind::Study),
        (model::relation_to_nanopub(&relation(), &info()).unwrap(), NanopubKind::Relation),
    ];
    for (np, kind) in cases {
        assert!(validate(&np).is_valid(), "{kind:?}: {:?}", validate(&np));
        assert_eq!(classify(&np).unwrap(), kind);
    }
}

#[test]
fn opinion_leader_statement_has_one_related_neighbor() {
    let np = make_trusty(&model::relation_to_nanopub(&relation(), &info()).unwrap()).unwrap();
    let c = Corpus::load([np]).unwrap();
    let n = neighbors(&c, &sentence(OPINION_LEADERS), vocab::hycl_has_related_meaning());
    assert_eq!(n, BTreeSet::from([sentence(FOLLOWERS)]));
}

/// The bundled trusty relation nanopub and its digest input, checked against
/// the artifact code computed by `fixtures/oracle/trusty_code.py`.
#[test]
fn relation_001_golden_code() {
    let np = make_trusty(&model::relation_to_nanopub(&relation(), &info()).unwrap()).unwrap();
    let dir = fixtures();
    let trig = np.to_trig();
    let nq = llr_core::nanopub::trusty_digest_input(&np.data, &np.uri);
    if std::env::var_os("LLR_BLESS").is_some() {
        std::fs::write(dir.join("relation-001.trig"), &trig).unwrap();
        std::fs::write(dir.join("relation-001.nq"), &nq).unwrap();
    }
    let committed = std::fs::read_to_string(dir.join("relation-001.trig")).unwrap();
    assert_eq!(trig, committed);
    assert_eq!(nq, std::fs::read_to_string(dir.join("relation-001.nq")).unwrap());
    let parsed = Nanopublication::parse_trig(&committed).unwrap();
    assert!(verify_trusty(&parsed));
    let oracle = std::fs::read_to_string(dir.join("relation-001.code")).unwrap();
    assert_eq!(parsed.artifact_code().unwrap().as_str(), oracle.trim());
}
