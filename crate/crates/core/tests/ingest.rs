use std::collections::{BTreeMap, BTreeSet};
use std::time::Duration;

mod common;

use chrono::{TimeZone, Utc};
use common::*;
use llr_core::aida::AidaCodec;
use llr_core::ingest::{
    build_corpus, fetch_doi_metadata, ingest_study_table, BuiltCorpus, ColumnMapping, CorpusInput,
    Gazetteer, IngestError, MetadataSource,
};
use llr_core::model::{Doi, NanopubKind, Place};
use llr_core::nanopub::{verify_trusty, MintInfo};
use llr_core::query::*;
use llr_core::rdf::Iri;
use llr_core::testkit::{self, oracle};
use llr_core::vocab;
use rand::seq::SliceRandom;
use rand::Rng;

/// A random table of `rows` rows over a handful of DOIs, returned with the
/// grouping computed by plain string splitting.
fn synthetic_table(seed: u64, rows: usize) -> (String, BTreeMap<String, BTreeSet<u32>>) {
    let mut rng = testkit::rng(seed);
    let dois = ["10.5555/syn.a", "10.5555/syn.b", "10.5555/syn.c", "10.5555/syn.d"];
    let mut keys = BTreeSet::new();
    while keys.len() < rows {
        keys.insert((*dois.choose(&mut rng).unwrap(), rng.gen_range(1..6u32)));
    }
    let mut keys: Vec<_> = keys.into_iter().collect();
    keys.shuffle(&mut rng);
    let mut text = String::from("paper,study,survey,land_of_focus,overall_size,evidence\n");
    for (doi, k) in &keys {
        let place = ["United States", "Germany", "", "Atlantis"].choose(&mut rng).unwrap();
        let size = if rng.gen_bool(0.5) { rng.gen_range(1..5000).to_string() } else { String::new() };
        let flag = u8::from(rng.gen_bool(0.5));
        text.push_str(&format!("{doi},{k},{flag},{place},{size},Sentence {} holds.|Sentence {k} holds.\n", rng.gen_range(0..4)));
    }
    let mut groups: BTreeMap<String, BTreeSet<u32>> = BTreeMap::new();
    for line in text.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        groups.entry(cells[0].to_string()).or_default().insert(cells[1].parse().unwrap());
    }
    (text, groups)
}

#[test]
fn study_table_grouping_matches_line_splitting() {
    for seed in 0..20 {
        let (text, groups) = synthetic_table(seed, 10);
        let table =
            ingest_study_table(&text, &ColumnMapping::default(), &Gazetteer::bundled(), &AidaCodec::default(), &base()).unwrap();
        assert_eq!(table.study_count(), 10);
        let got: BTreeMap<String, usize> = table
            .papers
            .iter()
            .map(|(p, s)| (Doi::from_iri(&p.iri).unwrap().as_str().to_string(), s.len()))
            .collect();
        let want: BTreeMap<String, usize> = groups.iter().map(|(d, k)| (d.clone(), k.len())).collect();
        assert_eq!(got, want, "seed {seed}");
        for (paper, studies) in &table.papers {
            assert!(studies.iter().all(|s| s.source == paper.iri));
        }
        let atlantis = text.lines().filter(|l| l.contains("Atlantis")).count();
        assert_eq!(table.warnings.len(), atlantis, "seed {seed}");

        let input = CorpusInput {
            review: Doi::parse("10.5555/syn.review").unwrap().to_iri(),
            papers: table.papers,
            metadata: Vec::new(),
            relations: Vec::new(),
        };
        let built = build_corpus(&input, &info()).unwrap();
        let c = Corpus::load(built.all().cloned()).unwrap();
        let census = counts_by_kind(&c);
        assert_eq!(census.count(NanopubKind::Paper) + census.count(NanopubKind::Study), groups.len() + 10);
        assert_eq!(census.count(NanopubKind::Relation), 0);
    }
}

#[test]
fn every_row_failure_names_its_row() {
    let text = "paper,study,evidence\n10.5555/a,1,A thing holds.\nnot a doi,1,A thing holds.\n";
    let err = ingest_study_table(text, &ColumnMapping::default(), &Gazetteer::bundled(), &AidaCodec::default(), &base())
        .unwrap_err();
    assert!(matches!(err, IngestError::Row { row: 3, .. }), "{err}");
    let dup = "paper,study,evidence\n10.5555/a,1,A thing holds.\n10.5555/A,1,Another thing holds.\n";
    let err = ingest_study_table(dup, &ColumnMapping::default(), &Gazetteer::bundled(), &AidaCodec::default(), &base())
        .unwrap_err();
    assert!(matches!(err, IngestError::Row { row: 3, .. }), "{err}");
    let missing = "paper,study\n10.5555/a,1\n";
    assert!(ingest_study_table(missing, &ColumnMapping::default(), &Gazetteer::bundled(), &AidaCodec::default(), &base())
        .is_err());
}

#[test]
fn doi_fixture_gives_year_and_publisher() {
    let source = MetadataSource::Fixtures(mini().join("doi"));
    for doi in ["10.1177/1931243114546448", "https://doi.org/10.1177/1931243114546448"] {
        let m = fetch_doi_metadata(doi, &source).unwrap();
        assert_eq!(m.year, Some(2015));
        assert!(m.publisher.as_deref().unwrap().contains("SAGE"));
        assert_eq!(m.authors.len(), 2);
    }
    assert!(matches!(fetch_doi_metadata("10.5555/not.there", &source), Err(IngestError::MissingFixture { .. })));
    assert!(matches!(fetch_doi_metadata("doi:nonsense", &source), Err(IngestError::Model(_))));
}

/// Needs network access and `--features live`.
#[test]
#[ignore]
fn live_resolver_agrees_with_fixture() {
    let doi = "10.1177/1931243114546448";
    let live = MetadataSource::Live {
        endpoint: "https://doi.org/".into(),
        timeout: Duration::from_secs(20),
    };
    let got = fetch_doi_metadata(doi, &live).unwrap();
    let want = fetch_doi_metadata(doi, &MetadataSource::Fixtures(mini().join("doi"))).unwrap();
    assert_eq!(got.year, want.year);
    assert_eq!(got.doi, want.doi);
    assert!(got.publisher.unwrap_or_default().contains("SAGE"));
}

#[test]
fn mini_corpus_census_matches_inputs_and_oracle() {
    let (built, c) = mini_corpus();
    assert!(built.all().all(verify_trusty));
    let census = counts_by_kind(&c);
    for (kind, n) in [
        (NanopubKind::DoiMetadata, 3),
        (NanopubKind::Paper, 3),
        (NanopubKind::Study, 4),
        (NanopubKind::Relation, 2),
        (NanopubKind::Review, 1),
        (NanopubKind::Schema, 19),
    ] {
        assert_eq!(census.count(kind), n, "{kind:?}");
    }
    assert_eq!(census.indexes, 1);
    assert_eq!(census.total, 32);
    let all: Vec<_> = built.all().cloned().collect();
    for (kind, n) in oracle::census(&all) {
        if kind != NanopubKind::Index {
            assert_eq!(census.count(kind), n, "{kind:?}");
        }
    }
}

#[test]
fn no_relations_in_means_no_relation_nanopubs_out() {
    let built = build_corpus(&mini_input(false), &info()).unwrap();
    let c = Corpus::load(built.all().cloned()).unwrap();
    assert_eq!(counts_by_kind(&c).count(NanopubKind::Relation), 0);
    assert!(relation_distribution(&c).is_empty());
}

#[test]
fn rebuilding_gives_identical_uris() {
    let a = build_corpus(&mini_input(true), &info()).unwrap();
    let b = build_corpus(&mini_input(true), &info()).unwrap();
    let uris = |x: &BuiltCorpus| x.all().map(|n| n.uri.clone()).collect::<Vec<_>>();
    assert_eq!(uris(&a), uris(&b));
    let later = MintInfo {
        timestamp: Utc.with_ymd_and_hms(2021, 5, 2, 12, 0, 0).unwrap(),
        ..info()
    };
    assert_ne!(build_corpus(&mini_input(true), &later).unwrap().index.uri, a.index.uri);
}

#[test]
fn every_study_is_listed_by_exactly_one_paper() {
    let (_, c) = mini_corpus();
    let mut owners: BTreeMap<Iri, usize> = BTreeMap::new();
    for (_, p) in c.papers() {
        for s in &p.studies {
            *owners.entry(s.clone()).or_default() += 1;
        }
    }
    assert_eq!(owners.len(), 4);
    assert!(owners.values().all(|&n| n == 1));
}

#[test]
fn mini_corpus_figures() {
    let (_, c) = mini_corpus();
    let us = |p: &Place| matches!(p, Place::Resource(i) if i.as_str() == "http://dbpedia.org/resource/United_States");
    let focus = pct_statements_by_study_field(&c, StudyField::LandOfFocus, us);
    assert_eq!((focus.numerator, focus.denominator), (5, 8));
    assert_eq!(focus.whole_percent(), 63);
    let survey = pct_statements_by_class(&c, vocab::llr_survey());
    assert_eq!((survey.numerator, survey.denominator), (4, 9));
    assert_eq!(survey.display_2dp(), "44.44%");
    let large = pct_statements_large_study(&c, 1000);
    assert_eq!((large.numerator, large.denominator), (4, 7));
    let s = statement_support(&c, &AidaCodec::default().sentence_iri("Opinion leaders shape the news diet of their followers.").unwrap())
        .unwrap();
    assert_eq!(s.supporting_papers, 3);
    assert_eq!(s.conflicting.len(), 1);
}
