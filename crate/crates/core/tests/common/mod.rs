#![allow(dead_code)]

use std::path::{Path, PathBuf};

use chrono::{TimeZone, Utc};
use llr_core::aida::AidaCodec;
use llr_core::ingest::{
    build_corpus, fetch_doi_metadata, ingest_relation_table, ingest_study_table, BuiltCorpus, ColumnMapping, CorpusInput,
    Gazetteer, MetadataSource,
};
use llr_core::living::LivingDocument;
use llr_core::model::Doi;
use llr_core::nanopub::MintInfo;
use llr_core::query::Corpus;
use llr_core::rdf::Iri;

pub fn mini() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/mini")
}

pub fn base() -> Iri {
    Iri::new("https://w3id.org/np/").unwrap()
}

pub fn info() -> MintInfo {
    MintInfo {
        base: base(),
        creator: Iri::new("https://w3id.org/livingreviews/agent/mini-author").unwrap(),
        timestamp: Utc.with_ymd_and_hms(2021, 5, 1, 12, 0, 0).unwrap(),
    }
}

pub fn mini_input(with_relations: bool) -> CorpusInput {
    let dir = mini();
    let codec = AidaCodec::default();
    let text = std::fs::read_to_string(dir.join("studies.csv")).unwrap();
    let table = ingest_study_table(&text, &ColumnMapping::default(), &Gazetteer::bundled(), &codec, &base()).unwrap();
    let review = Doi::parse("10.5555/llr.mini").unwrap().to_iri();
    let relations = if with_relations {
        ingest_relation_table(&std::fs::read_to_string(dir.join("relations.csv")).unwrap(), &codec, &review).unwrap()
    } else {
        Vec::new()
    };
    let source = MetadataSource::Fixtures(dir.join("doi"));
    let metadata = table
        .papers
        .iter()
        .map(|(p, _)| fetch_doi_metadata(Doi::from_iri(&p.iri).unwrap().as_str(), &source).unwrap())
        .collect();
    CorpusInput {
        review,
        papers: table.papers,
        metadata,
        relations,
    }
}

pub fn mini_corpus() -> (BuiltCorpus, Corpus) {
    let built = build_corpus(&mini_input(true), &info()).unwrap();
    let c = Corpus::load(built.all().cloned()).unwrap();
    (built, c)
}

pub fn mini_document() -> LivingDocument {
    serde_json::from_str(&std::fs::read_to_string(mini().join("document.json")).unwrap()).unwrap()
}
