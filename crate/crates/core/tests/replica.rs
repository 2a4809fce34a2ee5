use llr_core::ingest::{build_corpus, replica};
use llr_core::model::{NanopubKind, Place};
use llr_core::nanopub::verify_trusty;
use llr_core::query::*;
use llr_core::vocab;

#[test]
fn replica_matches_reported_figures() {
    let built = build_corpus(&replica::input(), &replica::mint_info()).unwrap();
    assert!(built.all().all(verify_trusty));
    let c = Corpus::load(built.all().cloned()).unwrap();
    let census = counts_by_kind(&c);
    assert_eq!(census.total, 450);
    assert_eq!(census.indexes, 1);
    for (kind, n) in [
        (NanopubKind::Review, 1),
        (NanopubKind::DoiMetadata, 118),
        (NanopubKind::Paper, 118),
        (NanopubKind::Study, 163),
        (NanopubKind::Relation, 31),
        (NanopubKind::Schema, 19),
    ] {
        assert_eq!(census.count(kind), n, "{kind:?}");
    }
    let us = |p: &Place| matches!(p, Place::Resource(i) if i.as_str().ends_with("/United_States"));
    assert_eq!(pct_statements_by_study_field(&c, StudyField::LandOfFocus, us).whole_percent(), 63);
    assert_eq!(pct_statements_by_study_field(&c, StudyField::FirstAuthorOrigin, us).whole_percent(), 63);
    assert_eq!(pct_statements_large_study(&c, 1000).whole_percent(), 44);
    assert_eq!(pct_statements_by_class(&c, vocab::llr_survey()).display_2dp(), "44.44%");
    let dist = relation_distribution(&c);
    assert_eq!(dist[vocab::hycl_has_related_meaning()].whole_percent(), 84);
}

#[test]
fn rebuilding_gives_identical_uris() {
    let a = build_corpus(&replica::input(), &replica::mint_info()).unwrap();
    let b = build_corpus(&replica::input(), &replica::mint_info()).unwrap();
    assert_eq!(a.index.uri, b.index.uri);
}
