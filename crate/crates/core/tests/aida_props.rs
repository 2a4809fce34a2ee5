use std::collections::BTreeMap;

use llr_core::aida::{aida_from_iri, aida_to_iri, AidaCodec, AidaStatement};
use llr_core::rdf::Iri;
use proptest::prelude::*;
use proptest::strategy::ValueTree;

const NS: &str = "http://purl.org/aida/";

/// Percent-encoding by hand: RFC 3986 unreserved bytes pass, every other
/// UTF-8 byte becomes `%XX`.
fn oracle_encode(text: &str) -> String {
    let mut out = String::from(NS);
    for b in text.bytes() {
        if b.is_ascii_alphanumeric() || b"-._~".contains(&b) {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

fn oracle_decode(encoded: &str) -> Option<String> {
    let rest = encoded.strip_prefix(NS)?.as_bytes();
    let mut bytes = Vec::new();
    let mut i = 0;
    while i < rest.len() {
        if rest[i] == b'%' {
            let hex = std::str::from_utf8(rest.get(i + 1..i + 3)?).ok()?;
            bytes.push(u8::from_str_radix(hex, 16).ok()?);
            i += 3;
        } else {
            bytes.push(rest[i]);
            i += 1;
        }
    }
    String::from_utf8(bytes).ok()
}

fn sentence() -> impl Strategy<Value = String> {
    "[A-Z0-9ÉÖ][a-z .,;:'\"()?!%&/#+=@é日𝛼~-]{0,40}[a-z)%'日]\\."
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn round_trip_matches_hand_codec(text in sentence()) {
        let s = AidaStatement::new(text.clone()).unwrap();
        let iri = aida_to_iri(&s);
        prop_assert_eq!(iri.as_str(), oracle_encode(&text));
        prop_assert_eq!(oracle_decode(iri.as_str()), Some(text.clone()));
        prop_assert_eq!(aida_from_iri(&iri).unwrap(), s);
    }

    #[test]
    fn iris_with_broken_escapes_are_rejected_by_both(text in sentence(), cut in 0usize..3) {
        let iri = aida_to_iri(&AidaStatement::new(text).unwrap());
        let s = iri.as_str();
        let Some(pos) = s.rfind('%') else { return Ok(()) };
        let broken = format!("{}{}.", &s[..pos + 1], &s[pos + 1..pos + 1 + cut.min(1)]);
        let broken = Iri::new(broken).unwrap();
        if oracle_decode(broken.as_str()).is_none() {
            prop_assert!(aida_from_iri(&broken).is_err());
        }
    }
}

#[test]
fn distinct_sentences_never_share_an_iri() {
    let codec = AidaCodec::default();
    let mut seen: BTreeMap<Iri, String> = BTreeMap::new();
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    for _ in 0..2000 {
        let text = sentence().new_tree(&mut runner).unwrap().current();
        let iri = codec.sentence_iri(&text).unwrap();
        if let Some(prev) = seen.insert(iri.clone(), text.clone()) {
            assert_eq!(prev, text, "{iri} claimed by two sentences");
        }
    }
}

#[test]
fn short_escape_is_malformed() {
    assert!(aida_from_iri(&Iri::new(format!("{NS}A%2.")).unwrap()).is_err());
    assert!(oracle_decode(&format!("{NS}A%2.")).is_none());
    assert!(aida_from_iri(&Iri::new(format!("{NS}Hello")).unwrap()).is_err());
}
