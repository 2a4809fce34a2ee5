//! Vocabulary registry: namespaces and the terms emitted by this crate.
//!
//! Namespaces follow the ontology prefix table of the living reviews model.
//! Nanopublication container terms (`np:`, `npx:`) and the few minted `llr:`
//! terms (`providesCounterEvidenceFor`, `revisesFragment`, `revisedValue`) are
//! recorded here as well so every emitted predicate has a single source.

use std::sync::OnceLock;

use crate::rdf::{Iri, PrefixMap};

pub mod ns {
    pub const CDOC: &str = "https://data.cooperationdatabank.org/vocab/class/";
    pub const CDOP: &str = "https://data.cooperationdatabank.org/vocab/prop/";
    pub const FOAF: &str = "http://xmlns.com/foaf/0.1/";
    pub const CITO: &str = "http://purl.org/spar/cito/";
    pub const DCT: &str = "http://purl.org/dc/terms/";
    pub const FABIO: &str = "http://purl.org/spar/fabio/";
    pub const HYCL: &str = "http://purl.org/petapico/o/hycl#";
    pub const LLR: &str = "https://w3id.org/livingreviews/vocab/";
    pub const PROV: &str = "http://www.w3.org/ns/prov#";
    pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
    pub const OWL: &str = "http://www.w3.org/2002/07/owl#";
    pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
    pub const NP: &str = "http://www.nanopub.org/nschema#";
    pub const NPX: &str = "http://purl.org/nanopub/x/";
    pub const BIBO: &str = "http://purl.org/ontology/bibo/";
    pub const DBPEDIA: &str = "http://dbpedia.org/resource/";
}

macro_rules! terms {
    ($($name:ident = $ns:ident + $local:literal;)*) => {
        $(
            pub fn $name() -> &'static Iri {
                static CELL: OnceLock<Iri> = OnceLock::new();
                CELL.get_or_init(|| Iri::new(format!("{}{}", ns::$ns, $local)).expect("vocabulary IRI"))
            }
        )*

        /// Every term known to the registry, in declaration order.
        pub fn all_terms() -> Vec<&'static Iri> {
            vec![$($name()),*]
        }
    };
}

terms! {
    rdf_type = RDF + "type";
    rdfs_class = RDFS + "Class";
    rdfs_label = RDFS + "label";
    rdfs_comment = RDFS + "comment";
    rdf_property = RDF + "Property";
    owl_class = OWL + "Class";
    owl_object_property = OWL + "ObjectProperty";
    owl_datatype_property = OWL + "DatatypeProperty";
    xsd_date_time = XSD + "dateTime";

    np_nanopublication = NP + "Nanopublication";
    np_has_assertion = NP + "hasAssertion";
    np_has_provenance = NP + "hasProvenance";
    np_has_publication_info = NP + "hasPublicationInfo";
    npx_nanopub_index = NPX + "NanopubIndex";
    npx_includes_element = NPX + "includesElement";
    npx_supersedes = NPX + "supersedes";

    fabio_review_article = FABIO + "ReviewArticle";
    fabio_research_paper = FABIO + "ResearchPaper";
    cito_reviews = CITO + "reviews";
    hycl_claims = HYCL + "claims";
    hycl_has_related_meaning = HYCL + "hasRelatedMeaning";
    hycl_has_more_specific_meaning_than = HYCL + "hasMoreSpecificMeaningThan";
    hycl_has_more_general_meaning_than = HYCL + "hasMoreGeneralMeaningThan";
    hycl_has_conflicting_meaning = HYCL + "hasConflictingMeaning";
    cdop_study = CDOP + "study";
    cdoc_study = CDOC + "Study";
    cdop_country = CDOP + "country";
    cdop_overall = CDOP + "overall";
    llr_empirical_article = LLR + "EmpiricalArticle";
    // spelled as in the published vocabulary
    llr_quantatitive_analysis = LLR + "QuantatitiveAnalysis";
    llr_survey = LLR + "Survey";
    llr_first_author_origin = LLR + "firstAuthorOrigin";
    llr_land_of_focus = LLR + "landOfFocus";
    llr_primary_object = LLR + "primaryObject";
    llr_theoretical_approach = LLR + "theoreticalApproach";
    llr_provides_evidence_for = LLR + "providesEvidenceFor";
    llr_provides_counter_evidence_for = LLR + "providesCounterEvidenceFor";
    llr_revises_fragment = LLR + "revisesFragment";
    llr_revised_value = LLR + "revisedValue";
    prov_was_derived_from = PROV + "wasDerivedFrom";
    prov_was_attributed_to = PROV + "wasAttributedTo";

    dct_title = DCT + "title";
    dct_creator = DCT + "creator";
    dct_created = DCT + "created";
    dct_date = DCT + "date";
    dct_publisher = DCT + "publisher";
    dct_is_part_of = DCT + "isPartOf";
    dct_identifier = DCT + "identifier";
    bibo_doi = BIBO + "doi";
    foaf_person = FOAF + "Person";
    foaf_name = FOAF + "name";
    foaf_given_name = FOAF + "givenName";
    foaf_family_name = FOAF + "familyName";
    owl_same_as = OWL + "sameAs";
}

/// Corrected spelling of [`llr_quantatitive_analysis`]; never emitted, only
/// accepted as an alias when reading class names.
pub const QUANTITATIVE_ANALYSIS_ALIAS: &str = "QuantitativeAnalysis";

/// The four statement relations.
pub fn relation_predicates() -> [&'static Iri; 4] {
    [
        hycl_has_related_meaning(),
        hycl_has_more_specific_meaning_than(),
        hycl_has_more_general_meaning_than(),
        hycl_has_conflicting_meaning(),
    ]
}

pub fn is_relation_predicate(iri: &Iri) -> bool {
    relation_predicates().contains(&iri)
}

/// Resolves an `llr` class local name (accepting the corrected alias).
pub fn llr_class(local: &str) -> Result<Iri, crate::rdf::RdfError> {
    let local = if local == QUANTITATIVE_ANALYSIS_ALIAS {
        "QuantatitiveAnalysis"
    } else {
        local
    };
    Iri::new(format!("{}{}", ns::LLR, local))
}

/// Prefix bindings used when serializing nanopublications.
pub fn standard_prefixes() -> PrefixMap {
    let mut pm = PrefixMap::new();
    for (label, ns) in [
        ("aida", crate::aida::DEFAULT_NAMESPACE),
        ("bibo", ns::BIBO),
        ("cdoc", ns::CDOC),
        ("cdop", ns::CDOP),
        ("cito", ns::CITO),
        ("dbpedia", ns::DBPEDIA),
        ("dct", ns::DCT),
        ("fabio", ns::FABIO),
        ("foaf", ns::FOAF),
        ("hycl", ns::HYCL),
        ("llr", ns::LLR),
        ("np", ns::NP),
        ("npx", ns::NPX),
        ("owl", ns::OWL),
        ("prov", ns::PROV),
        ("rdf", ns::RDF),
        ("rdfs", ns::RDFS),
        ("xsd", ns::XSD),
    ] {
        pm.insert(label, Iri::new(ns).expect("namespace IRI")).expect("prefix label");
    }
    pm
}

/// A schema term defined by its own nanopublication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemaTerm {
    pub local: &'static str,
    pub kind: SchemaKind,
    pub label: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemaKind {
    Class,
    ObjectProperty,
    DatatypeProperty,
}

impl SchemaTerm {
    pub fn iri(&self) -> Iri {
        Iri::new(format!("{}{}", ns::LLR, self.local)).expect("llr term")
    }

    pub fn kind_iri(&self) -> &'static Iri {
        match self.kind {
            SchemaKind::Class => owl_class(),
            SchemaKind::ObjectProperty => owl_object_property(),
            SchemaKind::DatatypeProperty => owl_datatype_property(),
        }
    }
}

/// The `llr` vocabulary, one schema nanopublication per entry.
pub const SCHEMA_TERMS: [SchemaTerm; 19] = {
    use SchemaKind::*;
    [
        SchemaTerm { local: "EmpiricalArticle", kind: Class, label: "empirical article" },
        SchemaTerm { local: "QuantatitiveAnalysis", kind: Class, label: "quantitative analysis" },
        SchemaTerm { local: "QualitativeAnalysis", kind: Class, label: "qualitative analysis" },
        SchemaTerm { local: "Survey", kind: Class, label: "survey" },
        SchemaTerm { local: "Experiment", kind: Class, label: "experiment" },
        SchemaTerm { local: "ContentAnalysis", kind: Class, label: "content analysis" },
        SchemaTerm { local: "Interview", kind: Class, label: "interview" },
        SchemaTerm { local: "FocusGroup", kind: Class, label: "focus group" },
        SchemaTerm { local: "DigitalTraceData", kind: Class, label: "digital trace data" },
        SchemaTerm { local: "CaseStudy", kind: Class, label: "case study" },
        SchemaTerm { local: "TheoreticalArticle", kind: Class, label: "theoretical article" },
        SchemaTerm { local: "firstAuthorOrigin", kind: ObjectProperty, label: "first author origin" },
        SchemaTerm { local: "landOfFocus", kind: ObjectProperty, label: "land of focus" },
        SchemaTerm { local: "providesEvidenceFor", kind: ObjectProperty, label: "provides evidence for" },
        SchemaTerm { local: "providesCounterEvidenceFor", kind: ObjectProperty, label: "provides counter-evidence for" },
        SchemaTerm { local: "revisesFragment", kind: ObjectProperty, label: "revises fragment" },
        SchemaTerm { local: "primaryObject", kind: DatatypeProperty, label: "primary object" },
        SchemaTerm { local: "theoreticalApproach", kind: DatatypeProperty, label: "theoretical approach" },
        SchemaTerm { local: "revisedValue", kind: DatatypeProperty, label: "revised value" },
    ]
};

/// Types that mark a schema-definition assertion.
pub fn schema_types() -> [&'static Iri; 5] {
    [
        rdfs_class(),
        owl_class(),
        rdf_property(),
        owl_object_property(),
        owl_datatype_property(),
    ]
}
