use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::IngestError;
use crate::aida::AidaCodec;
use crate::model::{mint_iri, Doi, EntityKind, Place, ResearchPaper, StatementRelation, Study};
use crate::rdf::Iri;
use crate::vocab;

const BUNDLED_GAZETTEER: &str = include_str!("../../data/gazetteer.tsv");
const UNKNOWN_SIZES: [&str; 5] = ["", "unknown", "na", "n/a", "-"];

/// Country name to resource lookup, case-insensitive.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    entries: HashMap<String, Iri>,
}

impl Gazetteer {
    /// The small country table shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_tsv(BUNDLED_GAZETTEER).expect("bundled gazetteer")
    }

    /// `name<TAB>iri` lines; `#` starts a comment line.
    pub fn from_tsv(text: &str) -> Result<Self, IngestError> {
        let mut entries = HashMap::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, iri) = line
                .split_once('\t')
                .ok_or_else(|| IngestError::Table(format!("gazetteer line {} lacks a tab", n + 1)))?;
            let iri = Iri::new(iri.trim()).map_err(|e| IngestError::Table(format!("gazetteer line {}: {e}", n + 1)))?;
            entries.insert(name.trim().to_lowercase(), iri);
        }
        Ok(Self { entries })
    }

    pub fn lookup(&self, name: &str) -> Option<&Iri> {
        self.entries.get(&name.trim().to_lowercase())
    }
}

/// Column names of a study table. The defaults are the canonical header
/// set; any column other than paper, ordinal and evidence may be absent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ColumnMapping {
    pub delimiter: char,
    /// Separator between several sentences in one cell.
    pub list_separator: char,
    pub paper: String,
    pub ordinal: String,
    /// Flag column name to `llr` class local name.
    pub class_flags: BTreeMap<String, String>,
    pub country: String,
    pub overall_size: String,
    pub first_author_origin: String,
    pub land_of_focus: String,
    pub primary_object: String,
    pub theoretical_approach: String,
    pub evidence: String,
    pub counter_evidence: String,
    pub claims: String,
}

impl Default for ColumnMapping {
    fn default() -> Self {
        let flags = [
            ("empirical", "EmpiricalArticle"),
            ("quantitative", "QuantatitiveAnalysis"),
            ("qualitative", "QualitativeAnalysis"),
            ("survey", "Survey"),
            ("experiment", "Experiment"),
            ("content_analysis", "ContentAnalysis"),
            ("interview", "Interview"),
            ("focus_group", "FocusGroup"),
            ("digital_trace_data", "DigitalTraceData"),
            ("case_study", "CaseStudy"),
        ];
        Self {
            delimiter: ',',
            list_separator: '|',
            paper: "paper".into(),
            ordinal: "study".into(),
            class_flags: flags.iter().map(|(c, l)| (c.to_string(), l.to_string())).collect(),
            country: "country".into(),
            overall_size: "overall_size".into(),
            first_author_origin: "first_author_origin".into(),
            land_of_focus: "land_of_focus".into(),
            primary_object: "primary_object".into(),
            theoretical_approach: "theoretical_approach".into(),
            evidence: "evidence".into(),
            counter_evidence: "counter_evidence".into(),
            claims: "claims".into(),
        }
    }
}

/// Papers in order of first appearance, each with its studies by ordinal.
/// Study IRIs are the placeholder `base#study` of their own (future)
/// nanopub and `ResearchPaper::studies` is left empty; both are fixed up
/// once the study nanopubs are made trusty.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StudyTable {
    pub papers: Vec<(ResearchPaper, Vec<Study>)>,
    pub warnings: Vec<String>,
}

impl StudyTable {
    pub fn study_count(&self) -> usize {
        self.papers.iter().map(|(_, s)| s.len()).sum()
    }
}

struct Columns {
    index: HashMap<String, usize>,
}

impl Columns {
    fn get<'r>(&self, row: &'r csv::StringRecord, name: &str) -> &'r str {
        self.index.get(name).and_then(|&i| row.get(i)).map(str::trim).unwrap_or("")
    }
}

pub fn ingest_study_table(
    text: &str,
    mapping: &ColumnMapping,
    gazetteer: &Gazetteer,
    codec: &AidaCodec,
    base: &Iri,
) -> Result<StudyTable, IngestError> {
    let delimiter = u8::try_from(mapping.delimiter).map_err(|_| IngestError::Table("delimiter must be ASCII".into()))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| IngestError::Table(e.to_string()))?.clone();
    let cols = Columns {
        index: headers.iter().enumerate().map(|(i, h)| (h.trim().to_string(), i)).collect(),
    };
    for required in [&mapping.paper, &mapping.ordinal, &mapping.evidence] {
        if !cols.index.contains_key(required.as_str()) {
            return Err(IngestError::Table(format!("missing required column {required:?}")));
        }
    }

    // DOIs compare case-insensitively; the first spelling seen is kept.
    let mut order: Vec<String> = Vec::new();
    let mut papers: HashMap<String, (ResearchPaper, BTreeMap<u32, Study>)> = HashMap::new();
    let mut warnings = Vec::new();
    for (n, record) in reader.records().enumerate() {
        // header is line 1
        let row = n + 2;
        let record = record.map_err(|e| IngestError::Row { row, message: e.to_string() })?;
        let err = |message: String| IngestError::Row { row, message };
        let get = |name: &str| cols.get(&record, name);

        let mut paper_iri = paper_iri(get(&mapping.paper)).map_err(err)?;
        let key = Doi::from_iri(&paper_iri).map_or_else(|| paper_iri.as_str().to_string(), |d| d.key());
        if let Some((paper, _)) = papers.get(&key) {
            paper_iri = paper.iri.clone();
        }
        let ordinal: u32 = match get(&mapping.ordinal).parse() {
            Ok(k) if k >= 1 => k,
            _ => return Err(err(format!("study ordinal {:?} must be an integer >= 1", get(&mapping.ordinal)))),
        };

        let mut study = Study::new(mint_iri(EntityKind::Study, base, ""), paper_iri.clone());
        for (column, local) in &mapping.class_flags {
            if flag(get(column)).map_err(|m| err(format!("column {column}: {m}")))? {
                study.classes.insert(vocab::llr_class(local).map_err(|e| err(e.to_string()))?);
            }
        }
        let mut place = |column: &str| -> Result<Option<Place>, IngestError> {
            let value = get(column);
            let resolved = resolve_place(value, gazetteer).map_err(err)?;
            Ok(resolved.map(|(p, hit)| {
                if !hit {
                    warnings.push(format!("row {row}: no resource for {column} {value:?}, kept as a name"));
                }
                p
            }))
        };
        study.country = place(&mapping.country)?;
        study.first_author_origin = place(&mapping.first_author_origin)?;
        study.land_of_focus = place(&mapping.land_of_focus)?;
        study.overall_size = size(get(&mapping.overall_size)).map_err(err)?;
        study.primary_object = Some(get(&mapping.primary_object).to_string()).filter(|s| !s.is_empty());
        study.theoretical_approach = Some(get(&mapping.theoretical_approach).to_string()).filter(|s| !s.is_empty());
        study.evidence_for = sentences(get(&mapping.evidence), mapping.list_separator, codec).map_err(err)?;
        study.counter_evidence_for = sentences(get(&mapping.counter_evidence), mapping.list_separator, codec).map_err(err)?;
        if study.evidence_for.is_empty() && study.counter_evidence_for.is_empty() {
            return Err(err("row has no evidence or counter-evidence sentence".into()));
        }
        let claims = sentences(get(&mapping.claims), mapping.list_separator, codec).map_err(err)?;

        let (paper, studies) = papers.entry(key.clone()).or_insert_with(|| {
            order.push(key.clone());
            let paper = ResearchPaper {
                iri: paper_iri.clone(),
                claims: BTreeSet::new(),
                studies: BTreeSet::new(),
            };
            (paper, BTreeMap::new())
        });
        paper.claims.extend(claims);
        if studies.insert(ordinal, study).is_some() {
            return Err(err(format!("duplicate study {ordinal} for {paper_iri}")));
        }
    }
    let papers = order
        .into_iter()
        .map(|key| {
            let (paper, studies) = papers.remove(&key).expect("grouped paper");
            (paper, studies.into_values().collect())
        })
        .collect();
    Ok(StudyTable { papers, warnings })
}

/// Reads `subject,relation,object[,source]` rows. Statements are sentences,
/// relations HYCL local names or IRIs; a missing source defaults to `review`.
pub fn ingest_relation_table(text: &str, codec: &AidaCodec, review: &Iri) -> Result<Vec<StatementRelation>, IngestError> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| IngestError::Table(e.to_string()))?.clone();
    let cols = Columns {
        index: headers.iter().enumerate().map(|(i, h)| (h.trim().to_string(), i)).collect(),
    };
    for required in ["subject", "relation", "object"] {
        if !cols.index.contains_key(required) {
            return Err(IngestError::Table(format!("missing required column {required:?}")));
        }
    }
    let mut out = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let row = n + 2;
        let record = record.map_err(|e| IngestError::Row { row, message: e.to_string() })?;
        let err = |message: String| IngestError::Row { row, message };
        let get = |name: &str| cols.get(&record, name);
        let statement = |name: &str| codec.sentence_iri(get(name)).map_err(|e| err(format!("{name}: {e}")));
        let relation = get("relation");
        let relation = if relation.contains(':') {
            Iri::new(relation).map_err(|e| err(e.to_string()))?
        } else {
            Iri::new(format!("{}{relation}", vocab::ns::HYCL)).map_err(|e| err(e.to_string()))?
        };
        let source = match get("source") {
            "" => review.clone(),
            s => paper_iri(s).map_err(err)?,
        };
        let rel = StatementRelation {
            subject: statement("subject")?,
            relation,
            object: statement("object")?,
            derived_from: source,
        };
        rel.validate().map_err(|e| err(e.to_string()))?;
        out.push(rel);
    }
    Ok(out)
}

/// A DOI (bare or as URL) becomes `https://doi.org/...`, any other absolute
/// IRI is taken as a minted paper identifier.
pub(crate) fn paper_iri(value: &str) -> Result<Iri, String> {
    if value.is_empty() {
        return Err("paper identifier is empty".into());
    }
    if let Ok(doi) = Doi::parse(value) {
        return Ok(doi.to_iri());
    }
    if value.starts_with("http://") || value.starts_with("https://") {
        return Iri::new(value).map_err(|e| e.to_string());
    }
    Err(format!("{value:?} is neither a DOI nor an IRI"))
}

fn flag(value: &str) -> Result<bool, String> {
    match value.to_lowercase().as_str() {
        "" | "0" | "no" | "false" | "n" => Ok(false),
        "1" | "yes" | "true" | "y" | "x" => Ok(true),
        other => Err(format!("{other:?} is not a flag value")),
    }
}

fn size(value: &str) -> Result<Option<u64>, String> {
    if UNKNOWN_SIZES.contains(&value.to_lowercase().as_str()) {
        return Ok(None);
    }
    let digits: String = value.chars().filter(|c| *c != ',' && *c != '_').collect();
    match digits.parse::<u64>() {
        Ok(n) if n > 0 => Ok(Some(n)),
        _ => Err(format!("study size {value:?} is not a positive integer")),
    }
}

/// The place and whether it resolved to a resource.
pub(crate) fn resolve_place(value: &str, gazetteer: &Gazetteer) -> Result<Option<(Place, bool)>, String> {
    if value.is_empty() {
        return Ok(None);
    }
    if value.starts_with("http://") || value.starts_with("https://") {
        return Iri::new(value).map(|i| Some((Place::Resource(i), true))).map_err(|e| e.to_string());
    }
    if let Some(local) = value.strip_prefix("dbpedia:") {
        let iri = Iri::new(format!("{}{local}", vocab::ns::DBPEDIA)).map_err(|e| e.to_string())?;
        return Ok(Some((Place::Resource(iri), true)));
    }
    Ok(Some(match gazetteer.lookup(value) {
        Some(iri) => (Place::Resource(iri.clone()), true),
        None => (Place::Name(value.to_string()), false),
    }))
}

fn sentences(cell: &str, separator: char, codec: &AidaCodec) -> Result<BTreeSet<Iri>, String> {
    cell.split(separator)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| codec.sentence_iri(s).map_err(|e| format!("{s:?}: {e}")))
        .collect()
}
