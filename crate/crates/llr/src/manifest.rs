use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::Context;
use chrono::{DateTime, Utc};
use llr_core::ingest::{
    build_corpus, fetch_doi_metadata, ingest_relation_table, ingest_study_table, BuiltCorpus, ColumnMapping, CorpusInput,
    Gazetteer, MetadataSource,
};
use llr_core::living::LivingDocument;
use llr_core::model::Doi;
use llr_core::nanopub::MintInfo;
use llr_core::rdf::Iri;
use serde::{Deserialize, Serialize};

use crate::config::Config;

/// What `llr ingest` and `llr build` read. Paths are relative to the
/// manifest file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    /// DOI or IRI of the review article.
    pub review: String,
    pub studies: PathBuf,
    #[serde(default)]
    pub relations: Option<PathBuf>,
    /// Directory of DOI fixtures; the configured resolver is queried when absent.
    #[serde(default)]
    pub metadata: Option<PathBuf>,
    pub document: PathBuf,
    pub creator: Iri,
    pub timestamp: DateTime<Utc>,
    #[serde(default)]
    pub columns: ColumnMapping,
    /// `name<TAB>iri` country table replacing the bundled one.
    #[serde(default)]
    pub gazetteer: Option<PathBuf>,
}

impl Manifest {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut m: Manifest = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let dir = path.parent().unwrap_or(Path::new("."));
        m.studies = dir.join(&m.studies);
        m.document = dir.join(&m.document);
        m.relations = m.relations.map(|p| dir.join(p));
        m.metadata = m.metadata.map(|p| dir.join(p));
        m.gazetteer = m.gazetteer.map(|p| dir.join(p));
        Ok(m)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IngestSummary {
    pub papers: usize,
    pub studies: usize,
    pub metadata: usize,
    pub relations: usize,
    pub warnings: Vec<String>,
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Reads the tables and resolves metadata for every DOI-identified paper.
pub fn ingest(m: &Manifest, cfg: &Config) -> anyhow::Result<(CorpusInput, IngestSummary)> {
    let codec = cfg.codec()?;
    let base = Iri::new(cfg.base.as_str())?;
    let gazetteer = match &m.gazetteer {
        Some(p) => Gazetteer::from_tsv(&read(p)?)?,
        None => Gazetteer::bundled(),
    };
    let table = ingest_study_table(&read(&m.studies)?, &m.columns, &gazetteer, &codec, &base)
        .with_context(|| format!("ingesting {}", m.studies.display()))?;
    let review = match Doi::parse(&m.review) {
        Ok(doi) => doi.to_iri(),
        Err(_) => Iri::new(m.review.as_str())?,
    };
    let relations = match &m.relations {
        Some(p) => ingest_relation_table(&read(p)?, &codec, &review).with_context(|| format!("ingesting {}", p.display()))?,
        None => Vec::new(),
    };
    let source = match &m.metadata {
        Some(dir) => MetadataSource::Fixtures(dir.clone()),
        None => MetadataSource::Live {
            endpoint: cfg.resolver.clone(),
            timeout: Duration::from_secs(20),
        },
    };
    let mut metadata = Vec::new();
    for (paper, _) in &table.papers {
        if let Some(doi) = Doi::from_iri(&paper.iri) {
            metadata.push(fetch_doi_metadata(doi.as_str(), &source)?);
        }
    }
    let summary = IngestSummary {
        papers: table.papers.len(),
        studies: table.study_count(),
        metadata: metadata.len(),
        relations: relations.len(),
        warnings: table.warnings,
    };
    let input = CorpusInput {
        review,
        papers: table.papers,
        metadata,
        relations,
    };
    Ok((input, summary))
}

/// The release nanopubs and the document, ready to publish.
pub fn build(m: &Manifest, cfg: &Config) -> anyhow::Result<(LivingDocument, BuiltCorpus)> {
    let (input, _) = ingest(m, cfg)?;
    let info = MintInfo {
        base: Iri::new(cfg.base.as_str())?,
        creator: m.creator.clone(),
        timestamp: m.timestamp,
    };
    let built = build_corpus(&input, &info)?;
    let doc: LivingDocument =
        serde_json::from_str(&read(&m.document)?).with_context(|| format!("parsing {}", m.document.display()))?;
    if doc.review != input.review {
        anyhow::bail!("document is about {} but the manifest builds {}", doc.review, input.review);
    }
    Ok((doc, built))
}
