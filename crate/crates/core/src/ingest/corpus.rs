use std::collections::BTreeSet;

use super::IngestError;
use crate::model::{
    bib_to_nanopub, mint_iri, paper_to_nanopub, relation_to_nanopub, review_to_nanopub, schema_nanopubs, study_to_nanopub,
    BibMetadata, EntityKind, ModelError, ResearchPaper, ReviewArticle, StatementRelation, Study,
};
use crate::nanopub::{build_index, make_trusty, MintInfo, Nanopublication};
use crate::rdf::Iri;

#[derive(Debug, Clone)]
pub struct CorpusInput {
    pub review: Iri,
    /// Papers with their studies, as returned by the table ingester.
    pub papers: Vec<(ResearchPaper, Vec<Study>)>,
    pub metadata: Vec<BibMetadata>,
    pub relations: Vec<StatementRelation>,
}

#[derive(Debug, Clone)]
pub struct BuiltCorpus {
    /// Schema, metadata, study, paper, review and relation nanopubs, in that order.
    pub nanopubs: Vec<Nanopublication>,
    pub index: Nanopublication,
}

impl BuiltCorpus {
    /// Every nanopub including the index.
    pub fn all(&self) -> impl Iterator<Item = &Nanopublication> {
        self.nanopubs.iter().chain(std::iter::once(&self.index))
    }
}

struct Minter<'a> {
    info: &'a MintInfo,
    out: Vec<Nanopublication>,
    seen: BTreeSet<Iri>,
}

impl Minter<'_> {
    fn push(&mut self, np: Result<Nanopublication, ModelError>) -> Result<Iri, IngestError> {
        let np = make_trusty(&np?).map_err(ModelError::from)?;
        if !self.seen.insert(np.uri.clone()) {
            return Err(IngestError::Table(format!("two inputs produce the identical nanopub {}", np.uri)));
        }
        let uri = np.uri.clone();
        self.out.push(np);
        Ok(uri)
    }
}

/// Mints the whole release: all nanopubs trusty, plus an index listing them.
/// Identical inputs give identical URIs.
pub fn build_corpus(input: &CorpusInput, info: &MintInfo) -> Result<BuiltCorpus, IngestError> {
    let mut m = Minter {
        info,
        out: Vec::new(),
        seen: BTreeSet::new(),
    };
    for np in schema_nanopubs(m.info)? {
        m.push(Ok(np))?;
    }
    for meta in &input.metadata {
        m.push(bib_to_nanopub(meta, m.info))?;
    }
    let mut papers = Vec::with_capacity(input.papers.len());
    for (paper, studies) in &input.papers {
        let mut paper = paper.clone();
        for study in studies {
            let mut study = study.clone();
            study.iri = mint_iri(EntityKind::Study, &m.info.base, "");
            let uri = m.push(study_to_nanopub(&study, m.info))?;
            paper.studies.insert(mint_iri(EntityKind::Study, &uri, ""));
        }
        papers.push(paper);
    }
    for paper in &papers {
        m.push(paper_to_nanopub(paper, m.info))?;
    }
    let review = ReviewArticle {
        iri: input.review.clone(),
        reviews: papers.iter().map(|p| p.iri.clone()).chain(input.metadata.iter().map(|b| b.iri.clone())).collect(),
    };
    m.push(review_to_nanopub(&review, m.info))?;
    for rel in &input.relations {
        m.push(relation_to_nanopub(rel, m.info))?;
    }
    let elements: Vec<Iri> = m.out.iter().map(|np| np.uri.clone()).collect();
    let index = build_index(&elements, None, &info.creator, info.timestamp, &info.base).map_err(ModelError::from)?;
    Ok(BuiltCorpus { nanopubs: m.out, index })
}
