//! Living documents: review text whose fragments are bound to statements
//! or corpus metrics, rendered as of any version in one of four modes.

mod repo;
mod update;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::{NanopubKind, Place};
use crate::query::{self, Corpus, StudyField};
use crate::rdf::Iri;

pub use repo::{Receipt, RepoConfig, RepoError, Repository, ReviewInfo};
pub use update::{register_update, AuthorInput, FieldError, Policy, UpdateContext, UpdateError, UpdateOutcome, UpdatePayload, UpdateSubmission};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DocError {
    #[error("document {0}: {1}")]
    Invalid(String, String),
    #[error("unknown fragment {0}")]
    UnknownFragment(String),
    #[error("unknown view mode {0:?}")]
    UnknownMode(String),
    #[error("unknown version {0}")]
    UnknownVersion(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub heading: String,
    pub blocks: Vec<Block>,
}

/// Character offsets (not bytes) into one block, `start < end`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Anchor {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum MetricDescriptor {
    /// Number of nanopubs of one kind.
    Census { kind: NanopubKind },
    /// Whole-percent share of one relation among all relations.
    RelationShare { relation: Iri },
    /// Whole-percent share of statements resting on a study whose field
    /// equals `value` (a resource IRI or a plain name).
    StudyField { field: StudyField, value: String },
    LargeStudy { threshold: u64 },
    /// Share of evidence pairs from studies of `class`, two decimals.
    ClassShare { class: Iri },
    /// `"<p> papers, <a> authors"` supporting the statement.
    Support { statement: Iri },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Binding {
    /// Text standing for a statement; revised by revise-fragment updates.
    StatementText { statement: Iri },
    Metric { metric: MetricDescriptor },
    /// DOIs of the papers supporting a statement, `; `-separated.
    CitationList { statement: Iri },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fragment {
    pub id: String,
    pub block: String,
    pub anchor: Anchor,
    pub binding: Binding,
    pub original_value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LivingDocument {
    pub id: String,
    pub review: Iri,
    pub title: String,
    /// Who may update under the original-authors policy.
    #[serde(default)]
    pub authors: BTreeSet<Iri>,
    pub sections: Vec<Section>,
    pub fragments: Vec<Fragment>,
}

impl LivingDocument {
    pub fn block(&self, id: &str) -> Option<&Block> {
        self.sections.iter().flat_map(|s| &s.blocks).find(|b| b.id == id)
    }

    pub fn fragment(&self, id: &str) -> Option<&Fragment> {
        self.fragments.iter().find(|f| f.id == id)
    }

    /// The IRI revisions use to target a fragment: `<review>#<fragment id>`.
    pub fn fragment_iri(&self, fragment_id: &str) -> Iri {
        let escaped: String =
            percent_encoding::utf8_percent_encode(fragment_id, crate::aida::UNRESERVED_COMPLEMENT).collect();
        Iri::new(format!("{}#{escaped}", self.review.as_str().split('#').next().unwrap_or_default()))
            .expect("fragment IRI")
    }

    /// Structural checks: unique ids, anchors inside their blocks and
    /// covering exactly the original value.
    pub fn validate(&self) -> Result<(), DocError> {
        let bad = |m: String| DocError::Invalid(self.id.clone(), m);
        let mut blocks = BTreeSet::new();
        for b in self.sections.iter().flat_map(|s| &s.blocks) {
            if !blocks.insert(b.id.as_str()) {
                return Err(bad(format!("duplicate block {}", b.id)));
            }
        }
        let mut ids = BTreeSet::new();
        for f in &self.fragments {
            if !ids.insert(f.id.as_str()) {
                return Err(bad(format!("duplicate fragment {}", f.id)));
            }
            let block = self.block(&f.block).ok_or_else(|| bad(format!("fragment {} names unknown block {}", f.id, f.block)))?;
            let Anchor { start, end } = f.anchor;
            let chars: Vec<char> = block.text.chars().collect();
            if start >= end || end > chars.len() {
                return Err(bad(format!("fragment {} anchor {start}..{end} is outside its block", f.id)));
            }
            let anchored: String = chars[start..end].iter().collect();
            if anchored != f.original_value {
                return Err(bad(format!("fragment {} anchors {anchored:?}, not {:?}", f.id, f.original_value)));
            }
        }
        Ok(())
    }

    /// Checks that recomputed fragments reproduce their original values on
    /// the release corpus.
    pub fn validate_release(&self, release: &Corpus) -> Result<(), DocError> {
        for f in &self.fragments {
            if let Some(v) = recompute(&f.binding, release) {
                if v != f.original_value {
                    return Err(DocError::Invalid(
                        self.id.clone(),
                        format!("fragment {} reads {:?} but the release gives {v:?}", f.id, f.original_value),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ViewMode {
    #[serde(rename = "original")]
    Original,
    #[serde(rename = "tooltip-l")]
    TooltipL,
    #[serde(rename = "tooltip-o")]
    TooltipO,
    #[serde(rename = "latest")]
    Latest,
}

impl ViewMode {
    pub const ALL: [ViewMode; 4] = [ViewMode::Original, ViewMode::TooltipL, ViewMode::TooltipO, ViewMode::Latest];

    pub fn as_str(&self) -> &'static str {
        match self {
            ViewMode::Original => "original",
            ViewMode::TooltipL => "tooltip-l",
            ViewMode::TooltipO => "tooltip-o",
            ViewMode::Latest => "latest",
        }
    }
}

impl FromStr for ViewMode {
    type Err = DocError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ViewMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| DocError::UnknownMode(s.to_string()))
    }
}

impl fmt::Display for ViewMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedFragment {
    pub id: String,
    pub block: String,
    pub anchor: Anchor,
    pub display_value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tooltip_value: Option<String>,
    pub highlighted: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolvedView {
    pub review: String,
    pub version: Iri,
    pub mode: ViewMode,
    pub fragments: Vec<ResolvedFragment>,
}

/// Value of a recomputed binding on `c`; `None` for statement text.
fn recompute(binding: &Binding, c: &Corpus) -> Option<String> {
    match binding {
        Binding::StatementText { .. } => None,
        Binding::Metric { metric } => Some(metric_value(metric, c)),
        Binding::CitationList { statement } => Some(
            query::supporting_papers(c, statement)
                .into_iter()
                .map(|k| k.strip_prefix("doi:").map(str::to_string).unwrap_or(k))
                .collect::<Vec<_>>()
                .join("; "),
        ),
    }
}

pub fn metric_value(m: &MetricDescriptor, c: &Corpus) -> String {
    match m {
        MetricDescriptor::Census { kind } => {
            let census = query::counts_by_kind(c);
            match kind {
                NanopubKind::Index => census.indexes,
                k => census.count(*k),
            }
            .to_string()
        }
        MetricDescriptor::RelationShare { relation } => {
            let total = c.relations().count() as u64;
            query::relation_distribution(c)
                .get(relation)
                .copied()
                .unwrap_or(query::Share::new(0, total))
                .display_whole()
        }
        MetricDescriptor::StudyField { field, value } => query::pct_statements_by_study_field(c, *field, |p| match p {
            Place::Resource(i) => i.as_str() == value,
            Place::Name(n) => n.eq_ignore_ascii_case(value),
        })
        .display_whole(),
        MetricDescriptor::LargeStudy { threshold } => query::pct_statements_large_study(c, *threshold).display_whole(),
        MetricDescriptor::ClassShare { class } => query::pct_statements_by_class(c, class).display_2dp(),
        MetricDescriptor::Support { statement } => match query::statement_support(c, statement) {
            Ok(r) => format!("{} papers, {} authors", r.supporting_papers, r.distinct_authors),
            Err(_) => "0 papers, 0 authors".to_string(),
        },
    }
}

/// The latest value of a fragment on corpus `c`: recomputed for metrics and
/// citation lists; for statement text, the newest revision (pubinfo
/// timestamp, then artifact code) or the original.
pub fn latest_value(doc: &LivingDocument, f: &Fragment, c: &Corpus) -> String {
    if let Some(v) = recompute(&f.binding, c) {
        return v;
    }
    c.revisions_of(&doc.fragment_iri(&f.id))
        .last()
        .map(|(_, r)| r.value.clone())
        .unwrap_or_else(|| f.original_value.clone())
}

/// Renders every fragment. `c` is the corpus as of `version`.
pub fn resolve_view(doc: &LivingDocument, version: &Iri, c: &Corpus, mode: ViewMode) -> ResolvedView {
    let fragments = doc
        .fragments
        .iter()
        .map(|f| {
            let o = f.original_value.clone();
            let l = latest_value(doc, f, c);
            let changed = l != o;
            let (display_value, tooltip_value, highlighted) = match mode {
                ViewMode::Original => (o, None, false),
                ViewMode::TooltipL => (o, Some(l), changed),
                ViewMode::TooltipO => (l, Some(o), changed),
                ViewMode::Latest => (l, None, false),
            };
            ResolvedFragment {
                id: f.id.clone(),
                block: f.block.clone(),
                anchor: f.anchor,
                display_value,
                tooltip_value,
                highlighted,
            }
        })
        .collect();
    ResolvedView {
        review: doc.id.clone(),
        version: version.clone(),
        mode,
        fragments,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricValue {
    pub fragment: String,
    pub value: String,
}

/// Metric and citation-list fragments recomputed on `c`.
pub fn recompute_metrics(doc: &LivingDocument, c: &Corpus) -> Vec<MetricValue> {
    doc.fragments
        .iter()
        .filter_map(|f| {
            recompute(&f.binding, c).map(|value| MetricValue {
                fragment: f.id.clone(),
                value,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FragmentChange {
    pub fragment: String,
    pub from: String,
    pub to: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VersionDiff {
    pub added_nanopubs: Vec<Iri>,
    pub removed_nanopubs: Vec<Iri>,
    pub fragment_changes: Vec<FragmentChange>,
}

impl VersionDiff {
    pub fn is_empty(&self) -> bool {
        self.added_nanopubs.is_empty() && self.removed_nanopubs.is_empty() && self.fragment_changes.is_empty()
    }
}

/// Latest-value differences between two corpus snapshots.
pub fn diff_versions(doc: &LivingDocument, c1: &Corpus, c2: &Corpus) -> VersionDiff {
    let uris = |c: &Corpus| -> BTreeSet<Iri> { c.nanopubs().map(|np| np.uri.clone()).collect() };
    let (u1, u2) = (uris(c1), uris(c2));
    let fragment_changes = doc
        .fragments
        .iter()
        .filter_map(|f| {
            let (from, to) = (latest_value(doc, f, c1), latest_value(doc, f, c2));
            (from != to).then(|| FragmentChange {
                fragment: f.id.clone(),
                from,
                to,
            })
        })
        .collect();
    VersionDiff {
        added_nanopubs: u2.difference(&u1).cloned().collect(),
        removed_nanopubs: u1.difference(&u2).cloned().collect(),
        fragment_changes,
    }
}
