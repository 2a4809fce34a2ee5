//! On-disk state: `nanopubs/<code>.trig` (immutable), `journal/<review>.log`
//! (append-only, one index IRI per line, oldest first) and
//! `reviews/<review>.json`.
//!
//! Readers work on an immutable snapshot that a single writer swaps after
//! every persisted update, so a view never sees a half-applied update.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use serde::Serialize;

use super::update::{register_update, UpdateContext};
use super::{diff_versions, recompute_metrics, resolve_view, DocError, LivingDocument, MetricValue, ResolvedView, VersionDiff, ViewMode};
use super::{Policy, UpdateError, UpdateSubmission};
use crate::aida::AidaCodec;
use crate::ingest::Gazetteer;
use crate::nanopub::{validate, verify_trusty, NanopubError, NanopubIndex, Nanopublication};
use crate::query::{Corpus, QueryError};
use crate::rdf::Iri;

#[derive(Debug, thiserror::Error)]
pub enum RepoError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Corrupt { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Nanopub { path: PathBuf, source: NanopubError },
    #[error(transparent)]
    Doc(#[from] DocError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Update(#[from] UpdateError),
    #[error("unknown review {0:?}")]
    UnknownReview(String),
    #[error("review {0:?} already exists")]
    Exists(String),
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> RepoError + '_ {
    move |source| RepoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone)]
pub struct RepoConfig {
    /// Placeholder base for nanopubs minted by updates.
    pub base: Iri,
    pub codec: AidaCodec,
    pub gazetteer: Gazetteer,
    pub policy: Policy,
}

impl Default for RepoConfig {
    fn default() -> Self {
        Self {
            base: Iri::from_static("https://w3id.org/np/"),
            codec: AidaCodec::default(),
            gazetteer: Gazetteer::bundled(),
            policy: Policy::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReviewInfo {
    pub id: String,
    pub title: String,
    pub review: Iri,
    pub head: Iri,
    pub versions: Vec<Iri>,
}

/// What a successful update produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Receipt {
    pub template: String,
    pub nanopubs: Vec<Iri>,
    pub index: Iri,
}

#[derive(Debug, Clone)]
struct ReviewState {
    doc: Arc<LivingDocument>,
    /// Index IRIs, oldest first, each with the corpus as of that version.
    chain: Vec<(Iri, Arc<Corpus>)>,
}

#[derive(Debug, Clone, Default)]
struct State {
    codes: BTreeMap<String, Arc<Nanopublication>>,
    reviews: BTreeMap<String, ReviewState>,
}

pub struct Repository {
    root: PathBuf,
    config: RepoConfig,
    state: RwLock<Arc<State>>,
    writer: Mutex<()>,
}

fn code_of(np: &Nanopublication) -> Result<String, RepoError> {
    np.artifact_code().map(|c| c.as_str().to_string()).ok_or_else(|| RepoError::Nanopub {
        path: PathBuf::from(np.uri.as_str()),
        source: NanopubError::NotTrusty(np.uri.clone()),
    })
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

/// Writes `text` to `path` unless an identical file is already there. The
/// content goes to a temporary file first so a crash never leaves a torn file.
fn write_once(path: &Path, text: &str) -> Result<(), RepoError> {
    if let Ok(existing) = fs::read_to_string(path) {
        if existing == text {
            return Ok(());
        }
        return Err(RepoError::Corrupt {
            path: path.to_path_buf(),
            message: "exists with different content".into(),
        });
    }
    let tmp = path.with_extension("tmp");
    let mut f = File::create(&tmp).map_err(io(&tmp))?;
    f.write_all(text.as_bytes()).map_err(io(&tmp))?;
    f.sync_all().map_err(io(&tmp))?;
    fs::rename(&tmp, path).map_err(io(path))
}

fn append_line(path: &Path, line: &str) -> Result<(), RepoError> {
    let mut f = OpenOptions::new().create(true).append(true).open(path).map_err(io(path))?;
    f.write_all(format!("{line}\n").as_bytes()).map_err(io(path))?;
    f.sync_all().map_err(io(path))
}

impl Repository {
    fn dir(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Opens (creating if needed) the data directory and loads everything in it.
    pub fn open(root: impl Into<PathBuf>, config: RepoConfig) -> Result<Self, RepoError> {
        let root = root.into();
        for d in ["nanopubs", "journal", "reviews"] {
            let p = root.join(d);
            fs::create_dir_all(&p).map_err(io(&p))?;
        }
        let repo = Self {
            root,
            config,
            state: RwLock::new(Arc::new(State::default())),
            writer: Mutex::new(()),
        };
        let state = repo.load()?;
        *repo.state.write().expect("state lock") = Arc::new(state);
        Ok(repo)
    }

    fn load(&self) -> Result<State, RepoError> {
        let mut state = State::default();
        let dir = self.dir("nanopubs");
        for entry in sorted_entries(&dir, "trig")? {
            let text = fs::read_to_string(&entry).map_err(io(&entry))?;
            let np = Nanopublication::parse_trig(&text).map_err(|source| RepoError::Nanopub {
                path: entry.clone(),
                source,
            })?;
            let corrupt = |message: String| RepoError::Corrupt {
                path: entry.clone(),
                message,
            };
            if !verify_trusty(&np) {
                return Err(corrupt(format!("{} does not verify", np.uri)));
            }
            let report = validate(&np);
            if !report.is_valid() {
                return Err(corrupt(report.violations.join("; ")));
            }
            let code = code_of(&np)?;
            if entry.file_stem().and_then(|s| s.to_str()) != Some(code.as_str()) {
                return Err(corrupt(format!("holds {code}")));
            }
            state.codes.insert(code, Arc::new(np));
        }
        let by_uri: BTreeMap<&Iri, &Arc<Nanopublication>> = state.codes.values().map(|np| (&np.uri, np)).collect();
        let mut reviews = BTreeMap::new();
        for path in sorted_entries(&self.dir("reviews"), "json")? {
            let text = fs::read_to_string(&path).map_err(io(&path))?;
            let doc: LivingDocument = serde_json::from_str(&text).map_err(|e| RepoError::Corrupt {
                path: path.clone(),
                message: e.to_string(),
            })?;
            doc.validate()?;
            let journal = self.dir("journal").join(format!("{}.log", doc.id));
            let text = fs::read_to_string(&journal).map_err(io(&journal))?;
            // a line without its newline is a torn append and is ignored
            let complete = &text[..text.rfind('\n').map_or(0, |i| i + 1)];
            let mut chain: Vec<(Iri, Arc<Corpus>)> = Vec::new();
            let mut elements_seen: BTreeSet<Iri> = BTreeSet::new();
            for line in complete.lines().filter(|l| !l.trim().is_empty()) {
                let corrupt = |message: String| RepoError::Corrupt {
                    path: journal.clone(),
                    message,
                };
                let uri = Iri::new(line.trim()).map_err(|e| corrupt(e.to_string()))?;
                let np = by_uri.get(&uri).ok_or_else(|| corrupt(format!("index {uri} is not stored")))?;
                let ix = NanopubIndex::from_nanopub(np).map_err(|e| corrupt(e.to_string()))?;
                if ix.supersedes.as_ref() != chain.last().map(|(u, _)| u) {
                    return Err(corrupt(format!("{uri} does not supersede the previous journal entry")));
                }
                let mut fresh = Vec::new();
                for e in &ix.elements {
                    let np = by_uri.get(e).ok_or_else(|| corrupt(format!("element {e} of {uri} is not stored")))?;
                    if !elements_seen.contains(e) {
                        fresh.push(Arc::clone(np));
                    }
                }
                let corpus = match chain.last() {
                    Some((_, prev)) if ix.elements.len() >= elements_seen.len() && elements_seen.iter().all(|e| ix.elements.binary_search(e).is_ok()) => {
                        prev.with(fresh.into_iter().chain(std::iter::once(Arc::clone(np))))?
                    }
                    _ => {
                        let indexes = chain.iter().map(|(u, _)| Arc::clone(by_uri[u]));
                        let elements = ix.elements.iter().map(|e| Arc::clone(by_uri[e]));
                        Corpus::load(elements.chain(indexes).chain(std::iter::once(Arc::clone(np))))?
                    }
                };
                elements_seen = ix.elements.iter().cloned().collect();
                chain.push((uri, Arc::new(corpus)));
            }
            let Some((_, release)) = chain.first() else {
                return Err(RepoError::Corrupt {
                    path: journal,
                    message: "journal is empty".into(),
                });
            };
            doc.validate_release(release)?;
            reviews.insert(doc.id.clone(), ReviewState { doc: Arc::new(doc), chain });
        }
        state.reviews = reviews;
        Ok(state)
    }

    fn snapshot(&self) -> Arc<State> {
        Arc::clone(&self.state.read().expect("state lock"))
    }

    /// Publishes a new review: its release nanopubs, the index listing them
    /// and the document.
    pub fn publish_release<'a>(
        &self,
        doc: &LivingDocument,
        nanopubs: impl IntoIterator<Item = &'a Nanopublication>,
        index: &Nanopublication,
    ) -> Result<(), RepoError> {
        let _w = self.writer.lock().expect("writer lock");
        if !valid_id(&doc.id) {
            return Err(DocError::Invalid(doc.id.clone(), "ids use letters, digits, '-' and '_'".into()).into());
        }
        if self.snapshot().reviews.contains_key(&doc.id) {
            return Err(RepoError::Exists(doc.id.clone()));
        }
        doc.validate()?;
        let nanopubs: Vec<&Nanopublication> = nanopubs.into_iter().collect();
        let release = Corpus::load(nanopubs.iter().map(|np| (*np).clone()).chain(std::iter::once(index.clone())))?;
        doc.validate_release(&release)?;
        for np in nanopubs.iter().copied().chain(std::iter::once(index)) {
            let path = self.dir("nanopubs").join(format!("{}.trig", code_of(np)?));
            write_once(&path, &np.to_trig())?;
        }
        let json = serde_json::to_string_pretty(doc).expect("document serializes");
        write_once(&self.dir("reviews").join(format!("{}.json", doc.id)), &json)?;
        let journal = self.dir("journal").join(format!("{}.log", doc.id));
        write_once(&journal, &format!("{}\n", index.uri))?;
        let state = self.load()?;
        *self.state.write().expect("state lock") = Arc::new(state);
        Ok(())
    }

    fn review(&self, state: &Arc<State>, id: &str) -> Result<ReviewState, RepoError> {
        state.reviews.get(id).cloned().ok_or_else(|| RepoError::UnknownReview(id.to_string()))
    }

    pub fn config(&self) -> &RepoConfig {
        &self.config
    }

    pub fn reviews(&self) -> Vec<ReviewInfo> {
        let state = self.snapshot();
        state.reviews.values().map(info).collect()
    }

    pub fn info(&self, id: &str) -> Result<ReviewInfo, RepoError> {
        Ok(info(&self.review(&self.snapshot(), id)?))
    }

    pub fn document(&self, id: &str) -> Result<Arc<LivingDocument>, RepoError> {
        Ok(self.review(&self.snapshot(), id)?.doc)
    }

    /// The corpus as of `version` (an index IRI or its artifact code; the
    /// newest version when `None`).
    pub fn corpus_at(&self, id: &str, version: Option<&str>) -> Result<(Iri, Arc<Corpus>), RepoError> {
        let r = self.review(&self.snapshot(), id)?;
        let found = match version {
            None => r.chain.last(),
            Some(v) => r.chain.iter().find(|(u, _)| u.as_str() == v || u.as_str().ends_with(&format!("/{v}"))),
        };
        found
            .map(|(u, c)| (u.clone(), Arc::clone(c)))
            .ok_or_else(|| DocError::UnknownVersion(version.unwrap_or_default().to_string()).into())
    }

    pub fn view(&self, id: &str, version: Option<&str>, mode: ViewMode) -> Result<ResolvedView, RepoError> {
        let doc = self.document(id)?;
        let (v, c) = self.corpus_at(id, version)?;
        Ok(resolve_view(&doc, &v, &c, mode))
    }

    pub fn metrics(&self, id: &str, version: Option<&str>) -> Result<(Iri, Vec<MetricValue>), RepoError> {
        let doc = self.document(id)?;
        let (v, c) = self.corpus_at(id, version)?;
        Ok((v, recompute_metrics(&doc, &c)))
    }

    pub fn diff(&self, id: &str, from: &str, to: &str) -> Result<VersionDiff, RepoError> {
        let doc = self.document(id)?;
        let (_, a) = self.corpus_at(id, Some(from))?;
        let (_, b) = self.corpus_at(id, Some(to))?;
        Ok(diff_versions(&doc, &a, &b))
    }

    pub fn nanopub(&self, code: &str) -> Option<Arc<Nanopublication>> {
        self.snapshot().codes.get(code).cloned()
    }

    /// Authorizes, validates and persists one update. Nanopub files are
    /// written before the journal line, so a crash in between leaves only
    /// unreferenced files behind.
    pub fn submit(&self, id: &str, submission: &UpdateSubmission, token: Option<&str>) -> Result<Receipt, RepoError> {
        let _w = self.writer.lock().expect("writer lock");
        let state = self.snapshot();
        let review = self.review(&state, id)?;
        self.config.policy.authorize(&review.doc, &submission.submitter, token)?;
        let (head, corpus) = review.chain.last().expect("chains are never empty");
        let cx = UpdateContext {
            base: &self.config.base,
            codec: &self.config.codec,
            gazetteer: &self.config.gazetteer,
        };
        let outcome = register_update(&review.doc, submission, corpus, head, &cx)?;
        let mut next = State::clone(&state);
        for np in outcome.nanopubs.iter().chain(std::iter::once(&outcome.index)) {
            let code = code_of(np)?;
            write_once(&self.dir("nanopubs").join(format!("{code}.trig")), &np.to_trig())?;
            next.codes.insert(code, Arc::new(np.clone()));
        }
        append_line(&self.dir("journal").join(format!("{id}.log")), outcome.index.uri.as_str())?;
        let entry = next.reviews.get_mut(id).expect("review present");
        entry.chain.push((outcome.index.uri.clone(), Arc::new(outcome.corpus)));
        *self.state.write().expect("state lock") = Arc::new(next);
        Ok(Receipt {
            template: submission.payload.template().to_string(),
            nanopubs: outcome.nanopubs.iter().map(|np| np.uri.clone()).collect(),
            index: outcome.index.uri,
        })
    }
}

fn info(r: &ReviewState) -> ReviewInfo {
    ReviewInfo {
        id: r.doc.id.clone(),
        title: r.doc.title.clone(),
        review: r.doc.review.clone(),
        head: r.chain.last().expect("chains are never empty").0.clone(),
        versions: r.chain.iter().map(|(u, _)| u.clone()).collect(),
    }
}

fn sorted_entries(dir: &Path, ext: &str) -> Result<Vec<PathBuf>, RepoError> {
    let mut out: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io(dir))?
        .map(|e| e.map(|e| e.path()).map_err(io(dir)))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .filter(|p| p.extension().and_then(|e| e.to_str()) == Some(ext))
        .collect();
    out.sort();
    Ok(out)
}
