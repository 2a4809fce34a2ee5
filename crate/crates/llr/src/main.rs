use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use llr_core::living::{Repository, UpdateSubmission};
use llr_core::model::Place;
use llr_core::nanopub::{validate, verify_trusty, version_chain, Nanopublication};
use llr_core::query::{self, StudyField};
use llr_core::rdf::Iri;
use llr_core::vocab;
use serde::Serialize;
use serde_json::{json, Value};

use llr::config::Config;
use llr::manifest::{self, Manifest};

#[derive(Parser)]
#[command(name = "llr", version, about = "Living literature reviews on nanopublications")]
struct Cli {
    /// TOML config file; LLR_* environment variables override it.
    #[arg(long, global = true, env = "LLR_CONFIG")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Data directory (overrides config).
    #[arg(long)]
    data: Option<PathBuf>,
    /// open, token-list or original-authors.
    #[arg(long)]
    policy: Option<String>,
    /// Accepted bearer token for the token-list policy; repeatable.
    #[arg(long = "accept-token")]
    accept_tokens: Vec<String>,
}

#[derive(Args, Clone)]
struct At {
    /// Review id; may be omitted when the data directory holds one review.
    #[arg(long)]
    review: Option<String>,
    /// Index IRI or artifact code; the newest version by default.
    #[arg(long)]
    version: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Read a manifest's tables and metadata and report what would be built.
    Ingest {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Mint the release nanopubs and publish them with the document.
    Build {
        #[arg(long)]
        manifest: PathBuf,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Check the data directory, or the given TriG files, for validity and trusty URIs.
    Verify {
        #[command(flatten)]
        data: DataArgs,
        files: Vec<PathBuf>,
    },
    /// Run one analysis on a review version.
    Query {
        #[command(subcommand)]
        query: QueryCmd,
        #[command(flatten)]
        at: At,
        #[command(flatten)]
        data: DataArgs,
    },
    /// Serve the HTTP API.
    Serve {
        #[command(flatten)]
        data: DataArgs,
        #[arg(long)]
        listen: Option<String>,
    },
    /// Submit one update from a JSON payload file.
    Update {
        /// new-paper, new-study, new-relation or revise-fragment.
        #[arg(long)]
        template: String,
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        review: Option<String>,
        /// Used when the payload names no submitter.
        #[arg(long)]
        submitter: Option<Iri>,
        /// Bearer token presented to the policy.
        #[arg(long)]
        token: Option<String>,
        #[command(flatten)]
        data: DataArgs,
    },
}

#[derive(Subcommand)]
enum QueryCmd {
    /// Nanopubs per kind.
    Census,
    /// Share of each relation type.
    Relations,
    /// Share of statements resting on a study whose field has a value.
    StudyField {
        /// land_of_focus, first_author_origin or country.
        field: String,
        /// Resource IRI, `dbpedia:` name or plain name.
        value: String,
    },
    /// Share of statements resting on a study larger than the threshold.
    LargeStudy {
        #[arg(default_value_t = 1000)]
        threshold: u64,
    },
    /// Share of evidence pairs from studies of a class (`llr` local name or IRI).
    Class { class: String },
    /// Supporting papers and authors of a statement (sentence or IRI).
    Support { statement: String },
    /// Every statement the corpus mentions.
    Statements,
    /// Metric and citation fragments recomputed on the version.
    Metrics,
    /// Index IRIs of the review, oldest first.
    Versions,
    /// Added nanopubs and changed fragments between two versions.
    Diff { from: String, to: String },
}

fn print(v: &impl Serialize) -> anyhow::Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn config_for(cli_config: Option<&Path>, data: &DataArgs) -> anyhow::Result<Config> {
    let mut cfg = Config::load(cli_config)?;
    if let Some(d) = &data.data {
        cfg.data = d.clone();
    }
    if let Some(p) = &data.policy {
        cfg.policy = p.clone();
    }
    cfg.tokens.extend(data.accept_tokens.iter().cloned());
    Ok(cfg)
}

fn open(cfg: &Config) -> anyhow::Result<Repository> {
    Repository::open(&cfg.data, cfg.repo_config()?).with_context(|| format!("opening {}", cfg.data.display()))
}

fn pick_review(repo: &Repository, review: Option<&str>) -> anyhow::Result<String> {
    if let Some(r) = review {
        return Ok(r.to_string());
    }
    match repo.reviews().as_slice() {
        [one] => Ok(one.id.clone()),
        [] => bail!("the data directory holds no review"),
        _ => bail!("several reviews; pick one with --review"),
    }
}

fn main() -> anyhow::Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let cfg_path = cli.config.as_deref();
    match cli.command {
        Command::Ingest { manifest } => {
            let cfg = Config::load(cfg_path)?;
            let (_, summary) = manifest::ingest(&Manifest::load(&manifest)?, &cfg)?;
            print(&summary)
        }
        Command::Build { manifest, data } => {
            let cfg = config_for(cfg_path, &data)?;
            let (doc, built) = manifest::build(&Manifest::load(&manifest)?, &cfg)?;
            let repo = open(&cfg)?;
            repo.publish_release(&doc, &built.nanopubs, &built.index)?;
            print(&json!({
                "review": doc.id,
                "index": built.index.uri,
                "nanopubs": built.nanopubs.len(),
            }))
        }
        Command::Verify { data, files } => {
            if !files.is_empty() {
                return verify_files(&files);
            }
            let cfg = config_for(cfg_path, &data)?;
            let repo = open(&cfg)?;
            let mut reviews = Vec::new();
            for info in repo.reviews() {
                let (_, corpus) = repo.corpus_at(&info.id, None)?;
                let indexes: Vec<_> = corpus.indexes().cloned().collect();
                let walked = version_chain(&indexes, &info.head)?;
                if walked != info.versions {
                    bail!("review {}: supersedes links disagree with the journal", info.id);
                }
                reviews.push(json!({ "review": info.id, "versions": walked.len(), "nanopubs": corpus.len() }));
            }
            print(&json!({ "ok": true, "reviews": reviews }))
        }
        Command::Query { query, at, data } => {
            let cfg = config_for(cfg_path, &data)?;
            let repo = open(&cfg)?;
            let id = pick_review(&repo, at.review.as_deref())?;
            run_query(&repo, &cfg, &id, at.version.as_deref(), query)
        }
        Command::Serve { data, listen } => {
            let mut cfg = config_for(cfg_path, &data)?;
            if let Some(l) = listen {
                cfg.listen = l;
            }
            serve(cfg)
        }
        Command::Update {
            template,
            file,
            review,
            submitter,
            token,
            data,
        } => {
            let cfg = config_for(cfg_path, &data)?;
            let text = std::fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let mut payload: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", file.display()))?;
            let obj = payload.as_object_mut().ok_or_else(|| anyhow!("payload must be a JSON object"))?;
            match obj.get("template").and_then(Value::as_str) {
                Some(t) if t != template => bail!("payload is a {t} update, not {template}"),
                _ => drop(obj.insert("template".into(), Value::String(template))),
            }
            if let Some(s) = submitter {
                obj.entry("submitter").or_insert(Value::String(s.into_string()));
            }
            let mut submission: UpdateSubmission = serde_json::from_value(payload).context("invalid payload")?;
            submission.timestamp.get_or_insert_with(chrono::Utc::now);
            let repo = open(&cfg)?;
            let id = pick_review(&repo, review.as_deref())?;
            print(&repo.submit(&id, &submission, token.as_deref())?)
        }
    }
}

fn verify_files(files: &[PathBuf]) -> anyhow::Result<()> {
    let mut failed = 0;
    for f in files {
        let text = std::fs::read_to_string(f).with_context(|| format!("reading {}", f.display()))?;
        let verdict = match Nanopublication::parse_trig(&text) {
            Ok(np) => {
                let report = validate(&np);
                if !report.is_valid() {
                    format!("invalid: {}", report.violations.join("; "))
                } else if !verify_trusty(&np) {
                    "trusty check failed".to_string()
                } else {
                    "ok".to_string()
                }
            }
            Err(e) => format!("unparseable: {e}"),
        };
        if verdict != "ok" {
            failed += 1;
        }
        println!("{}\t{verdict}", f.display());
    }
    if failed > 0 {
        bail!("{failed} of {} files failed verification", files.len());
    }
    Ok(())
}

fn place_matcher(value: &str) -> anyhow::Result<impl Fn(&Place) -> bool> {
    let resource = if let Some(local) = value.strip_prefix("dbpedia:") {
        Some(format!("{}{local}", vocab::ns::DBPEDIA))
    } else if value.contains("://") {
        Some(value.to_string())
    } else {
        llr_core::ingest::Gazetteer::bundled().lookup(value).map(|i| i.as_str().to_string())
    };
    let name = value.to_string();
    Ok(move |p: &Place| match p {
        Place::Resource(i) => resource.as_deref() == Some(i.as_str()),
        Place::Name(n) => n.eq_ignore_ascii_case(&name),
    })
}

fn run_query(repo: &Repository, cfg: &Config, id: &str, version: Option<&str>, q: QueryCmd) -> anyhow::Result<()> {
    let (v, corpus) = repo.corpus_at(id, version)?;
    let codec = cfg.codec()?;
    let statement = |s: &str| -> anyhow::Result<Iri> {
        match Iri::new(s) {
            Ok(i) if codec.is_statement_iri(&i) => Ok(i),
            _ => Ok(codec.sentence_iri(s)?),
        }
    };
    match q {
        QueryCmd::Census => print(&query::counts_by_kind(&corpus)),
        QueryCmd::Relations => print(&query::relation_distribution(&corpus)),
        QueryCmd::StudyField { field, value } => {
            let field: StudyField = field.parse()?;
            print(&query::pct_statements_by_study_field(&corpus, field, place_matcher(&value)?))
        }
        QueryCmd::LargeStudy { threshold } => print(&query::pct_statements_large_study(&corpus, threshold)),
        QueryCmd::Class { class } => {
            let iri = if class.contains("://") { Iri::new(class)? } else { vocab::llr_class(&class)? };
            print(&query::pct_statements_by_class(&corpus, &iri))
        }
        QueryCmd::Support { statement: s } => print(&query::statement_support(&corpus, &statement(&s)?)?),
        QueryCmd::Statements => print(&query::list_statements(&corpus)),
        QueryCmd::Metrics => print(&repo.metrics(id, Some(v.as_str()))?.1),
        QueryCmd::Versions => print(&repo.info(id)?.versions),
        QueryCmd::Diff { from, to } => print(&repo.diff(id, &from, &to)?),
    }
}

fn serve(cfg: Config) -> anyhow::Result<()> {
    let repo = Arc::new(open(&cfg)?);
    for r in repo.reviews() {
        tracing::info!(review = %r.id, versions = r.versions.len(), "loaded");
    }
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(&cfg.listen)
            .await
            .with_context(|| format!("binding {}", cfg.listen))?;
        let addr = listener.local_addr()?;
        tracing::info!(policy = %cfg.policy, "serving");
        // scripts wait for this line to learn the bound port
        println!("listening on http://{addr}");
        std::io::stdout().flush()?;
        axum::serve(listener, llr::server::router(repo))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}

