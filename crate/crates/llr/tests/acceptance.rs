//! One line per acceptance criterion. Runs without the libtest harness so
//! each criterion reports PASS or FAIL with its runtime, and the process
//! exits non-zero when any of them fails. `LLR_BLESS=1` rewrites the
//! end-to-end golden JSON.

use std::io::{BufRead, BufReader};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Stdio};
use std::time::{Duration, Instant};

use chrono::{TimeZone, Utc};
use llr_core::ingest::{build_corpus, replica};
use llr_core::living::{
    latest_value, LivingDocument, Policy, RepoConfig, Repository, ResolvedView, UpdatePayload, UpdateSubmission, ViewMode,
};
use llr_core::model::{self, NanopubKind, Place};
use llr_core::nanopub::{make_trusty, verify_trusty, MintInfo, Nanopublication};
use llr_core::query::*;
use llr_core::rdf::{parse_trig, serialize_trig, Dataset, Iri, Literal, Quad, Term};
use llr_core::testkit::{self, oracle};
use llr_core::vocab;
use rand::seq::SliceRandom;
use serde_json::{json, Value};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixtures() -> PathBuf {
    root().join("fixtures")
}

fn trig_round_trip() -> Outcome {
    for seed in 0..1000u64 {
        let d = testkit::dataset(&mut testkit::rng(seed));
        let text = serialize_trig(&d);
        let back = parse_trig(&text).map_err(|e| format!("seed {seed}: {e}"))?;
        check(back == d, || format!("seed {seed}: parse(serialize(d)) != d"))?;
        let mut quads: Vec<Quad> = d.iter().cloned().collect();
        quads.shuffle(&mut testkit::rng(seed ^ 0x5eed));
        let mut shuffled = Dataset::with_prefixes(d.prefixes.clone());
        shuffled.extend(quads);
        check(serialize_trig(&shuffled) == text, || format!("seed {seed}: shuffled serialization differs"))?;
    }
    Ok("1000 datasets".into())
}

fn mutated(q: &Quad) -> Quad {
    let object = match &q.object {
        Term::Literal(l) => Term::Literal(match l.language() {
            Some(tag) => Literal::lang(format!("{}x", l.lexical()), tag).unwrap(),
            None => Literal::typed(format!("{}x", l.lexical()), l.datatype().clone()),
        }),
        Term::Iri(i) => Term::Iri(Iri::new(format!("{}x", i.as_str())).unwrap()),
        Term::Blank(_) => Term::Literal(Literal::string("was a blank node")),
    };
    Quad { object, ..q.clone() }
}

fn with_quads(np: &Nanopublication, quads: impl IntoIterator<Item = Quad>) -> Nanopublication {
    let mut out = np.clone();
    out.data = Dataset::with_prefixes(np.data.prefixes.clone());
    out.data.extend(quads);
    out
}

/// The committed oracle output, recomputed by the script when python3 with
/// rdflib is available.
fn oracle_code(trig: &Path) -> (String, &'static str) {
    let run = Command::new("python3")
        .arg(fixtures().join("oracle/trusty_code.py"))
        .arg(trig)
        .output();
    match run {
        Ok(out) if out.status.success() => (String::from_utf8_lossy(&out.stdout).trim().to_string(), "oracle script"),
        _ => (
            std::fs::read_to_string(fixtures().join("relation-001.code")).unwrap().trim().to_string(),
            "committed oracle output",
        ),
    }
}

fn trusty() -> Outcome {
    let mut mutations = 0;
    for seed in 0..200u64 {
        let np = make_trusty(&testkit::nanopub(&mut testkit::rng(seed))).map_err(|e| e.to_string())?;
        check(verify_trusty(&np), || format!("seed {seed}: fresh nanopub does not verify"))?;
        let quads: Vec<Quad> = np.data.iter().cloned().collect();
        for (i, q) in quads.iter().enumerate() {
            let dropped = with_quads(&np, quads.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| q.clone()));
            let changed = with_quads(&np, quads.iter().enumerate().map(|(j, q)| if j == i { mutated(q) } else { q.clone() }));
            check(!verify_trusty(&dropped) && !verify_trusty(&changed), || format!("seed {seed}: mutating {q:?} kept the code"))?;
            mutations += 2;
        }
    }
    let path = fixtures().join("relation-001.trig");
    let np = Nanopublication::parse_trig(&std::fs::read_to_string(&path).unwrap()).map_err(|e| e.to_string())?;
    check(verify_trusty(&np), || "relation-001 does not verify".into())?;
    let (want, source) = oracle_code(&path);
    let got = np.artifact_code().map(|c| c.as_str().to_string()).unwrap_or_default();
    check(got == want, || format!("relation-001 code {got}, {source} says {want}"))?;
    Ok(format!("200 nanopubs, {mutations} mutations, golden code matches {source}"))
}

fn info_of(np: &Nanopublication) -> MintInfo {
    MintInfo {
        base: np.uri.clone(),
        creator: np.creators()[0].clone(),
        timestamp: np.created().unwrap(),
    }
}

fn listing_fidelity() -> Outcome {
    let dir = fixtures().join("listings");
    let parsed = |name: &str| -> Result<(String, Nanopublication), String> {
        let text = std::fs::read_to_string(dir.join(name)).map_err(|e| format!("{name}: {e}"))?;
        let np = Nanopublication::parse_trig(&text).map_err(|e| format!("{name}: {e}"))?;
        Ok((text, np))
    };
    let same = |name: &str, text: &str, rebuilt: Nanopublication| {
        check(rebuilt.to_trig() == text, || format!("{name}: rebuilt TriG differs from the golden file"))
    };
    let (text, np) = parsed("review.trig")?;
    let r = model::review_from_nanopub(&np).map_err(|e| e.to_string())?;
    same("review", &text, model::review_to_nanopub(&r, &info_of(&np)).unwrap())?;
    let (text, np) = parsed("paper.trig")?;
    let p = model::paper_from_nanopub(&np).map_err(|e| e.to_string())?;
    same("paper", &text, model::paper_to_nanopub(&p, &info_of(&np)).unwrap())?;
    let (text, np) = parsed("study.trig")?;
    let s = model::study_from_nanopub(&np).map_err(|e| e.to_string())?;
    same("study", &text, model::study_to_nanopub(&s, &info_of(&np)).unwrap())?;
    check(s.overall_size == Some(417), || "study size".into())?;
    let (text, np) = parsed("relation.trig")?;
    let rel = model::relation_from_nanopub(&np).map_err(|e| e.to_string())?;
    same("relation", &text, model::relation_to_nanopub(&rel, &info_of(&np)).unwrap())?;
    check(&rel.relation == vocab::hycl_has_related_meaning(), || "relation predicate".into())?;
    Ok("review, paper, study, relation".into())
}

fn replica_corpus() -> Corpus {
    let built = build_corpus(&replica::input(), &replica::mint_info()).unwrap();
    Corpus::load(built.all().cloned()).unwrap()
}

fn census() -> Outcome {
    let c = replica_corpus();
    let census = counts_by_kind(&c);
    let want = [
        (NanopubKind::Review, 1),
        (NanopubKind::DoiMetadata, 118),
        (NanopubKind::Paper, 118),
        (NanopubKind::Study, 163),
        (NanopubKind::Relation, 31),
        (NanopubKind::Schema, 19),
    ];
    for (kind, n) in want {
        check(census.count(kind) == n, || format!("{kind:?}: {} != {n}", census.count(kind)))?;
    }
    check(census.total == 450, || format!("total {}", census.total))?;
    Ok(format!("total {}", census.total))
}

fn relation_split() -> Outcome {
    let c = replica_corpus();
    let mut shares: Vec<Share> = relation_distribution(&c).into_values().collect();
    shares.sort_by_key(|s| std::cmp::Reverse(s.numerator));
    let got: Vec<(u64, u64)> = shares.iter().map(|s| (s.numerator, s.denominator)).collect();
    check(got == [(26, 31), (3, 31), (2, 31)], || format!("{got:?}"))?;
    let whole: Vec<u64> = shares.iter().map(Share::whole_percent).collect();
    check(whole == [84, 10, 6], || format!("displayed {whole:?}"))?;
    for (s, exact) in shares.iter().zip([83.87, 9.68, 6.45]) {
        check((s.percent() - exact).abs() <= 0.01, || format!("{} vs {exact}", s.percent()))?;
    }
    Ok("84/10/6, exact 83.87/9.68/6.45".into())
}

fn mini_manifest() -> PathBuf {
    fixtures().join("mini/corpus.toml")
}

fn mini_repo(dir: &Path) -> Repository {
    let cfg = llr::config::Config {
        data: dir.to_path_buf(),
        policy: "open".into(),
        ..Default::default()
    };
    let (doc, built) = llr::manifest::build(&llr::manifest::Manifest::load(&mini_manifest()).unwrap(), &cfg).unwrap();
    let repo = Repository::open(dir, RepoConfig { policy: Policy::Open, ..RepoConfig::default() }).unwrap();
    repo.publish_release(&doc, &built.nanopubs, &built.index).unwrap();
    repo
}

fn survey() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let repo = mini_repo(dir.path());
    let (_, c) = repo.corpus_at("mini", None).unwrap();
    let s = pct_statements_by_class(&c, vocab::llr_survey());
    check((s.numerator, s.denominator) == (4, 9), || format!("mini {}/{}", s.numerator, s.denominator))?;
    check((s.percent() - 44.44).abs() <= 0.01, || format!("mini {}", s.percent()))?;
    let r = pct_statements_by_class(&replica_corpus(), vocab::llr_survey());
    check((r.percent() - 44.44).abs() <= 0.01, || format!("replica {}", r.percent()))?;
    for seed in 0..50 {
        let nps = testkit::corpus(&mut testkit::rng(1000 + seed), 50);
        let c = Corpus::load(nps.clone()).unwrap();
        let got = pct_statements_by_class(&c, vocab::llr_survey());
        let want = oracle::class_share(&nps, vocab::llr_survey());
        check((got.numerator, got.denominator) == want, || format!("seed {seed}: {got:?} vs {want:?}"))?;
    }
    Ok(format!("{} on the mini fixture, oracle agrees on 50 corpora", s.display_2dp()))
}

fn query_oracle() -> Outcome {
    const US: &str = "http://dbpedia.org/resource/United_States";
    let mut statements = 0;
    for seed in 0..50 {
        let nps = testkit::corpus(&mut testkit::rng(1000 + seed), 50);
        check(nps.len() <= 50, || "corpus too large".into())?;
        let c = Corpus::load(nps.clone()).unwrap();
        for (field, predicate) in [
            (StudyField::LandOfFocus, vocab::llr_land_of_focus()),
            (StudyField::FirstAuthorOrigin, vocab::llr_first_author_origin()),
            (StudyField::Country, vocab::cdop_country()),
        ] {
            let got = pct_statements_by_study_field(&c, field, |p| matches!(p, Place::Resource(i) if i.as_str() == US));
            let want = oracle::field_share(&nps, predicate, |o, lit| !lit && o == US);
            check((got.numerator, got.denominator) == want, || format!("seed {seed} {field:?}"))?;
        }
        for t in [0, 1000, 1500] {
            let got = pct_statements_large_study(&c, t);
            check((got.numerator, got.denominator) == oracle::large_share(&nps, t), || format!("seed {seed} threshold {t}"))?;
        }
        for st in list_statements(&c) {
            statements += 1;
            let got = statement_support(&c, &st).map_err(|e| e.to_string())?;
            let (papers, authors, conflicting) = oracle::support(&nps, &st).ok_or("oracle misses a statement")?;
            let got_conf: Vec<(String, usize, usize)> = got
                .conflicting
                .iter()
                .map(|k| (k.statement.as_str().to_string(), k.supporting_papers, k.distinct_authors))
                .collect();
            check(
                (got.supporting_papers, got.distinct_authors, got_conf) == (papers, authors, conflicting),
                || format!("seed {seed} {st}"),
            )?;
        }
    }
    Ok(format!("50 corpora, {statements} support reports"))
}

fn submission(minute: u32, payload: UpdatePayload) -> UpdateSubmission {
    UpdateSubmission {
        submitter: Iri::new("https://w3id.org/livingreviews/agent/mini-author").unwrap(),
        timestamp: Some(Utc.with_ymd_and_hms(2022, 1, 1, 0, minute, 0).unwrap()),
        payload,
    }
}

fn truth_table(doc: &LivingDocument, c: &Corpus, views: &[ResolvedView]) -> Result<usize, String> {
    let mut changed = 0;
    for f in &doc.fragments {
        let o = f.original_value.as_str();
        let l = latest_value(doc, f, c);
        let differs = l != o;
        changed += usize::from(differs);
        for view in views {
            let r = view.fragments.iter().find(|r| r.id == f.id).ok_or("missing fragment")?;
            let want = match view.mode {
                ViewMode::Original => (o, None, false),
                ViewMode::TooltipL => (o, Some(l.as_str()), differs),
                ViewMode::TooltipO => (l.as_str(), Some(o), differs),
                ViewMode::Latest => (l.as_str(), None, false),
            };
            let got = (r.display_value.as_str(), r.tooltip_value.as_deref(), r.highlighted);
            check(got == want, || format!("{} {}: {got:?} vs {want:?}", view.mode, f.id))?;
        }
    }
    Ok(changed)
}

fn mode_algebra() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let repo = mini_repo(dir.path());
    let doc = repo.document("mini").unwrap();
    let release = repo.info("mini").unwrap().head;
    let views = |v: &str| -> Vec<ResolvedView> { ViewMode::ALL.iter().map(|m| repo.view("mini", Some(v), *m).unwrap()).collect() };
    let before: Vec<String> = views(release.as_str()).iter().map(|v| serde_json::to_string(v).unwrap()).collect();
    let latest = repo.view("mini", Some(release.as_str()), ViewMode::Latest).unwrap();
    for (f, r) in doc.fragments.iter().zip(&latest.fragments) {
        check(r.display_value == f.original_value, || format!("release Latest differs from Original at {}", f.id))?;
    }
    let payloads = [
        UpdatePayload::NewRelation {
            subject: "Algorithmic curation narrows news exposure.".into(),
            relation: "hasRelatedMeaning".into(),
            object: "Young adults rely on social media for political news.".into(),
            source: None,
        },
        UpdatePayload::NewStudy {
            paper: "10.5555/llr.mini.2".into(),
            classes: vec!["Survey".into()],
            country: Some("Germany".into()),
            overall_size: Some(800),
            first_author_origin: None,
            land_of_focus: Some("Germany".into()),
            primary_object: None,
            theoretical_approach: None,
            evidence: vec!["Survey respondents trust friends over outlets.".into()],
            counter_evidence: Vec::new(),
        },
        UpdatePayload::ReviseFragment {
            fragment: "f-incidental".into(),
            value: "Most social media users encounter news incidentally.".into(),
        },
    ];
    for (k, p) in payloads.into_iter().enumerate() {
        repo.submit("mini", &submission(k as u32 + 1, p), None).map_err(|e| e.to_string())?;
    }
    let info = repo.info("mini").unwrap();
    check(info.versions.len() == 4, || format!("{} versions", info.versions.len()))?;
    let after: Vec<String> = views(release.as_str()).iter().map(|v| serde_json::to_string(v).unwrap()).collect();
    check(after == before, || "release views changed after updates".into())?;
    let (_, head) = repo.corpus_at("mini", None).unwrap();
    let changed = truth_table(&doc, &head, &views(info.head.as_str()))?;
    check(doc.fragments.len() >= 3 && changed >= 1, || format!("{changed} fragments changed"))?;
    Ok(format!("{} fragments x 4 modes, {changed} updated, release views byte-identical after 3 updates", doc.fragments.len()))
}

struct Server(Child);

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

fn llr(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_llr"));
    cmd.args(args).env_remove("LLR_CONFIG").env("RUST_LOG", "warn");
    for var in ["LLR_DATA", "LLR_POLICY", "LLR_TOKENS", "LLR_LISTEN", "LLR_BASE", "LLR_AIDA_NAMESPACE"] {
        cmd.env_remove(var);
    }
    cmd
}

fn golden_json(name: &str, actual: &Value) -> Result<(), String> {
    let path = fixtures().join("mini/golden").join(name);
    let text = format!("{}\n", serde_json::to_string_pretty(actual).unwrap());
    if std::env::var_os("LLR_BLESS").is_some() {
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, &text).unwrap();
    }
    let want = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    check(want == text, || format!("{name} differs from its golden file"))
}

fn end_to_end() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().to_str().unwrap();
    let out = llr(&["build", "--manifest", mini_manifest().to_str().unwrap(), "--data", data])
        .output()
        .map_err(|e| e.to_string())?;
    check(out.status.success(), || format!("build failed: {}", String::from_utf8_lossy(&out.stderr)))?;

    let mut child = llr(&["serve", "--data", data, "--policy", "open", "--listen", "127.0.0.1:0"])
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| e.to_string())?;
    let stdout = child.stdout.take().unwrap();
    let server = Server(child);
    let mut line = String::new();
    BufReader::new(stdout).read_line(&mut line).map_err(|e| e.to_string())?;
    let base = line.trim().strip_prefix("listening on ").ok_or_else(|| format!("unexpected banner {line:?}"))?.to_string();

    let http = reqwest::blocking::Client::builder().timeout(Duration::from_secs(5)).build().unwrap();
    let get = |path: &str| -> Result<Value, String> {
        let resp = http.get(format!("{base}{path}")).send().map_err(|e| e.to_string())?;
        check(resp.status().is_success(), || format!("GET {path}: {}", resp.status()))?;
        serde_json::from_str(&resp.text().map_err(|e| e.to_string())?).map_err(|e| e.to_string())
    };

    let mut responses = 0;
    for mode in ViewMode::ALL {
        golden_json(&format!("view-release-{mode}.json"), &get(&format!("/reviews/mini/view?mode={mode}"))?)?;
        responses += 1;
    }
    let payload = json!({
        "template": "new-relation",
        "submitter": "https://w3id.org/livingreviews/agent/mini-author",
        "timestamp": "2022-01-01T00:00:00Z",
        "subject": "Algorithmic curation narrows news exposure.",
        "relation": "hasRelatedMeaning",
        "object": "Young adults rely on social media for political news.",
        "source": "10.5555/llr.mini.2"
    });
    let resp = http
        .post(format!("{base}/reviews/mini/updates"))
        .header("content-type", "application/json")
        .body(payload.to_string())
        .send()
        .map_err(|e| e.to_string())?;
    check(resp.status().as_u16() == 201, || format!("POST update: {}", resp.status()))?;
    let receipt: Value = serde_json::from_str(&resp.text().unwrap()).map_err(|e| e.to_string())?;
    golden_json("update-receipt.json", &receipt)?;
    responses += 1;
    let version = receipt["index"].as_str().ok_or("receipt has no index")?.to_string();
    let code = version.rsplit('/').next().unwrap();
    for mode in ViewMode::ALL {
        let view = get(&format!("/reviews/mini/view?version={code}&mode={mode}"))?;
        check(view["version"] == json!(version), || "view is not of the new version".into())?;
        golden_json(&format!("view-updated-{mode}.json"), &view)?;
        responses += 1;
    }
    let latest = get(&format!("/reviews/mini/view?version={code}&mode=latest"))?;
    let related = latest["fragments"]
        .as_array()
        .and_then(|fs| fs.iter().find(|f| f["id"] == "f-related"))
        .ok_or("no f-related fragment")?;
    check(related["display_value"] == "67%", || format!("f-related shows {}", related["display_value"]))?;
    let info = get("/reviews/mini")?;
    check(info["versions"].as_array().map(Vec::len) == Some(2), || "expected two versions".into())?;
    drop(server);
    Ok(format!("{responses} responses match golden JSON"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("TriG round-trip", Duration::from_secs(10), trig_round_trip),
        ("Trusty URIs", Duration::from_secs(5), trusty),
        ("Listing fixture fidelity", Duration::from_secs(5), listing_fidelity),
        ("Census", Duration::from_secs(5), census),
        ("Relation split", Duration::from_secs(5), relation_split),
        ("Survey query", Duration::from_secs(10), survey),
        ("Query-oracle equivalence", Duration::from_secs(30), query_oracle),
        ("Mode algebra", Duration::from_secs(5), mode_algebra),
        ("End-to-end", Duration::from_secs(10), end_to_end),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let took = start.elapsed();
        let result = match result {
            Ok(detail) if took > budget => Err(format!("{detail}; over the {} s budget", budget.as_secs())),
            other => other,
        };
        match result {
            Ok(detail) => println!("PASS  {name} ({:.2} s): {detail}", took.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name} ({:.2} s): {why}", took.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
