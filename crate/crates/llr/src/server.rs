use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use llr_core::living::{DocError, FieldError, RepoError, Repository, UpdateError, UpdateSubmission, ViewMode};
use llr_core::query::{self, QueryError};
use llr_core::rdf::Iri;
use serde::Deserialize;
use serde_json::{json, Value};

pub const TRIG_CONTENT_TYPE: &str = "application/trig";

pub fn router(repo: Arc<Repository>) -> Router {
    Router::new()
        .route("/reviews", get(list_reviews))
        .route("/reviews/{id}", get(review))
        .route("/reviews/{id}/view", get(view))
        .route("/reviews/{id}/metrics", get(metrics))
        .route("/reviews/{id}/diff", get(diff))
        .route("/reviews/{id}/statements/{statement}/support", get(support))
        .route("/reviews/{id}/updates", post(submit))
        .route("/nanopubs/{code}", get(nanopub))
        .with_state(repo)
}

pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl ToString) -> Self {
        Self {
            status,
            body: json!({ "error": message.to_string() }),
        }
    }

    fn fields(message: impl ToString, fields: &[FieldError]) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            body: json!({ "error": message.to_string(), "fields": fields }),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<RepoError> for ApiError {
    fn from(e: RepoError) -> Self {
        match &e {
            RepoError::UnknownReview(_) | RepoError::Doc(DocError::UnknownVersion(_)) => ApiError::new(StatusCode::NOT_FOUND, e),
            RepoError::Doc(DocError::UnknownMode(_)) => ApiError::new(StatusCode::BAD_REQUEST, e),
            RepoError::Update(u) => match u {
                UpdateError::Validation(fields) => ApiError::fields(u, fields),
                UpdateError::Dangling { field, .. } => ApiError::fields(
                    u,
                    &[FieldError {
                        field: field.clone(),
                        message: u.to_string(),
                    }],
                ),
                UpdateError::Forbidden(_) => ApiError::new(StatusCode::FORBIDDEN, u),
                UpdateError::Duplicate(_) => ApiError::new(StatusCode::CONFLICT, u),
                _ => ApiError::new(StatusCode::BAD_REQUEST, u),
            },
            _ => {
                tracing::error!(error = %e, "request failed");
                ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e)
            }
        }
    }
}

type ApiResult<T> = Result<T, ApiError>;

async fn list_reviews(State(repo): State<Arc<Repository>>) -> Json<Value> {
    Json(json!({ "reviews": repo.reviews() }))
}

async fn review(State(repo): State<Arc<Repository>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let info = repo.info(&id)?;
    let doc = repo.document(&id)?;
    Ok(Json(json!({
        "id": info.id,
        "title": info.title,
        "review": info.review,
        "head": info.head,
        "versions": info.versions,
        "document": *doc,
    })))
}

#[derive(Debug, Deserialize)]
struct ViewParams {
    version: Option<String>,
    mode: Option<String>,
}

async fn view(
    State(repo): State<Arc<Repository>>,
    Path(id): Path<String>,
    Query(p): Query<ViewParams>,
) -> ApiResult<Json<Value>> {
    let mode = match p.mode.as_deref() {
        None => ViewMode::Latest,
        Some(m) => m.parse::<ViewMode>().map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e))?,
    };
    let view = repo.view(&id, p.version.as_deref(), mode)?;
    Ok(Json(serde_json::to_value(view).expect("view serializes")))
}

#[derive(Debug, Deserialize)]
struct VersionParam {
    version: Option<String>,
}

async fn metrics(
    State(repo): State<Arc<Repository>>,
    Path(id): Path<String>,
    Query(p): Query<VersionParam>,
) -> ApiResult<Json<Value>> {
    let (version, metrics) = repo.metrics(&id, p.version.as_deref())?;
    Ok(Json(json!({ "version": version, "metrics": metrics })))
}

#[derive(Debug, Deserialize)]
struct DiffParams {
    from: String,
    to: String,
}

async fn diff(
    State(repo): State<Arc<Repository>>,
    Path(id): Path<String>,
    Query(p): Query<DiffParams>,
) -> ApiResult<Json<Value>> {
    Ok(Json(serde_json::to_value(repo.diff(&id, &p.from, &p.to)?).expect("diff serializes")))
}

/// The statement segment is a percent-escaped AIDA IRI or a plain sentence.
async fn support(
    State(repo): State<Arc<Repository>>,
    Path((id, statement)): Path<(String, String)>,
    Query(p): Query<VersionParam>,
) -> ApiResult<Json<Value>> {
    let (_, corpus) = repo.corpus_at(&id, p.version.as_deref())?;
    let codec = &repo.config().codec;
    let iri = match Iri::new(statement.as_str()) {
        Ok(iri) if codec.is_statement_iri(&iri) => iri,
        _ => codec.sentence_iri(&statement).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e))?,
    };
    match query::statement_support(&corpus, &iri) {
        Ok(report) => Ok(Json(serde_json::to_value(report).expect("report serializes"))),
        Err(e @ QueryError::UnknownStatement(_)) => Err(ApiError::new(StatusCode::NOT_FOUND, e)),
        Err(e) => Err(ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e)),
    }
}

fn bearer(headers: &HeaderMap) -> Option<String> {
    let value = headers.get(header::AUTHORIZATION)?.to_str().ok()?;
    value.strip_prefix("Bearer ").map(|t| t.trim().to_string())
}

async fn submit(
    State(repo): State<Arc<Repository>>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Result<Json<UpdateSubmission>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<Value>)> {
    let Json(mut submission) = body.map_err(|e| {
        ApiError::fields(
            "malformed submission",
            &[FieldError {
                field: "body".into(),
                message: e.body_text(),
            }],
        )
    })?;
    submission.timestamp.get_or_insert_with(chrono::Utc::now);
    let token = bearer(&headers);
    let receipt = tokio::task::spawn_blocking(move || repo.submit(&id, &submission, token.as_deref()))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e))??;
    Ok((StatusCode::CREATED, Json(serde_json::to_value(receipt).expect("receipt serializes"))))
}

async fn nanopub(State(repo): State<Arc<Repository>>, Path(code): Path<String>) -> ApiResult<Response> {
    let code = code.strip_suffix(".trig").unwrap_or(&code);
    let np = repo
        .nanopub(code)
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("no nanopub {code}")))?;
    Ok(([(header::CONTENT_TYPE, TRIG_CONTENT_TYPE)], np.to_trig()).into_response())
}
