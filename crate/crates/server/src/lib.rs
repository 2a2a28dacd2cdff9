//! HTTP API over a file-backed topic store.
//!
//! | Method | Path | Body / query | Returns |
//! |---|---|---|---|
//! | GET | `/topics` | | `[TopicSummary]` |
//! | PUT | `/topics/{id}` | topic input JSON | `TopicSummary` |
//! | POST | `/topics/{id}/analyze` | | `AnalyzeSummary` |
//! | GET | `/topics/{id}/overview` | `profile=<json>`, `hash=` | `OverviewPayload` |
//! | GET | `/topics/{id}/articles/{aid}/view` | `profile=<json>`, `hash=` | `ArticleViewPayload` |
//! | GET | `/profiles/random` | `seed=`, `constraints=<json>` | `ConjointProfile` |
//! | GET | `/questionnaire` | | `Questionnaire` |
//! | POST | `/responses` | `ResponseRecord` | the stored record |
//! | GET | `/responses` | `respondent_id=` | JSON lines |
//! | GET | `/export/{id}` | `hash=` | `TopicAnalysis` |
//! | POST | `/import` | `TopicAnalysis` | `AnalyzeSummary` |
//!
//! Errors are `{"error": <kind>, "message": <text>}`.

use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use biaslens_core::grouping::GroupingMethod;
use biaslens_core::ingest::TopicInput;
use biaslens_core::profiles::{
    randomize_profile, ConjointProfile, ProfileConstraints, Questionnaire, ResponseError,
    ResponseRecord, ResponseStore,
};
use biaslens_core::service::{
    analyze_topic, get_article_view, get_overview, validate_id, Engine, Explanations, ServiceError,
    TopicAnalysis, TopicStore, TopicSummary,
};
use serde::{Deserialize, Serialize};

pub struct AppState {
    pub store: TopicStore,
    pub engine: Engine,
    pub explanations: Explanations,
    pub responses: ResponseStore,
}

impl AppState {
    /// State rooted at `data_dir`, with responses in `<data_dir>/responses.jsonl`.
    pub fn open(data_dir: impl Into<std::path::PathBuf>, engine: Engine) -> Result<Self, ApiError> {
        let store = TopicStore::open(data_dir)?;
        let responses = ResponseStore::open(store.responses_path(), Questionnaire::builtin())?;
        Ok(AppState {
            store,
            engine,
            explanations: Explanations::builtin(),
            responses,
        })
    }
}

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub kind: &'static str,
    pub message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            kind: "invalid",
            message: message.into(),
        }
    }
}

#[derive(Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
    pub message: String,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            error: self.kind.to_string(),
            message: self.message,
        };
        (self.status, Json(body)).into_response()
    }
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        let (status, kind) = match &e {
            ServiceError::NotFound(_) => (StatusCode::NOT_FOUND, "not_found"),
            ServiceError::Invalid(_) => (StatusCode::BAD_REQUEST, "invalid"),
            ServiceError::NoOverview => (StatusCode::CONFLICT, "no_overview"),
            ServiceError::GroupingUnavailable(_) => (StatusCode::CONFLICT, "grouping_unavailable"),
            ServiceError::Stage { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "analysis_failed"),
            ServiceError::Io(_) | ServiceError::Config(_) => {
                (StatusCode::INTERNAL_SERVER_ERROR, "internal")
            }
        };
        ApiError {
            status,
            kind,
            message: e.to_string(),
        }
    }
}

impl From<ResponseError> for ApiError {
    fn from(e: ResponseError) -> Self {
        let (status, kind) = match &e {
            ResponseError::Duplicate { .. } => (StatusCode::CONFLICT, "duplicate"),
            ResponseError::Io(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
            _ => (StatusCode::BAD_REQUEST, "invalid"),
        };
        ApiError {
            status,
            kind,
            message: e.to_string(),
        }
    }
}

type Shared = Arc<AppState>;
type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/topics", get(list_topics))
        .route("/topics/{id}", put(put_topic))
        .route("/topics/{id}/analyze", post(analyze))
        .route("/topics/{id}/overview", get(overview))
        .route("/topics/{id}/articles/{aid}/view", get(article_view))
        .route("/profiles/random", get(random_profile))
        .route("/questionnaire", get(questionnaire))
        .route("/responses", post(post_response).get(list_responses))
        .route("/export/{id}", get(export))
        .route("/import", post(import))
        .with_state(state)
}

/// Returned by analysis and import.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeSummary {
    pub topic_id: String,
    pub engine_config_hash: String,
    pub created_at: String,
    pub flags: Vec<String>,
    pub groupings: Vec<GroupingMethod>,
    pub mfa: Option<String>,
}

impl From<&TopicAnalysis> for AnalyzeSummary {
    fn from(a: &TopicAnalysis) -> Self {
        AnalyzeSummary {
            topic_id: a.topic_id().to_string(),
            engine_config_hash: a.engine_config_hash.clone(),
            created_at: a.created_at.clone(),
            flags: a.flags.iter().cloned().collect(),
            groupings: a.groupings.keys().copied().collect(),
            mfa: a.mfa().map(|p| p.canonical_name.clone()),
        }
    }
}

/// Runs blocking store or pipeline work off the async executor.
async fn blocking<T: Send + 'static>(
    state: &Shared,
    f: impl FnOnce(&AppState) -> ApiResult<T> + Send + 'static,
) -> ApiResult<T> {
    let state = state.clone();
    tokio::task::spawn_blocking(move || f(&state))
        .await
        .map_err(|e| ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            kind: "internal",
            message: e.to_string(),
        })?
}

async fn list_topics(State(state): State<Shared>) -> ApiResult<Json<Vec<TopicSummary>>> {
    blocking(&state, |s| Ok(Json(s.store.list_topics()?))).await
}

async fn put_topic(
    State(state): State<Shared>,
    Path(id): Path<String>,
    Json(topic): Json<TopicInput>,
) -> ApiResult<(StatusCode, Json<TopicSummary>)> {
    if topic.topic_id != id {
        return Err(ApiError::bad_request(format!(
            "body is topic `{}`, path is `{id}`",
            topic.topic_id
        )));
    }
    blocking(&state, move |s| {
        s.store.save_topic(&topic)?;
        let summary = s
            .store
            .list_topics()?
            .into_iter()
            .find(|t| t.topic_id == id)
            .expect("just saved");
        Ok((StatusCode::CREATED, Json(summary)))
    })
    .await
}

async fn analyze(
    State(state): State<Shared>,
    Path(id): Path<String>,
) -> ApiResult<Json<AnalyzeSummary>> {
    blocking(&state, move |s| {
        let topic = s.store.load_topic(&id)?;
        let analysis = analyze_topic(&topic, &s.engine)?;
        s.store.save_analysis(&analysis)?;
        Ok(Json(AnalyzeSummary::from(&analysis)))
    })
    .await
}

#[derive(Deserialize)]
struct ViewQuery {
    profile: Option<String>,
    hash: Option<String>,
}

fn parse_profile(raw: Option<&str>) -> ApiResult<ConjointProfile> {
    let raw = raw.ok_or_else(|| ApiError::bad_request("missing `profile` query parameter"))?;
    serde_json::from_str(raw).map_err(|e| ApiError::bad_request(format!("profile: {e}")))
}

async fn overview(
    State(state): State<Shared>,
    Path(id): Path<String>,
    Query(q): Query<ViewQuery>,
) -> ApiResult<Response> {
    let profile = parse_profile(q.profile.as_deref())?;
    blocking(&state, move |s| {
        let analysis = s.store.load_analysis(&id, q.hash.as_deref())?;
        Ok(Json(get_overview(&analysis, &profile, &s.explanations)?).into_response())
    })
    .await
}

async fn article_view(
    State(state): State<Shared>,
    Path((id, aid)): Path<(String, String)>,
    Query(q): Query<ViewQuery>,
) -> ApiResult<Response> {
    let profile = parse_profile(q.profile.as_deref())?;
    blocking(&state, move |s| {
        let analysis = s.store.load_analysis(&id, q.hash.as_deref())?;
        Ok(Json(get_article_view(&analysis, &aid, &profile)?).into_response())
    })
    .await
}

#[derive(Deserialize)]
struct RandomQuery {
    seed: u64,
    constraints: Option<String>,
}

async fn random_profile(Query(q): Query<RandomQuery>) -> ApiResult<Json<ConjointProfile>> {
    let constraints: ProfileConstraints = match q.constraints.as_deref() {
        Some(raw) => serde_json::from_str(raw)
            .map_err(|e| ApiError::bad_request(format!("constraints: {e}")))?,
        None => ProfileConstraints::default(),
    };
    if let Some(t) = &constraints.topic_id {
        validate_id(t)?;
    }
    randomize_profile(q.seed, &constraints)
        .map(Json)
        .map_err(|e| ApiError::bad_request(e.to_string()))
}

async fn questionnaire(State(state): State<Shared>) -> Json<Questionnaire> {
    Json(state.responses.questionnaire().clone())
}

async fn post_response(
    State(state): State<Shared>,
    Json(record): Json<ResponseRecord>,
) -> ApiResult<(StatusCode, Json<ResponseRecord>)> {
    blocking(&state, move |s| {
        s.responses.log_response(&record)?;
        Ok((StatusCode::CREATED, Json(record)))
    })
    .await
}

#[derive(Deserialize)]
struct ResponsesQuery {
    respondent_id: Option<String>,
}

async fn list_responses(
    State(state): State<Shared>,
    Query(q): Query<ResponsesQuery>,
) -> ApiResult<Response> {
    blocking(&state, move |s| {
        let records = match &q.respondent_id {
            Some(r) => s.responses.by_respondent(r)?,
            None => s.responses.all()?,
        };
        let mut body = String::new();
        for r in &records {
            body.push_str(&serde_json::to_string(r).expect("records serialise"));
            body.push('\n');
        }
        Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], body).into_response())
    })
    .await
}

#[derive(Deserialize)]
struct HashQuery {
    hash: Option<String>,
}

async fn export(
    State(state): State<Shared>,
    Path(id): Path<String>,
    Query(q): Query<HashQuery>,
) -> ApiResult<Response> {
    blocking(&state, move |s| {
        let body = s.store.export_topic(&id, q.hash.as_deref())?;
        Ok(([(header::CONTENT_TYPE, "application/json")], body).into_response())
    })
    .await
}

async fn import(
    State(state): State<Shared>,
    body: String,
) -> ApiResult<(StatusCode, Json<AnalyzeSummary>)> {
    blocking(&state, move |s| {
        let analysis = s.store.import_analysis(&body)?;
        Ok((StatusCode::CREATED, Json(AnalyzeSummary::from(&analysis))))
    })
    .await
}
