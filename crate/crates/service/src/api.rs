//! Routes, request/response documents and error mapping.

use std::future::Future;
use std::sync::Arc;
use std::time::Instant;

use axum::body::Bytes;
use axum::extract::{Path, Request, State};
use axum::http::StatusCode;
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use fuzzydx_core::decimal::round3;
use fuzzydx_core::{
    diagnose, AnswerSet, DiagnosisResult, EngineConfig, KnowledgeBase, Phase, Prompt, Session,
    SessionError,
};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::store::{SessionStore, UpdateError};

#[derive(Debug, Clone)]
pub struct AppState {
    pub kb: Arc<KnowledgeBase>,
    pub config: EngineConfig,
    pub store: Arc<SessionStore>,
}

impl AppState {
    pub fn new(kb: KnowledgeBase, config: EngineConfig, store: SessionStore) -> Self {
        AppState {
            kb: Arc::new(kb),
            config,
            store: Arc::new(store),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ErrorCode {
    NotFound,
    InvalidOption,
    StalePrompt,
    SessionComplete,
    BadRequest,
    NotComplete,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    #[serde(skip)]
    pub http_status: u16,
    pub code: ErrorCode,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: ErrorCode, message: impl Into<String>) -> Self {
        ApiError {
            http_status: status.as_u16(),
            code,
            message: message.into(),
        }
    }

    fn not_found(what: &str) -> Self {
        ApiError::new(
            StatusCode::NOT_FOUND,
            ErrorCode::NotFound,
            format!("{what} not found"),
        )
    }

    fn bad_request(message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, ErrorCode::BadRequest, message)
    }
}

impl From<SessionError> for ApiError {
    fn from(err: SessionError) -> Self {
        let (status, code) = match &err {
            SessionError::Complete => (StatusCode::CONFLICT, ErrorCode::SessionComplete),
            SessionError::StalePrompt(_) => (StatusCode::CONFLICT, ErrorCode::StalePrompt),
            SessionError::InvalidOption { .. } => {
                (StatusCode::UNPROCESSABLE_ENTITY, ErrorCode::InvalidOption)
            }
            SessionError::KbMismatch { .. } | SessionError::Engine(_) => {
                (StatusCode::INTERNAL_SERVER_ERROR, ErrorCode::Internal)
            }
        };
        ApiError::new(status, code, err.to_string())
    }
}

impl From<UpdateError<SessionError>> for ApiError {
    fn from(err: UpdateError<SessionError>) -> Self {
        match err {
            UpdateError::NotFound => ApiError::not_found("session"),
            UpdateError::Rejected(e) => e.into(),
            UpdateError::Store(e) => ApiError::new(
                StatusCode::INTERNAL_SERVER_ERROR,
                ErrorCode::Internal,
                e.to_string(),
            ),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status =
            StatusCode::from_u16(self.http_status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        (status, Json(self)).into_response()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaSummary {
    pub area_id: String,
    pub display_name: String,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateSessionRequest {}

/// A single option id or a list of them.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Selection {
    One(String),
    Many(Vec<String>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubmitRequest {
    prompt_id: String,
    selection: Selection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionEnvelope {
    pub session_id: String,
    pub phase: Phase,
    pub area_id: Option<String>,
    pub prompts: Vec<Prompt>,
    pub answers: AnswerSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub results_url: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultEntry {
    pub disease_id: String,
    pub display_name: String,
    pub final_probability: f64,
    pub label: String,
    pub memberships: IndexMap<String, f64>,
    pub confidence: f64,
    pub rank: u32,
}

impl From<&DiagnosisResult> for ResultEntry {
    fn from(r: &DiagnosisResult) -> Self {
        ResultEntry {
            disease_id: r.disease_id.clone(),
            display_name: r.display_name.clone(),
            final_probability: round3(r.final_probability),
            label: r.label.clone(),
            memberships: r
                .memberships
                .iter()
                .map(|(l, m)| (l.clone(), round3(*m)))
                .collect(),
            confidence: round3(r.confidence),
            rank: r.rank,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsDocument {
    pub session_id: String,
    pub kb_id: String,
    pub area_id: String,
    pub results: Vec<ResultEntry>,
}

fn envelope(state: &AppState, session: &Session) -> Result<SessionEnvelope, ApiError> {
    let complete = session.is_complete();
    Ok(SessionEnvelope {
        session_id: session.session_id.clone(),
        phase: session.phase,
        area_id: session.area_id.clone(),
        prompts: if complete {
            Vec::new()
        } else {
            session.pending_prompts(&state.kb)?
        },
        answers: session.answers.clone(),
        results_url: complete.then(|| format!("/api/v1/sessions/{}/results", session.session_id)),
    })
}

async fn list_areas(State(state): State<AppState>) -> Json<Vec<AreaSummary>> {
    Json(
        state
            .kb
            .areas()
            .map(|a| AreaSummary {
                area_id: a.area_id.clone(),
                display_name: a.display_name.clone(),
            })
            .collect(),
    )
}

async fn create_session(
    State(state): State<AppState>,
    body: Bytes,
) -> Result<(StatusCode, Json<SessionEnvelope>), ApiError> {
    if !body.iter().all(u8::is_ascii_whitespace) {
        serde_json::from_slice::<CreateSessionRequest>(&body)
            .map_err(|e| ApiError::bad_request(format!("malformed body: {e}")))?;
    }
    let session = state.store.insert(Session::start(&state.kb)).map_err(|e| {
        ApiError::new(
            StatusCode::INTERNAL_SERVER_ERROR,
            ErrorCode::Internal,
            e.to_string(),
        )
    })?;
    Ok((StatusCode::CREATED, Json(envelope(&state, &session)?)))
}

async fn get_session(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<SessionEnvelope>, ApiError> {
    let session = state
        .store
        .get(&id)
        .ok_or_else(|| ApiError::not_found("session"))?;
    Ok(Json(envelope(&state, &session)?))
}

async fn submit_answer(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<SessionEnvelope>, ApiError> {
    let request: SubmitRequest = serde_json::from_slice(&body)
        .map_err(|e| ApiError::bad_request(format!("malformed body: {e}")))?;
    let selection = match request.selection {
        Selection::One(choice) => vec![choice],
        Selection::Many(choices) => choices,
    };
    let updated = state.store.update(&id, |session| {
        session.submit(&state.kb, &state.config, &request.prompt_id, &selection)
    })?;
    Ok(Json(envelope(&state, &updated)?))
}

async fn get_results(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<ResultsDocument>, ApiError> {
    let session = state
        .store
        .get(&id)
        .ok_or_else(|| ApiError::not_found("session"))?;
    if !session.is_complete() {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            ErrorCode::NotComplete,
            format!(
                "session is in {}, results are not available yet",
                session.phase.as_str()
            ),
        ));
    }
    let area_id = session.area_id.clone().unwrap_or_default();
    // recomputed from the stored answers; cached results are not trusted
    let results = diagnose(&state.kb, &area_id, &session.answers, &state.config)
        .map_err(|e| ApiError::from(SessionError::from(e)))?;
    Ok(Json(ResultsDocument {
        session_id: session.session_id.clone(),
        kb_id: session.kb_id.clone(),
        area_id,
        results: results.iter().map(ResultEntry::from).collect(),
    }))
}

async fn fallback() -> ApiError {
    ApiError::not_found("route")
}

async fn log_request(request: Request, next: Next) -> Response {
    let method = request.method().clone();
    let path = request.uri().path().to_string();
    let started = Instant::now();
    let response = next.run(request).await;
    tracing::info!(
        "{method} {path} -> {} ({} us)",
        response.status().as_u16(),
        started.elapsed().as_micros()
    );
    response
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/v1/areas", get(list_areas))
        .route("/api/v1/sessions", post(create_session))
        .route("/api/v1/sessions/{id}", get(get_session))
        .route("/api/v1/sessions/{id}/answers", post(submit_answer))
        .route("/api/v1/sessions/{id}/results", get(get_results))
        .fallback(fallback)
        .layer(middleware::from_fn(log_request))
        .with_state(state)
}

/// Serves until `shutdown` resolves, then flushes the journal.
pub async fn serve(
    listener: tokio::net::TcpListener,
    state: AppState,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    let store = state.store.clone();
    axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await?;
    store.flush().map_err(std::io::Error::other)
}
