//! HTTP/JSON routes over a [`SessionStore`].

use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use dpm_core::analysis::{bounded_equivalent, check_extraction, extract_subprocess, AnalysisError, Bounds, DEFAULT_MAX_STATES};
use dpm_core::dsl::{parse_model, serialize_model, serialize_trace, SourceDocument};
use dpm_core::engine::ActivityInstanceId;
use dpm_core::{Command, CompiledDocument, Document, ScopeId};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::store::{SessionStore, StoreError};
use crate::views::enabled;

pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError { status, body: json!({ "error": code, "message": message.into() }) }
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let message = e.to_string();
        match e {
            StoreError::InvalidModel { diagnostics } => ApiError {
                status: StatusCode::UNPROCESSABLE_ENTITY,
                body: json!({ "error": "invalid_model", "message": message, "diagnostics": diagnostics }),
            },
            StoreError::UnknownModel(_) => Self::new(StatusCode::NOT_FOUND, "unknown_model", message),
            StoreError::UnknownInstance(_) => Self::new(StatusCode::NOT_FOUND, "unknown_instance", message),
            StoreError::Engine(engine) => {
                let mut body = serde_json::to_value(&engine).expect("engine errors serialize");
                body["message"] = Value::String(message);
                ApiError { status: StatusCode::CONFLICT, body }
            }
            StoreError::Snapshot { .. } => Self::new(StatusCode::INTERNAL_SERVER_ERROR, "snapshot", message),
        }
    }
}

impl From<AnalysisError> for ApiError {
    fn from(e: AnalysisError) -> Self {
        let status = match e {
            AnalysisError::CrossCheckFailed { .. } => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        Self::new(status, "analysis", e.to_string())
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/models", post(add_model))
        .route("/models/{id}", get(get_model))
        .route("/instances", post(create_instance).get(list_instances))
        .route("/instances/{id}", get(get_instance))
        .route("/instances/{id}/enabled", get(get_enabled))
        .route("/instances/{id}/commands", post(post_command))
        .route("/instances/{id}/terminate", post(post_terminate))
        .route("/instances/{id}/trace", get(get_trace))
        .route("/analysis/equiv", post(equiv))
        .route("/analysis/extract", post(extract))
        .with_state(store)
}

#[derive(Deserialize)]
struct NewModel {
    text: String,
}

async fn add_model(State(store): State<Arc<SessionStore>>, Json(req): Json<NewModel>) -> ApiResult<impl IntoResponse> {
    Ok((StatusCode::CREATED, Json(store.add_model(&req.text)?)))
}

async fn get_model(State(store): State<Arc<SessionStore>>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(store.model(&id)?))
}

#[derive(Deserialize)]
struct NewInstance {
    model_id: String,
}

async fn create_instance(
    State(store): State<Arc<SessionStore>>,
    Json(req): Json<NewInstance>,
) -> ApiResult<impl IntoResponse> {
    Ok((StatusCode::CREATED, Json(store.create_instance(&req.model_id)?)))
}

async fn list_instances(State(store): State<Arc<SessionStore>>) -> Json<Value> {
    Json(json!({ "instances": store.instance_ids() }))
}

async fn get_instance(State(store): State<Arc<SessionStore>>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(store.view(&id)?))
}

async fn get_enabled(State(store): State<Arc<SessionStore>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let p = store.instance(&id)?;
    let termination = p.termination(p.root());
    Ok(Json(json!({
        "enabled": enabled(&p),
        "may_terminate": !p.is_terminated() && termination.allowed,
        "termination_blockers": if p.is_terminated() { Vec::new() } else { termination.blockers },
    })))
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum CommandKind {
    Start,
    Complete,
    Terminate,
}

/// `scope` defaults to the root scope.
#[derive(Deserialize)]
struct CommandRequest {
    kind: CommandKind,
    scope: Option<u64>,
    activity: Option<String>,
    activity_instance: Option<u64>,
}

impl CommandRequest {
    fn command(self) -> ApiResult<Command> {
        Ok(match self.kind {
            CommandKind::Start => Command::Start {
                scope: ScopeId(self.scope.unwrap_or(0)),
                activity: self.activity.ok_or_else(|| ApiError::bad_request("start needs `activity`"))?,
            },
            CommandKind::Complete => Command::Complete {
                activity_instance: ActivityInstanceId(
                    self.activity_instance.ok_or_else(|| ApiError::bad_request("complete needs `activity_instance`"))?,
                ),
            },
            CommandKind::Terminate => Command::Terminate,
        })
    }
}

async fn post_command(
    State(store): State<Arc<SessionStore>>,
    Path(id): Path<String>,
    Json(req): Json<CommandRequest>,
) -> ApiResult<impl IntoResponse> {
    let command = req.command()?;
    Ok(Json(store.apply(&id, &command)?))
}

async fn post_terminate(State(store): State<Arc<SessionStore>>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(store.apply(&id, &Command::Terminate)?))
}

async fn get_trace(State(store): State<Arc<SessionStore>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let p = store.instance(&id)?;
    Ok(Json(json!({ "events": p.log(), "text": serialize_trace(&p.trace()) })))
}

fn parse_document(text: &str) -> ApiResult<Document> {
    parse_model(&SourceDocument::inline(text)).into_result().map_err(|diagnostics| ApiError {
        status: StatusCode::UNPROCESSABLE_ENTITY,
        body: json!({
            "error": "invalid_model",
            "message": "model is not valid",
            "diagnostics": diagnostics.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        }),
    })
}

fn compile(text: &str) -> ApiResult<Arc<CompiledDocument>> {
    let doc = parse_document(text)?;
    CompiledDocument::new(doc).map(Arc::new).map_err(|e| ApiError::bad_request(e.to_string()))
}

fn default_activations() -> usize {
    2
}

fn default_max_states() -> usize {
    DEFAULT_MAX_STATES
}

#[derive(Deserialize)]
struct EquivRequest {
    first: String,
    second: String,
    max_leaf: usize,
    #[serde(default = "default_activations")]
    max_activations: usize,
    #[serde(default = "default_max_states")]
    max_states: usize,
}

async fn equiv(Json(req): Json<EquivRequest>) -> ApiResult<Json<Value>> {
    let first = compile(&req.first)?;
    let second = compile(&req.second)?;
    let bounds = Bounds::new(req.max_leaf, req.max_activations).with_max_states(req.max_states);
    let result = tokio::task::spawn_blocking(move || bounded_equivalent(&first, &second, &bounds))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))??;
    Ok(Json(serde_json::to_value(result).expect("result serializes")))
}

#[derive(Deserialize)]
struct ExtractRequest {
    model: String,
    members: Vec<String>,
    name: String,
}

/// Infeasible extractions are reported, not treated as errors.
async fn extract(Json(req): Json<ExtractRequest>) -> ApiResult<Json<Value>> {
    let doc = parse_document(&req.model)?;
    let report = check_extraction(&doc, &req.members)?;
    let model = if report.feasible { Some(serialize_model(&extract_subprocess(&doc, &req.members, &req.name)?)) } else { None };
    Ok(Json(json!({ "report": report, "model": model })))
}
