//! HTTP/JSON API over a [`Store`].

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use formation_core::analysis::DEFAULT_COLLISION_THRESHOLD;
use formation_core::assessment::{parse_correspondences, rmsd_series};
use formation_core::SCHEMA_VERSION;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analysis::{analyze, to_json_bytes, AnalysisRequest, DEFAULT_HEATMAP_CELL};
use crate::edits::{apply_edit, EditRequest};
use crate::error::{ServiceError, ServiceResult};
use crate::pipeline::{parse_select, resolve_selection, run_assessment, AssessmentInput};
use crate::store::Store;

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        json_response(self.status(), to_json_bytes(&self.to_json()))
    }
}

fn json_response(status: StatusCode, bytes: Vec<u8>) -> Response {
    (status, [(header::CONTENT_TYPE, "application/json")], bytes).into_response()
}

fn ok_json<T: Serialize>(value: &T) -> Response {
    json_response(StatusCode::OK, to_json_bytes(value))
}

fn parse_body<T: DeserializeOwned>(body: &[u8]) -> ServiceResult<T> {
    serde_json::from_slice(body).map_err(|e| ServiceError::BadRequest {
        code: "PARSE_ERROR",
        message: format!("request body: {e}"),
        location: Some(String::new()),
    })
}

type Shared = Arc<Store>;

/// Runs blocking store work off the async executor.
async fn blocking<T, F>(store: &Shared, f: F) -> ServiceResult<T>
where
    T: Send + 'static,
    F: FnOnce(&Store) -> ServiceResult<T> + Send + 'static,
{
    let store = store.clone();
    tokio::task::spawn_blocking(move || f(&store))
        .await
        .map_err(|e| ServiceError::Storage(e.to_string()))?
}

pub fn router(store: Store) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/choreographies", get(list_choreographies))
        .route("/choreographies/{id}", get(get_choreography).put(put_choreography))
        .route("/choreographies/{id}/edits", post(edit_choreography))
        .route("/choreographies/{id}/analysis/{kind}", get(analysis))
        .route("/choreographies/{id}/assessments", post(create_assessment))
        .route("/assessments/{id}", get(get_assessment))
        .route("/assessments/{id}/timeline", get(timeline))
        .route("/assessments/{id}/frames/{frame}", get(frame))
        .fallback(|| async {
            ServiceError::NotFound {
                kind: "route",
                id: String::new(),
            }
        })
        .with_state(Arc::new(store))
}

async fn health() -> Response {
    ok_json(&json!({ "schema_version": SCHEMA_VERSION, "status": "ok" }))
}

async fn list_choreographies(State(store): State<Shared>) -> ServiceResult<Response> {
    let list = blocking(&store, |s| s.list_choreographies()).await?;
    Ok(ok_json(&json!({ "schema_version": SCHEMA_VERSION, "choreographies": list })))
}

async fn get_choreography(State(store): State<Shared>, Path(id): Path<String>) -> ServiceResult<Response> {
    let bytes = blocking(&store, move |s| s.get_choreography_bytes(&id)).await?;
    Ok(json_response(StatusCode::OK, bytes))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PutBody {
    base_revision: u64,
    document: Value,
}

async fn put_choreography(
    State(store): State<Shared>,
    Path(id): Path<String>,
    body: Bytes,
) -> ServiceResult<Response> {
    let body: PutBody = parse_body(&body)?;
    let stored = blocking(&store, {
        let id = id.clone();
        move |s| s.put_choreography(&id, body.base_revision, body.document)
    })
    .await?;
    Ok(ok_json(&json!({
        "schema_version": SCHEMA_VERSION,
        "id": id,
        "revision": stored.revision,
    })))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EditBody {
    base_revision: u64,
    edit: EditRequest,
}

async fn edit_choreography(
    State(store): State<Shared>,
    Path(id): Path<String>,
    body: Bytes,
) -> ServiceResult<Response> {
    let body: EditBody = parse_body(&body)?;
    let (document, result) = blocking(&store, {
        let id = id.clone();
        move |s| s.edit_choreography(&id, body.base_revision, |c| apply_edit(c, body.edit))
    })
    .await?;
    Ok(ok_json(&json!({
        "schema_version": SCHEMA_VERSION,
        "id": id,
        "revision": document.revision,
        "result": result,
        "document": document,
    })))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalysisQuery {
    threshold: Option<f64>,
    cell: Option<f64>,
}

/// Query parameters mirror the CLI flags: `?threshold=` for `--collisions`,
/// `?cell=` for `--heatmap`.
pub fn analysis_request(kind: &str, threshold: Option<f64>, cell: Option<f64>) -> ServiceResult<AnalysisRequest> {
    let mut request = AnalysisRequest::default();
    match kind {
        "distances" => request.distances = true,
        "collisions" => request.collisions = Some(threshold.unwrap_or(DEFAULT_COLLISION_THRESHOLD)),
        "heatmap" => request.heatmap = Some(cell.unwrap_or(DEFAULT_HEATMAP_CELL)),
        other => {
            return Err(ServiceError::NotFound {
                kind: "analysis",
                id: other.to_owned(),
            })
        }
    }
    Ok(request)
}

async fn analysis(
    State(store): State<Shared>,
    Path((id, kind)): Path<(String, String)>,
    query: Result<Query<AnalysisQuery>, axum::extract::rejection::QueryRejection>,
) -> ServiceResult<Response> {
    let Query(query) = query.map_err(|e| ServiceError::bad_request("INVALID_QUERY", e.body_text()))?;
    let request = analysis_request(&kind, query.threshold, query.cell)?;
    let c = blocking(&store, move |s| s.get_choreography(&id)).await?;
    let document = analyze(&c, &request)?;
    Ok(ok_json(&document))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AssessmentBody {
    /// Track file contents (XML).
    tracks: String,
    /// Correspondence array, inline or as the file's text.
    correspondences: Value,
    #[serde(default = "one")]
    stride: u32,
    #[serde(default)]
    select: Option<Selection>,
}

fn one() -> u32 {
    1
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Selection {
    List(Vec<String>),
    Joined(String),
}

async fn create_assessment(
    State(store): State<Shared>,
    Path(id): Path<String>,
    body: Bytes,
) -> ServiceResult<Response> {
    let body: AssessmentBody = parse_body(&body)?;
    let record = blocking(&store, move |s| {
        let c = s.get_choreography(&id)?;
        let corr_bytes = match &body.correspondences {
            Value::String(text) => text.clone().into_bytes(),
            other => serde_json::to_vec(other).expect("JSON values serialize"),
        };
        let correspondences = parse_correspondences(&corr_bytes)?;
        let select = body.select.map(|s| match s {
            Selection::List(list) => list,
            Selection::Joined(raw) => parse_select(&raw),
        });
        let report = run_assessment(
            &c,
            &AssessmentInput {
                tracks_xml: &body.tracks,
                correspondences: &correspondences,
                stride: body.stride,
                select: select.as_deref(),
            },
        )?;
        s.create_assessment(&id, report)
    })
    .await?;
    Ok(json_response(
        StatusCode::CREATED,
        to_json_bytes(&json!({
            "schema_version": SCHEMA_VERSION,
            "id": record.id,
            "choreography_id": record.choreography_id,
            "status": record.status,
        })),
    ))
}

async fn get_assessment(State(store): State<Shared>, Path(id): Path<String>) -> ServiceResult<Response> {
    let record = blocking(&store, move |s| s.get_assessment(&id)).await?;
    Ok(ok_json(&record))
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TimelineQuery {
    select: Option<String>,
}

async fn timeline(
    State(store): State<Shared>,
    Path(id): Path<String>,
    query: Result<Query<TimelineQuery>, axum::extract::rejection::QueryRejection>,
) -> ServiceResult<Response> {
    let Query(query) = query.map_err(|e| ServiceError::bad_request("INVALID_QUERY", e.body_text()))?;
    let (record, selection) = blocking(&store, move |s| {
        let record = s.get_assessment(&id)?;
        let selection = match query.select {
            Some(raw) => {
                let c = s.get_choreography(&record.choreography_id)?;
                resolve_selection(&c, &parse_select(&raw))?
            }
            None => record.report.metadata.selection.iter().cloned().collect(),
        };
        Ok((record, selection))
    })
    .await?;
    let points = rmsd_series(&record.report.samples, &selection);
    Ok(ok_json(&json!({
        "schema_version": SCHEMA_VERSION,
        "assessment_id": record.id,
        "selection": selection,
        "points": points,
        "markers": record.report.markers,
    })))
}

async fn frame(
    State(store): State<Shared>,
    path: Result<Path<(String, i64)>, axum::extract::rejection::PathRejection>,
) -> ServiceResult<Response> {
    let Path((id, frame)) = path.map_err(|e| ServiceError::bad_request("INVALID_FRAME", e.body_text()))?;
    let record = blocking(&store, move |s| s.get_assessment(&id)).await?;
    let sample = record
        .report
        .samples
        .iter()
        .find(|s| s.frame == frame)
        .ok_or_else(|| ServiceError::NotFound {
            kind: "frame",
            id: frame.to_string(),
        })?;
    Ok(ok_json(&json!({
        "schema_version": SCHEMA_VERSION,
        "assessment_id": record.id,
        "sample": sample,
    })))
}
