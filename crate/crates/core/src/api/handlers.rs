use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::header::{CACHE_CONTROL, CONTENT_TYPE, ETAG, IF_NONE_MATCH};
use axum::http::{HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::ingest::{ingest_form_submission, IngestContext};
use crate::model::{redact, CollectionRecord, SourceKind, Tier, View};
use crate::search::{compute_stats, SearchQuery};
use crate::store::{export_snapshot, Catalog, Role, StoreError, Submission, SubmissionState};

use super::{ApiError, AppState, Caller};

pub(super) struct CachedSnapshot {
    generation: u64,
    bytes: Bytes,
    sha256: String,
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    let body: &[u8] = if body.iter().all(u8::is_ascii_whitespace) { b"{}" } else { body };
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request("invalid_body", e.to_string()))
}

fn full_json(record: &CollectionRecord, history_link: bool) -> Value {
    let mut value = serde_json::to_value(record).expect("record serializes");
    if history_link {
        value["history_url"] = json!(format!("/api/v1/collections/{}/history", record.id));
    }
    value
}

/// Runs a store operation off the async workers.
async fn blocking<T: Send + 'static>(
    state: &AppState,
    op: impl FnOnce(&Catalog) -> Result<T, StoreError> + Send + 'static,
) -> Result<T, ApiError> {
    let state = state.clone();
    tokio::task::spawn_blocking(move || op(&state.catalog).map_err(ApiError::from))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
}

/// Runs a record mutation and reindexes before answering.
async fn mutate<T: Send + 'static>(
    state: &AppState,
    op: impl FnOnce(&Catalog) -> Result<T, StoreError> + Send + 'static,
) -> Result<T, ApiError> {
    let state = state.clone();
    tokio::task::spawn_blocking(move || {
        let out = op(&state.catalog)?;
        state
            .index
            .rebuild_and_swap(&state.catalog.view())
            .map_err(|e| ApiError::internal(e.to_string()))?;
        Ok(out)
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))?
}

pub(super) async fn search(
    State(state): State<AppState>,
    _caller: Caller,
    params: Result<Query<Vec<(String, String)>>, QueryRejection>,
) -> Result<Json<Value>, ApiError> {
    let Query(params) = params.map_err(|e| ApiError::bad_request("invalid_query", e.body_text()))?;
    let mut query = SearchQuery::default();
    let number = |key: &str, value: &str| {
        value
            .parse::<usize>()
            .map_err(|_| ApiError::bad_request("invalid_parameter", format!("{key} must be a positive integer")))
    };
    for (key, value) in params {
        match key.as_str() {
            "q" => query.q = value,
            "page" => query.page = number(&key, &value)?,
            "page_size" => query.page_size = number(&key, &value)?,
            _ => match key.strip_prefix("facet.") {
                Some(facet) => query.facet_filters.entry(facet.to_string()).or_default().push(value),
                None => {
                    return Err(ApiError::bad_request(
                        "unknown_parameter",
                        format!("unknown query parameter {key:?}"),
                    ))
                }
            },
        }
    }
    let result = state.index.current().search(&query)?;
    Ok(Json(serde_json::to_value(result).expect("result serializes")))
}

pub(super) async fn get_collection(
    State(state): State<AppState>,
    caller: Caller,
    Path(id): Path<String>,
) -> Result<Json<Value>, ApiError> {
    let view = state.catalog.view();
    let record = view.record(&id).ok_or_else(ApiError::collection_not_found)?;
    match redact(record, caller.0.viewer()) {
        View::Full(record) => Ok(Json(full_json(&record, caller.0.role == Role::Curator))),
        View::Public(public) => Ok(Json(serde_json::to_value(public).expect("view serializes"))),
        View::NotVisible => Err(ApiError::collection_not_found()),
    }
}

pub(super) async fn collection_history(
    State(state): State<AppState>,
    caller: Caller,
    Path(id): Path<String>,
) -> Result<Json<Value>, ApiError> {
    caller.require_curator()?;
    let view = state.catalog.view();
    let history = view.history(&id).ok_or_else(ApiError::collection_not_found)?;
    Ok(Json(json!({ "record_id": id, "entries": history })))
}

pub(super) async fn amend_collection(
    State(state): State<AppState>,
    caller: Caller,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let author = caller.require_curator()?.clone();
    let changes: Value = parse_body(&body)?;
    let record = mutate(&state, move |c| c.amend(&id, &author, &changes)).await?;
    Ok(Json(full_json(&record, true)))
}

pub(super) async fn delete_collection(
    State(state): State<AppState>,
    caller: Caller,
    Path(id): Path<String>,
) -> Result<Json<Value>, ApiError> {
    let author = caller.require_curator()?.clone();
    let record = mutate(&state, move |c| c.tombstone(&id, &author)).await?;
    Ok(Json(full_json(&record, true)))
}

pub(super) async fn create_submission(
    State(state): State<AppState>,
    caller: Caller,
    body: Bytes,
) -> Result<Response, ApiError> {
    let doc: Value = serde_json::from_slice(&body).map_err(|e| ApiError::bad_request("invalid_body", e.to_string()))?;
    let mut incoming = {
        let ctx = IngestContext::new(state.catalog.vocab(), "api");
        ingest_form_submission(&doc, &ctx)?
    };
    if !incoming.report.is_publishable() {
        return Err(ApiError::validation(&incoming.report));
    }
    incoming.source.source = SourceKind::Api;
    let contributor = (caller.0.role != Role::Public).then(|| caller.0.name.clone());
    let submission = blocking(&state, move |c| c.submit(incoming, contributor.as_deref())).await?;
    let body = json!({"submission_id": submission.submission_id, "state": submission.state});
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

#[derive(Deserialize)]
pub(super) struct ListParams {
    state: Option<String>,
}

pub(super) async fn list_submissions(
    State(state): State<AppState>,
    caller: Caller,
    params: Result<Query<ListParams>, QueryRejection>,
) -> Result<Json<Value>, ApiError> {
    caller.require_curator()?;
    let Query(params) = params.map_err(|e| ApiError::bad_request("invalid_query", e.body_text()))?;
    let wanted: SubmissionState = params
        .state
        .as_deref()
        .unwrap_or("pending")
        .parse()
        .map_err(|e: String| ApiError::bad_request("invalid_parameter", e))?;
    let view = state.catalog.view();
    let items: Vec<&Submission> = view.submissions_in(wanted).map(|s| &**s).collect();
    Ok(Json(json!({ "submissions": items })))
}

pub(super) async fn get_submission(
    State(state): State<AppState>,
    caller: Caller,
    Path(id): Path<String>,
) -> Result<Json<Value>, ApiError> {
    if caller.0.role == Role::Public {
        return Err(ApiError::unauthorized("a token is required"));
    }
    let view = state.catalog.view();
    let submission = view.submission(&id).ok_or_else(|| ApiError::not_found("submission"))?;
    let mut value = serde_json::to_value(&**submission).expect("submission serializes");
    match caller.0.role {
        Role::Curator => {}
        _ if submission.contributor.as_deref() == Some(caller.0.name.as_str()) => {
            // candidates may name records the contributor cannot see
            value.as_object_mut().expect("object").remove("duplicates");
        }
        _ => return Err(ApiError::forbidden("only the submitting contributor or a curator may view this")),
    }
    Ok(Json(value))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ApproveBody {
    #[serde(default)]
    edits: Option<Value>,
    #[serde(default)]
    tier: Option<Tier>,
}

pub(super) async fn approve_submission(
    State(state): State<AppState>,
    caller: Caller,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let author = caller.require_curator()?.clone();
    let ApproveBody { edits, tier } = parse_body(&body)?;
    let record = mutate(&state, move |c| c.approve(&id, &author, edits.as_ref(), tier)).await?;
    Ok(Json(full_json(&record, true)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RejectBody {
    reason: String,
}

pub(super) async fn reject_submission(
    State(state): State<AppState>,
    caller: Caller,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let author = caller.require_curator()?.clone();
    let RejectBody { reason } = parse_body(&body)?;
    let submission = blocking(&state, move |c| c.reject(&id, &author, &reason)).await?;
    Ok(Json(serde_json::to_value(&*submission).expect("submission serializes")))
}

pub(super) async fn stats(State(state): State<AppState>, _caller: Caller) -> Json<Value> {
    let index = state.index.current();
    Json(serde_json::to_value(compute_stats(index.views())).expect("stats serialize"))
}

pub(super) async fn latest_snapshot(State(state): State<AppState>, _caller: Caller, headers: HeaderMap) -> Response {
    let view = state.catalog.view();
    let (bytes, sha256) = {
        let mut cache = state.snapshot.lock().unwrap_or_else(std::sync::PoisonError::into_inner);
        match &*cache {
            Some(c) if c.generation == view.generation() => (c.bytes.clone(), c.sha256.clone()),
            _ => {
                let bytes = Bytes::from(export_snapshot(&view));
                let sha256 = hex::encode(Sha256::digest(&bytes));
                *cache = Some(CachedSnapshot {
                    generation: view.generation(),
                    bytes: bytes.clone(),
                    sha256: sha256.clone(),
                });
                (bytes, sha256)
            }
        }
    };
    let etag = HeaderValue::from_str(&format!("\"{sha256}\"")).expect("hex is a valid header");
    let digest = HeaderValue::from_str(&sha256).expect("hex is a valid header");
    if headers.get(IF_NONE_MATCH) == Some(&etag) {
        return (StatusCode::NOT_MODIFIED, [(ETAG, etag)]).into_response();
    }
    (
        [
            (CONTENT_TYPE, HeaderValue::from_static("application/x-ndjson; charset=utf-8")),
            (CACHE_CONTROL, HeaderValue::from_static("no-cache")),
            (ETAG, etag),
        ],
        [("x-content-sha256", digest)],
        bytes,
    )
        .into_response()
}

pub(super) async fn whoami(caller: Caller) -> Json<Value> {
    let name = (caller.0.role != Role::Public).then_some(caller.0.name);
    Json(json!({"role": caller.0.role, "name": name}))
}

pub(super) async fn no_route() -> ApiError {
    ApiError::not_found("endpoint")
}
