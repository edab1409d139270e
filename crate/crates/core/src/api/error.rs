use std::collections::BTreeMap;

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;

use crate::ingest::SchemaError;
use crate::model::ValidationReport;
use crate::search::SearchError;
use crate::store::StoreError;

/// Error body: `{code, message, fields?}`. `fields` maps field names to
/// reason codes.
#[derive(Debug, Clone, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fields: Option<BTreeMap<String, String>>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
            fields: None,
        }
    }

    /// The one body every hidden, tombstoned or unknown collection gets.
    pub fn collection_not_found() -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", "no such collection")
    }

    pub fn not_found(what: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", format!("no such {what}"))
    }

    pub fn bad_request(code: &'static str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn unauthorized(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNAUTHORIZED, "unauthorized", message)
    }

    pub fn forbidden(message: impl Into<String>) -> Self {
        Self::new(StatusCode::FORBIDDEN, "forbidden", message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }

    fn with_fields(mut self, fields: impl IntoIterator<Item = (String, String)>) -> Self {
        let mut map = BTreeMap::new();
        for (field, code) in fields {
            map.entry(field).or_insert(code);
        }
        self.fields = Some(map);
        self
    }

    pub fn validation(report: &ValidationReport) -> Self {
        let message = report
            .errors
            .iter()
            .map(|f| format!("{}: {}", f.field, f.message))
            .collect::<Vec<_>>()
            .join("; ");
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "validation_failed", message)
            .with_fields(report.errors.iter().map(|f| (f.field.clone(), f.code.clone())))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

impl From<StoreError> for ApiError {
    fn from(err: StoreError) -> Self {
        match err {
            StoreError::NotFound { kind: "record", .. } => Self::collection_not_found(),
            StoreError::NotFound { kind, .. } => Self::not_found(kind),
            StoreError::Conflict(m) => Self::new(StatusCode::CONFLICT, "conflict", m),
            e @ StoreError::Tombstoned(_) => Self::new(StatusCode::CONFLICT, "tombstoned", e.to_string()),
            StoreError::Validation(report) => Self::validation(&report),
            StoreError::InvalidChange(m) => Self::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_change", m),
            StoreError::Forbidden(m) => Self::forbidden(m),
            other => Self::internal(other.to_string()),
        }
    }
}

impl From<SchemaError> for ApiError {
    fn from(err: SchemaError) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_submission", err.to_string())
            .with_fields(err.reasons.into_iter().map(|r| (r.field, r.code)))
    }
}

impl From<SearchError> for ApiError {
    fn from(err: SearchError) -> Self {
        Self::bad_request(err.code(), err.to_string())
    }
}
