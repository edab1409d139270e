//! Durable storage for records and the curation queue.
//!
//! Every mutation appends one event to `catalog.log` in the data directory
//! and then swaps in a new materialized [`CatalogView`]. Readers hold an
//! `Arc` of a view and never block the writer.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::ingest::{DuplicateCandidate, Submitter};
use crate::model::{CollectionRecord, Provenance, RecordDraft, Tier, ValidationReport, Viewer};

mod catalog;
mod log;
mod patch;
mod snapshot;

pub use catalog::{Catalog, CatalogOptions, CatalogView, Clock, FixedClock, SystemClock, LOCK_FILE, LOG_FILE};
pub use snapshot::{export_snapshot, import_snapshot, Snapshot, SnapshotError, SnapshotManifest};

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Public,
    Contributor,
    Curator,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Public => "public",
            Role::Contributor => "contributor",
            Role::Curator => "curator",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "public" => Ok(Role::Public),
            "contributor" => Ok(Role::Contributor),
            "curator" => Ok(Role::Curator),
            other => Err(format!("unknown role {other:?}")),
        }
    }
}

/// An authenticated actor.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Principal {
    pub role: Role,
    pub name: String,
}

impl Principal {
    pub fn public() -> Self {
        Principal {
            role: Role::Public,
            name: "anonymous".into(),
        }
    }

    pub fn curator(name: impl Into<String>) -> Self {
        Principal {
            role: Role::Curator,
            name: name.into(),
        }
    }

    pub fn contributor(name: impl Into<String>) -> Self {
        Principal {
            role: Role::Contributor,
            name: name.into(),
        }
    }

    pub fn viewer(&self) -> Viewer<'_> {
        match self.role {
            Role::Public => Viewer::Public,
            Role::Contributor => Viewer::Contributor(&self.name),
            Role::Curator => Viewer::Curator,
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[serde(rename_all = "snake_case")]
pub enum ChangeKind {
    Create,
    Amend,
    Tombstone,
    TierChange,
}

/// One immutable step in a record's history, holding the full state after
/// the change.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct RevisionEntry {
    pub record_id: String,
    pub revision: u64,
    pub author: Principal,
    pub change: ChangeKind,
    pub record: CollectionRecord,
    pub at: DateTime<Utc>,
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[serde(rename_all = "snake_case")]
pub enum SubmissionState {
    Pending,
    Approved,
    Rejected,
}

impl SubmissionState {
    pub fn as_str(self) -> &'static str {
        match self {
            SubmissionState::Pending => "pending",
            SubmissionState::Approved => "approved",
            SubmissionState::Rejected => "rejected",
        }
    }
}

impl FromStr for SubmissionState {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pending" => Ok(SubmissionState::Pending),
            "approved" => Ok(SubmissionState::Approved),
            "rejected" => Ok(SubmissionState::Rejected),
            other => Err(format!("unknown submission state {other:?}")),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct Decision {
    pub by: Principal,
    pub at: DateTime<Utc>,
    #[serde(default)]
    pub reason: Option<String>,
    #[serde(default)]
    pub record_id: Option<String>,
}

/// A contribution in the curation queue.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct Submission {
    pub submission_id: String,
    pub raw_fields: BTreeMap<String, String>,
    pub proposed: RecordDraft,
    pub report: ValidationReport,
    pub requested_tier: Tier,
    pub submitter: Option<Submitter>,
    pub source: Provenance,
    pub state: SubmissionState,
    pub received_at: DateTime<Utc>,
    /// Principal name of an authenticated contributor, if any.
    #[serde(default)]
    pub contributor: Option<String>,
    /// Published records this submission may duplicate, found on receipt.
    #[serde(default)]
    pub duplicates: Vec<DuplicateCandidate>,
    #[serde(default)]
    pub decision: Option<Decision>,
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{kind} {id} not found")]
    NotFound { kind: &'static str, id: String },
    #[error("conflict: {0}")]
    Conflict(String),
    #[error("record {0} is tombstoned")]
    Tombstoned(String),
    #[error("validation failed: {}", summary(.0))]
    Validation(ValidationReport),
    #[error("invalid change: {0}")]
    InvalidChange(String),
    #[error("forbidden: {0}")]
    Forbidden(String),
    #[error("data directory {0} is not initialized")]
    NotInitialized(String),
    #[error("data directory is locked by another process")]
    Locked,
    #[error("log line {line}: {message}")]
    Corrupt { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn summary(report: &ValidationReport) -> String {
    report
        .errors
        .iter()
        .map(|f| format!("{} {}", f.field, f.code))
        .collect::<Vec<_>>()
        .join(", ")
}
