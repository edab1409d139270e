//! Dataset snapshots.
//!
//! Format: UTF-8 with LF line ends. Lines 1..N hold the canonical JSON public
//! views of every visible record in id order; the last line is the manifest
//! `{content_hash, generated_at, record_count}`. `content_hash` is the
//! SHA-256 hex of lines 1..N exactly as written, LFs included.

use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::model::{PublicView, Tier};

use super::CatalogView;

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SnapshotManifest {
    pub content_hash: String,
    /// Time of the last change to the exported state; `null` for an empty
    /// store. Never the wall-clock time of export.
    pub generated_at: Option<DateTime<Utc>>,
    pub record_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snapshot {
    pub manifest: SnapshotManifest,
    pub records: Vec<PublicView>,
}

#[derive(Debug, PartialEq, Eq, thiserror::Error)]
pub enum SnapshotError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("content hash mismatch: manifest says {expected}, content hashes to {actual}")]
    HashMismatch { expected: String, actual: String },
    #[error("manifest counts {expected} records, found {actual}")]
    CountMismatch { expected: usize, actual: usize },
}

fn canonical<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("value serializes");
    serde_json::to_string(&value).expect("value serializes")
}

pub fn export_snapshot(view: &CatalogView) -> Vec<u8> {
    let views = view.public_views();
    let mut out = Vec::new();
    for record in &views {
        out.extend_from_slice(record.to_canonical_json().as_bytes());
        out.push(b'\n');
    }
    let manifest = SnapshotManifest {
        content_hash: hex::encode(Sha256::digest(&out)),
        generated_at: view.last_modified(),
        record_count: views.len(),
    };
    out.extend_from_slice(canonical(&manifest).as_bytes());
    out.push(b'\n');
    out
}

/// Parses and verifies snapshot bytes.
pub fn import_snapshot(bytes: &[u8]) -> Result<Snapshot, SnapshotError> {
    let parse_err = |line: usize, message: &str| SnapshotError::Parse {
        line,
        message: message.to_string(),
    };
    let text = std::str::from_utf8(bytes).map_err(|_| parse_err(1, "not UTF-8"))?;
    let Some(body) = text.strip_suffix('\n') else {
        return Err(parse_err(text.lines().count().max(1), "truncated: missing final line end"));
    };
    let (content, manifest_line) = match body.rfind('\n') {
        Some(i) => (&text[..=i], &body[i + 1..]),
        None => ("", body),
    };
    let manifest_number = content.lines().count() + 1;
    let manifest: SnapshotManifest = serde_json::from_str(manifest_line)
        .map_err(|e| parse_err(manifest_number, &format!("bad manifest: {e}")))?;
    if canonical(&manifest) != manifest_line {
        return Err(parse_err(manifest_number, "manifest is not canonical JSON"));
    }

    let mut records = Vec::new();
    for (index, line) in content.lines().enumerate() {
        let number = index + 1;
        let map: BTreeMap<String, Value> =
            serde_json::from_str(line).map_err(|e| parse_err(number, &e.to_string()))?;
        let record = PublicView::from_map(map).map_err(|e| parse_err(number, &e))?;
        if record.to_canonical_json() != line {
            return Err(parse_err(number, "record is not canonical JSON"));
        }
        if record.tier() == Tier::Restricted {
            return Err(parse_err(number, "restricted record in snapshot"));
        }
        if records.last().is_some_and(|prev: &PublicView| prev.id() >= record.id()) {
            return Err(parse_err(number, "records out of id order"));
        }
        records.push(record);
    }

    let actual = hex::encode(Sha256::digest(content.as_bytes()));
    if actual != manifest.content_hash {
        return Err(SnapshotError::HashMismatch {
            expected: manifest.content_hash,
            actual,
        });
    }
    if records.len() != manifest.record_count {
        return Err(SnapshotError::CountMismatch {
            expected: manifest.record_count,
            actual: records.len(),
        });
    }
    Ok(Snapshot { manifest, records })
}
