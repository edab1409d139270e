//! Survey spreadsheet exports (CSV with a header row).

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::model::{Provenance, SourceKind};

use super::draft::RAW_FIELD_NAMES;
use super::{IncomingSubmission, IngestContext, IngestIssue};

#[derive(Serialize, Deserialize, Clone, Copy, Debug, Default, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum UnmappedPolicy {
    /// Unmapped columns stay in `raw_fields` only.
    #[default]
    Ignore,
    /// Unmapped values are also appended to the draft's notes, with an issue.
    Note,
}

fn default_separator() -> String {
    ";".to_string()
}

/// How source columns map onto raw field names.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ColumnMapping {
    pub columns: BTreeMap<String, String>,
    #[serde(default)]
    pub unmapped_policy: UnmappedPolicy,
    #[serde(default = "default_separator")]
    pub list_separator: String,
}

#[derive(Debug, thiserror::Error)]
pub enum MappingError {
    #[error("mapping is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("columns {0:?} and {1:?} both map to {2:?}")]
    DuplicateTarget(String, String, String),
    #[error("column {0:?} maps to unknown field {1:?}")]
    UnknownField(String, String),
    #[error("list separator must not be empty")]
    EmptySeparator,
}

impl ColumnMapping {
    pub fn new(columns: impl IntoIterator<Item = (String, String)>) -> Result<Self, MappingError> {
        let mapping = ColumnMapping {
            columns: columns.into_iter().collect(),
            unmapped_policy: UnmappedPolicy::default(),
            list_separator: default_separator(),
        };
        mapping.check()?;
        Ok(mapping)
    }

    pub fn from_json(text: &str) -> Result<Self, MappingError> {
        let mapping: ColumnMapping = serde_json::from_str(text)?;
        mapping.check()?;
        Ok(mapping)
    }

    fn check(&self) -> Result<(), MappingError> {
        if self.list_separator.is_empty() {
            return Err(MappingError::EmptySeparator);
        }
        let mut seen: BTreeMap<&str, &str> = BTreeMap::new();
        for (source, target) in &self.columns {
            if !RAW_FIELD_NAMES.contains(&target.as_str()) {
                return Err(MappingError::UnknownField(source.clone(), target.clone()));
            }
            if let Some(prev) = seen.insert(target, source) {
                return Err(MappingError::DuplicateTarget(prev.to_string(), source.clone(), target.clone()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CsvError {
    #[error("could not read input: {0}")]
    Io(#[from] std::io::Error),
    #[error("input has no header row")]
    MissingHeader,
    #[error("line {line}: quoted field is never closed")]
    UnbalancedQuote { line: u64 },
    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("header repeats column {0:?}")]
    DuplicateColumn(String),
}

#[derive(Clone, Debug, Default)]
pub struct SurveyImport {
    pub submissions: Vec<IncomingSubmission>,
    pub issues: Vec<IngestIssue>,
}

/// Finds a quoted field that is still open at end of input and reports the
/// line it started on.
fn check_quotes(bytes: &[u8]) -> Result<(), CsvError> {
    let mut line = 1u64;
    let mut open_at = None;
    for &b in bytes {
        match b {
            b'"' => {
                open_at = match open_at {
                    Some(_) => None,
                    None => Some(line),
                }
            }
            b'\n' => line += 1,
            _ => {}
        }
    }
    match open_at {
        Some(line) => Err(CsvError::UnbalancedQuote { line }),
        None => Ok(()),
    }
}

/// One submission per data row. Every non-empty cell is kept verbatim in
/// `raw_fields` under its column header.
pub fn ingest_survey_csv<R: Read>(
    mut stream: R,
    mapping: &ColumnMapping,
    ctx: &IngestContext<'_>,
) -> Result<SurveyImport, CsvError> {
    let mut bytes = Vec::new();
    stream.read_to_end(&mut bytes)?;
    check_quotes(&bytes)?;

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(bytes.as_slice());
    let headers = reader.headers().map_err(|e| malformed(&e))?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].trim().is_empty()) {
        return Err(CsvError::MissingHeader);
    }
    let headers: Vec<String> = headers.iter().map(|h| h.trim_start_matches('\u{feff}').to_string()).collect();
    let mut distinct = BTreeSet::new();
    for h in &headers {
        if !distinct.insert(h.as_str()) {
            return Err(CsvError::DuplicateColumn(h.clone()));
        }
    }

    let mut out = SurveyImport::default();
    for source in mapping.columns.keys() {
        if !distinct.contains(source.as_str()) {
            out.issues.push(IngestIssue::new(
                "header",
                mapping.columns.get(source).map(String::as_str),
                "mapped_column_missing",
                format!("mapped column {source:?} is not in the header"),
            ));
        }
    }

    let builder = ctx.builder(&mapping.list_separator);
    for row in reader.records() {
        let row = row.map_err(|e| malformed(&e))?;
        let line = row.position().map_or(0, |p| p.line());
        let location = format!("line {line}");

        let mut raw_fields = BTreeMap::new();
        let mut canonical = BTreeMap::new();
        let mut unmapped_notes = Vec::new();
        for (header, cell) in headers.iter().zip(row.iter()) {
            if cell.trim().is_empty() {
                continue;
            }
            raw_fields.insert(header.clone(), cell.to_string());
            match mapping.columns.get(header) {
                Some(target) => {
                    canonical.insert(target.clone(), cell.to_string());
                }
                None if mapping.unmapped_policy == UnmappedPolicy::Note => {
                    unmapped_notes.push(format!("{header}: {}", cell.trim()));
                    out.issues.push(IngestIssue::new(
                        location.clone(),
                        None,
                        "unmapped_column",
                        format!("column {header:?} has no mapping; value appended to notes"),
                    ));
                }
                None => {}
            }
        }
        if raw_fields.is_empty() {
            out.issues.push(IngestIssue::new(location, None, "blank_row", "row has no values"));
            continue;
        }
        if !unmapped_notes.is_empty() {
            let notes = canonical.entry("notes".to_string()).or_default();
            for note in unmapped_notes {
                if !notes.trim().is_empty() {
                    notes.push('\n');
                }
                notes.push_str(&note);
            }
        }

        let built = builder.build(&canonical);
        for (field, message) in built.problems {
            out.issues.push(IngestIssue::new(location.clone(), Some(&field), "invalid_value", message));
        }
        let report = ctx.validate(&built.draft);
        out.submissions.push(IncomingSubmission {
            raw_fields,
            requested_tier: built.draft.fields.visibility.tier,
            proposed: built.draft,
            report,
            submitter: built.submitter,
            source: Provenance {
                source: SourceKind::SurveyCsv,
                source_detail: format!("{} {location}", ctx.source_detail).trim().to_string(),
            },
        });
    }
    Ok(out)
}

fn malformed(err: &csv::Error) -> CsvError {
    let line = err.position().map_or(0, |p| p.line());
    CsvError::Malformed {
        line,
        message: err.to_string(),
    }
}
