//! Source parsers: survey CSV exports, form documents, EAD finding aids and
//! OCR'd print guides. Every parser produces [`IncomingSubmission`]s that
//! wait in the curation queue; nothing here publishes a record.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{
    current_year, validate_record_at, Provenance, RecordDraft, SourceKind, Tier, ValidationReport, Vocabularies,
};

mod dedup;
mod draft;
mod ead;
mod form;
mod guide;
mod ocr;
mod survey;

pub use dedup::{detect_duplicates, pair_score, title_tokens, DedupConfig, DuplicateCandidate, DuplicateEvidence};
pub use draft::RAW_FIELD_NAMES;
pub use ead::{ingest_ead, parse_ead_collection, EadError};
pub use form::{ingest_form_submission, FieldReason, SchemaError};
pub use guide::{
    extract_print_entries, ingest_print_guide, GuideImport, PrintEntry, PrintExtraction, GUIDE_LABELS,
};
pub use ocr::{ocr_cleanup, Cleanup, Correction};
pub use survey::{ingest_survey_csv, ColumnMapping, CsvError, MappingError, SurveyImport, UnmappedPolicy};

/// Contact details of whoever filled in a submission. Never public.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Submitter {
    pub name: String,
    pub email: String,
}

/// A parsed contribution before it enters the queue.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct IncomingSubmission {
    /// Source values exactly as received.
    pub raw_fields: BTreeMap<String, String>,
    pub proposed: RecordDraft,
    pub report: ValidationReport,
    pub requested_tier: Tier,
    pub submitter: Option<Submitter>,
    pub source: Provenance,
}

impl IncomingSubmission {
    /// Wraps a draft built in code, validated against `ctx`.
    pub fn from_draft(draft: RecordDraft, ctx: &IngestContext<'_>) -> Self {
        IncomingSubmission {
            raw_fields: BTreeMap::new(),
            report: ctx.validate(&draft),
            requested_tier: draft.fields.visibility.tier,
            proposed: draft,
            submitter: None,
            source: Provenance {
                source: SourceKind::Form,
                source_detail: ctx.source_detail.clone(),
            },
        }
    }
}

/// A problem found while reading a source that is not tied to one field of
/// a draft, e.g. an unmapped CSV column or an unrecognized guide line.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct IngestIssue {
    /// "row 3", "line 17", "header"...
    pub location: String,
    pub field: Option<String>,
    pub code: String,
    pub message: String,
}

impl IngestIssue {
    pub(crate) fn new(location: impl Into<String>, field: Option<&str>, code: &str, message: impl Into<String>) -> Self {
        IngestIssue {
            location: location.into(),
            field: field.map(str::to_string),
            code: code.to_string(),
            message: message.into(),
        }
    }
}

/// Shared settings for a parser run.
#[derive(Clone, Debug)]
pub struct IngestContext<'a> {
    pub vocab: &'a Vocabularies,
    pub current_year: i32,
    /// Free-text provenance detail, e.g. the source file name.
    pub source_detail: String,
}

impl<'a> IngestContext<'a> {
    pub fn new(vocab: &'a Vocabularies, source_detail: impl Into<String>) -> Self {
        IngestContext {
            vocab,
            current_year: current_year(),
            source_detail: source_detail.into(),
        }
    }

    pub(crate) fn builder<'b>(&'b self, list_separator: &'b str) -> draft::DraftBuilder<'b> {
        draft::DraftBuilder {
            vocab: self.vocab,
            list_separator,
            current_year: self.current_year,
        }
    }

    pub(crate) fn validate(&self, draft: &RecordDraft) -> ValidationReport {
        validate_record_at(draft, self.vocab, self.current_year)
    }
}
