//! Structured submission documents (the public contribution form).
//!
//! A document is a JSON object with the descriptive record fields plus
//! `requested_tier` and `submitter`. Unknown keys are rejected; `date_span`
//! is free text and list fields are arrays of free-text terms.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::model::{
    parse_date_span_at, Accessibility, Condition, DateSpan, Extent, FieldOverride, FindingAid, Location,
    NormalizationAction, NormalizationIssue, Provenance, RecordDraft, RepositoryType, SourceKind, Tier,
};

use super::{IncomingSubmission, IngestContext, Submitter};

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct FieldReason {
    pub field: String,
    pub code: String,
}

/// Field-level reasons a document was refused.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("submission document rejected: {}", summary(.reasons))]
pub struct SchemaError {
    pub reasons: Vec<FieldReason>,
}

fn summary(reasons: &[FieldReason]) -> String {
    reasons
        .iter()
        .map(|r| format!("{} {}", r.field, r.code))
        .collect::<Vec<_>>()
        .join(", ")
}

const TEXT_FIELDS: &[&str] = &[
    "description",
    "repository_name",
    "owner_contact",
    "access_statement",
    "usage_statement",
    "inventory_description",
    "supporting_documentation",
    "historical_relevance",
    "notes",
];

const KNOWN_KEYS: &[&str] = &[
    "title",
    "description",
    "repository_name",
    "repository_type",
    "location",
    "owner_contact",
    "accessibility",
    "access_statement",
    "usage_statement",
    "creators",
    "date_span",
    "content_types",
    "physical_formats",
    "languages",
    "genres",
    "extent",
    "condition",
    "finding_aid",
    "inventory_description",
    "supporting_documentation",
    "historical_relevance",
    "notes",
    "field_overrides",
    "requested_tier",
    "submitter",
];

const REQUIRED_KEYS: &[&str] = &["title", "requested_tier", "submitter"];

#[derive(Deserialize)]
#[serde(untagged)]
enum DateInput {
    Text(String),
    Span(DateSpan),
}

struct Reader<'a> {
    obj: &'a Map<String, Value>,
    reasons: Vec<FieldReason>,
}

impl Reader<'_> {
    fn reject(&mut self, field: &str, code: &str) {
        self.reasons.push(FieldReason {
            field: field.to_string(),
            code: code.to_string(),
        });
    }

    fn take<T: DeserializeOwned>(&mut self, key: &str) -> Option<T> {
        let value = self.obj.get(key)?;
        if value.is_null() {
            return None;
        }
        match serde_json::from_value(value.clone()) {
            Ok(v) => Some(v),
            Err(_) => {
                self.reject(key, "invalid_type");
                None
            }
        }
    }

    fn take_enum<T: std::str::FromStr>(&mut self, key: &str) -> Option<T> {
        let raw: String = self.take(key)?;
        match raw.parse() {
            Ok(v) => Some(v),
            Err(_) => {
                self.reject(key, "invalid_value");
                None
            }
        }
    }
}

fn raw_text(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Parses and normalizes a submission document. The returned submission
/// carries a validation report; schema problems are returned as errors.
pub fn ingest_form_submission(doc: &Value, ctx: &IngestContext<'_>) -> Result<IncomingSubmission, SchemaError> {
    let Some(obj) = doc.as_object() else {
        return Err(SchemaError {
            reasons: vec![FieldReason {
                field: "$".into(),
                code: "not_an_object".into(),
            }],
        });
    };
    let mut r = Reader {
        obj,
        reasons: Vec::new(),
    };
    for key in obj.keys() {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            r.reject(key, "unknown_field");
        }
    }
    for key in REQUIRED_KEYS {
        if obj.get(*key).is_none_or(Value::is_null) {
            r.reject(key, "required");
        }
    }

    let mut draft = RecordDraft::default();
    let mut issues = Vec::new();
    let f = &mut draft.fields;

    f.title = r.take::<String>("title").unwrap_or_default().trim().to_string();
    for key in TEXT_FIELDS {
        let value = r
            .take::<String>(key)
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty());
        match *key {
            "description" => f.description = value,
            "repository_name" => f.repository_name = value,
            "owner_contact" => f.owner_contact = value,
            "access_statement" => f.access_statement = value,
            "usage_statement" => f.usage_statement = value,
            "inventory_description" => f.inventory_description = value,
            "supporting_documentation" => f.supporting_documentation = value,
            "historical_relevance" => f.historical_relevance = value,
            _ => f.notes = value,
        }
    }
    if let Some(kind) = r.take_enum::<RepositoryType>("repository_type") {
        f.repository_type = kind;
    }
    if let Some(access) = r.take_enum::<Accessibility>("accessibility") {
        f.accessibility = access;
    }
    f.location = r.take::<Location>("location").unwrap_or_default();
    f.creators = r.take::<Vec<String>>("creators").unwrap_or_default();
    f.extent = r.take::<Extent>("extent");
    f.condition = r.take::<Condition>("condition").unwrap_or_default();
    f.finding_aid = r.take::<FindingAid>("finding_aid").unwrap_or_default();
    f.visibility.field_overrides = r
        .take::<BTreeMap<String, FieldOverride>>("field_overrides")
        .unwrap_or_default();

    match r.take::<DateInput>("date_span") {
        Some(DateInput::Text(raw)) if !raw.trim().is_empty() => match parse_date_span_at(&raw, ctx.current_year) {
            Ok(span) => f.date_span = Some(span),
            Err(_) => issues.push(NormalizationIssue {
                field: "date_span".into(),
                raw_value: raw,
                action: NormalizationAction::Unparsed,
            }),
        },
        Some(DateInput::Span(span)) => f.date_span = Some(span),
        _ => {}
    }

    let requested_tier = r.take::<Tier>("requested_tier");
    let submitter = r.take::<Submitter>("submitter");

    let mut lists = BTreeMap::new();
    for key in ["content_types", "physical_formats", "languages", "genres"] {
        if let Some(raws) = r.take::<Vec<String>>(key) {
            lists.insert(key, ctx.vocab.normalize_list(key, &raws, &mut issues));
        }
    }

    if !r.reasons.is_empty() {
        return Err(SchemaError { reasons: r.reasons });
    }

    let f = &mut draft.fields;
    for (key, terms) in lists {
        match key {
            "content_types" => f.content_types = terms,
            "physical_formats" => f.physical_formats = terms,
            "languages" => f.languages = terms,
            _ => f.genres = terms,
        }
    }
    let requested_tier = requested_tier.unwrap_or_default();
    f.visibility.tier = requested_tier;
    draft.normalization_issues = issues;

    let raw_fields = obj
        .iter()
        .filter(|(k, v)| k.as_str() != "submitter" && !v.is_null())
        .map(|(k, v)| (k.clone(), raw_text(v)))
        .collect();
    let report = ctx.validate(&draft);
    Ok(IncomingSubmission {
        raw_fields,
        proposed: draft,
        report,
        requested_tier,
        submitter,
        source: Provenance {
            source: SourceKind::Form,
            source_detail: ctx.source_detail.clone(),
        },
    })
}
