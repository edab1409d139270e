//! Entry extraction for printed reference guides.
//!
//! Guide layout: entries are separated by blank lines. The first line of an
//! entry that is not a `Label: value` line names the repository; labeled
//! lines fill fields; anything else lands in the entry's notes with an
//! issue. Every non-blank input line is claimed by exactly one entry.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{NormalizationAction, NormalizationIssue, Provenance, SourceKind};

use super::ocr::{ocr_cleanup, Correction};
use super::{IncomingSubmission, IngestContext, IngestIssue};

/// Guide labels and the raw field each fills.
pub const GUIDE_LABELS: &[(&str, &str)] = &[
    ("Location", "location"),
    ("Holdings", "inventory_description"),
    ("Dates", "date_span"),
    ("Formats", "physical_formats"),
    ("Contact", "owner_contact"),
    ("Finding Aid", "finding_aid"),
    ("Notes", "notes"),
];

#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq, Eq)]
pub struct PrintEntry {
    pub raw_fields: BTreeMap<String, String>,
    pub issues: Vec<IngestIssue>,
    /// 1-based input line numbers claimed by this entry.
    pub lines: Vec<usize>,
}

#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq, Eq)]
pub struct PrintExtraction {
    pub entries: Vec<PrintEntry>,
    pub issues: Vec<IngestIssue>,
}

fn parse_label(line: &str) -> Option<(&'static str, &str)> {
    let (head, value) = line.split_once(':')?;
    let head = head.trim();
    GUIDE_LABELS
        .iter()
        .find(|(label, _)| *label == head)
        .map(|(_, field)| (*field, value.trim()))
}

fn push_note(entry: &mut PrintEntry, text: &str) {
    let notes = entry.raw_fields.entry("notes".to_string()).or_default();
    if !notes.is_empty() {
        notes.push('\n');
    }
    notes.push_str(text);
}

/// Splits cleaned guide text into entries of raw fields.
pub fn extract_print_entries(text: &str) -> PrintExtraction {
    let mut out = PrintExtraction::default();
    let mut current: Option<PrintEntry> = None;

    for (index, line) in text.lines().enumerate() {
        let number = index + 1;
        if line.trim().is_empty() {
            if let Some(entry) = current.take() {
                out.entries.push(finish(entry));
            }
            continue;
        }
        let entry = current.get_or_insert_with(PrintEntry::default);
        entry.lines.push(number);
        let location = format!("line {number}");
        let content = line.trim();

        match parse_label(content) {
            Some(("notes", value)) => {
                if !value.is_empty() {
                    push_note(entry, value);
                }
            }
            Some((field, _)) if entry.raw_fields.contains_key(field) => {
                push_note(entry, content);
                entry.issues.push(IngestIssue::new(
                    location,
                    Some(field),
                    "duplicate_label",
                    "label repeated within the entry; line kept in notes",
                ));
            }
            Some((field, value)) => {
                if value.is_empty() {
                    entry
                        .issues
                        .push(IngestIssue::new(location, Some(field), "empty_value", "label has no value"));
                } else {
                    entry.raw_fields.insert(field.to_string(), value.to_string());
                }
            }
            None if !entry.raw_fields.contains_key("repository_name") => {
                entry.raw_fields.insert("repository_name".to_string(), content.to_string());
            }
            None => {
                push_note(entry, content);
                entry.issues.push(IngestIssue::new(
                    location,
                    Some("notes"),
                    "unrecognized_line",
                    "line is neither the entry name nor a known label; kept in notes",
                ));
            }
        }
    }
    if let Some(entry) = current.take() {
        out.entries.push(finish(entry));
    }
    out
}

fn finish(mut entry: PrintEntry) -> PrintEntry {
    if !entry.raw_fields.contains_key("repository_name") {
        let first = entry.lines.first().copied().unwrap_or_default();
        entry.issues.push(IngestIssue::new(
            format!("line {first}"),
            Some("repository_name"),
            "missing_name",
            "entry has no name line",
        ));
    }
    entry
}

#[derive(Clone, Debug, Default)]
pub struct GuideImport {
    pub submissions: Vec<IncomingSubmission>,
    pub issues: Vec<IngestIssue>,
    pub corrections: Vec<Correction>,
}

/// Cleans OCR text, extracts entries and turns each into a submission.
/// Guide entries carry no title, so the repository name stands in for it
/// (recorded as a derived value).
pub fn ingest_print_guide(text: &str, ctx: &IngestContext<'_>) -> GuideImport {
    let cleanup = ocr_cleanup(text);
    let extraction = extract_print_entries(&cleanup.cleaned);
    let builder = ctx.builder(";");
    let mut out = GuideImport {
        issues: extraction.issues,
        corrections: cleanup.corrections,
        ..Default::default()
    };
    for entry in extraction.entries {
        let mut raw = entry.raw_fields.clone();
        let derived_title = raw.get("repository_name").cloned();
        if let Some(name) = &derived_title {
            raw.insert("title".to_string(), name.clone());
        }
        let mut built = builder.build(&raw);
        if let Some(name) = derived_title {
            built.draft.normalization_issues.push(NormalizationIssue {
                field: "title".into(),
                raw_value: name,
                action: NormalizationAction::Derived,
            });
        }
        let first = entry.lines.first().copied().unwrap_or_default();
        out.issues.extend(entry.issues);
        let report = ctx.validate(&built.draft);
        out.submissions.push(IncomingSubmission {
            raw_fields: entry.raw_fields,
            requested_tier: built.draft.fields.visibility.tier,
            proposed: built.draft,
            report,
            submitter: None,
            source: Provenance {
                source: SourceKind::PrintGuide,
                source_detail: format!("{} line {first}", ctx.source_detail).trim().to_string(),
            },
        });
    }
    out
}
