use serde::{Deserialize, Serialize};

use super::dates::{current_year, MIN_YEAR};
use super::privacy::{is_overridable, FieldOverride, Tier};
use super::record::{NormalizationAction, NormalizationIssue, RecordDraft};
use super::vocab::{Vocabularies, VOCAB_FIELDS};

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub field: String,
    pub code: String,
    pub message: String,
}

impl Finding {
    fn new(field: &str, code: &str, message: impl Into<String>) -> Self {
        Finding {
            field: field.to_string(),
            code: code.to_string(),
            message: message.into(),
        }
    }
}

/// Findings about a draft. Errors block publication; warnings never do.
#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub errors: Vec<Finding>,
    pub warnings: Vec<Finding>,
    pub normalization_issues: Vec<NormalizationIssue>,
}

impl ValidationReport {
    pub fn is_publishable(&self) -> bool {
        self.errors.is_empty()
    }
}

pub fn validate_record(draft: &RecordDraft, vocab: &Vocabularies) -> ValidationReport {
    validate_record_at(draft, vocab, current_year())
}

pub fn validate_record_at(draft: &RecordDraft, vocab: &Vocabularies, current_year: i32) -> ValidationReport {
    let fields = &draft.fields;
    let mut report = ValidationReport {
        normalization_issues: draft.normalization_issues.clone(),
        ..Default::default()
    };
    let tier = fields.visibility.tier;

    if fields.title.trim().is_empty() {
        report.errors.push(Finding::new("title", "empty", "title must not be empty"));
    }

    let blank = |v: &Option<String>| v.as_deref().is_none_or(|s| s.trim().is_empty());
    if tier != Tier::Restricted && blank(&fields.repository_name) {
        report.errors.push(Finding::new(
            "repository_name",
            "required_for_tier",
            format!("a {tier} record must name its repository"),
        ));
    }

    if let Some(span) = fields.date_span {
        if span.begin_year > span.end_year {
            report.errors.push(Finding::new(
                "date_span",
                "inverted",
                format!("begins {} after it ends {}", span.begin_year, span.end_year),
            ));
        }
        if span.begin_year < MIN_YEAR || span.end_year > current_year {
            report.errors.push(Finding::new(
                "date_span",
                "out_of_range",
                format!("years must lie in {MIN_YEAR}..={current_year}"),
            ));
        }
    }

    for (record_field, _) in VOCAB_FIELDS {
        let Some(scheme) = vocab.scheme_for_record_field(record_field) else {
            continue;
        };
        for term in list_field(draft, record_field) {
            if scheme.is_canonical(term) {
                continue;
            }
            let recorded = draft.normalization_issues.iter().any(|issue| {
                issue.field == *record_field
                    && issue.raw_value == *term
                    && issue.action == NormalizationAction::KeptVerbatim
            });
            if !recorded {
                report.errors.push(Finding::new(
                    record_field,
                    "unrecorded_term",
                    format!("{term:?} is not a canonical {} term and has no normalization issue", scheme.field_name()),
                ));
            }
        }
    }

    for (field, choice) in &fields.visibility.field_overrides {
        if field == "owner_contact" {
            if *choice == FieldOverride::Expose {
                report.errors.push(Finding::new(
                    "visibility.field_overrides",
                    "contact_never_public",
                    "owner_contact cannot be exposed",
                ));
            }
        } else if !is_overridable(field) {
            report.errors.push(Finding::new(
                "visibility.field_overrides",
                "unknown_field",
                format!("no overridable field named {field:?}"),
            ));
        }
    }

    if tier == Tier::Limited && blank(&fields.description) {
        report.warnings.push(Finding::new(
            "description",
            "missing_public_field",
            "limited records show their description publicly, but none was given",
        ));
    }

    report
}

fn list_field<'a>(draft: &'a RecordDraft, field: &str) -> &'a [String] {
    let f = &draft.fields;
    match field {
        "content_types" => &f.content_types,
        "physical_formats" => &f.physical_formats,
        "genres" => &f.genres,
        "languages" => &f.languages,
        _ => &[],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::testing::sample_record;
    use crate::model::DateSpan;

    const NOW: i32 = 2026;

    fn codes(findings: &[Finding]) -> Vec<(&str, &str)> {
        findings.iter().map(|f| (f.field.as_str(), f.code.as_str())).collect()
    }

    fn check(draft: &RecordDraft) -> ValidationReport {
        validate_record_at(draft, &Vocabularies::builtin(), NOW)
    }

    #[test]
    fn fully_populated_draft_is_clean() {
        for tier in [Tier::Public, Tier::Limited, Tier::Restricted] {
            let report = check(&sample_record(tier).draft());
            assert_eq!(report, ValidationReport::default(), "{tier}");
        }
    }

    #[test]
    fn empty_title() {
        let mut draft = sample_record(Tier::Public).draft();
        draft.fields.title = "   ".into();
        assert_eq!(codes(&check(&draft).errors), vec![("title", "empty")]);
    }

    #[test]
    fn inverted_span() {
        let mut draft = sample_record(Tier::Public).draft();
        draft.fields.date_span = Some(DateSpan { begin_year: 1950, end_year: 1940, approximate: false });
        assert_eq!(codes(&check(&draft).errors), vec![("date_span", "inverted")]);
    }

    #[test]
    fn span_bounds() {
        let mut draft = sample_record(Tier::Public).draft();
        draft.fields.date_span = Some(DateSpan { begin_year: 1880, end_year: 2030, approximate: false });
        assert_eq!(codes(&check(&draft).errors), vec![("date_span", "out_of_range")]);
    }

    #[test]
    fn limited_without_description_warns() {
        let mut draft = sample_record(Tier::Limited).draft();
        draft.fields.description = None;
        let report = check(&draft);
        assert!(report.errors.is_empty());
        assert!(report.is_publishable());
        assert_eq!(codes(&report.warnings), vec![("description", "missing_public_field")]);
    }

    #[test]
    fn repository_required_unless_restricted() {
        let mut draft = sample_record(Tier::Limited).draft();
        draft.fields.repository_name = Some(" ".into());
        assert_eq!(codes(&check(&draft).errors), vec![("repository_name", "required_for_tier")]);
        draft.fields.visibility.tier = Tier::Restricted;
        assert!(check(&draft).errors.is_empty());
    }

    #[test]
    fn non_canonical_terms_need_a_trail() {
        let mut draft = sample_record(Tier::Public).draft();
        draft.fields.physical_formats.push("wax cylinder photograph".into());
        assert_eq!(codes(&check(&draft).errors), vec![("physical_formats", "unrecorded_term")]);
        draft.normalization_issues.push(NormalizationIssue {
            field: "physical_formats".into(),
            raw_value: "wax cylinder photograph".into(),
            action: NormalizationAction::KeptVerbatim,
        });
        assert!(check(&draft).errors.is_empty());
    }

    #[test]
    fn override_rules() {
        let mut draft = sample_record(Tier::Public).draft();
        let overrides = &mut draft.fields.visibility.field_overrides;
        overrides.insert("owner_contact".into(), FieldOverride::Expose);
        overrides.insert("shoe_size".into(), FieldOverride::Hide);
        overrides.insert("notes".into(), FieldOverride::Hide);
        assert_eq!(
            codes(&check(&draft).errors),
            vec![
                ("visibility.field_overrides", "contact_never_public"),
                ("visibility.field_overrides", "unknown_field")
            ]
        );
    }
}
