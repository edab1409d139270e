//! Turns source-neutral raw field text into a normalized record draft.

use std::collections::BTreeMap;

use crate::model::{
    parse_date_span_at, Accessibility, ConditionGrade, Extent, ExtentUnit, NormalizationAction, NormalizationIssue,
    RecordDraft, RepositoryType, Tier, Vocabularies,
};

use super::Submitter;

/// Raw field names understood by the draft builder. Column mappings must
/// target one of these.
pub const RAW_FIELD_NAMES: &[&str] = &[
    "title",
    "description",
    "repository_name",
    "repository_type",
    "location",
    "city",
    "region",
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
    "extent_count",
    "extent_unit",
    "condition",
    "condition_note",
    "finding_aid",
    "finding_aid_url",
    "inventory_description",
    "supporting_documentation",
    "historical_relevance",
    "notes",
    "tier",
    "submitter_name",
    "submitter_email",
];

pub(crate) struct BuiltDraft {
    pub draft: RecordDraft,
    pub submitter: Option<Submitter>,
    /// (field, message) pairs for values that could not be used at all.
    pub problems: Vec<(String, String)>,
}

pub(crate) struct DraftBuilder<'a> {
    pub vocab: &'a Vocabularies,
    pub list_separator: &'a str,
    pub current_year: i32,
}

fn text(raw: &BTreeMap<String, String>, key: &str) -> Option<String> {
    raw.get(key)
        .map(|v| v.trim())
        .filter(|v| !v.is_empty())
        .map(str::to_string)
}

impl DraftBuilder<'_> {
    fn split(&self, value: &str) -> Vec<String> {
        value
            .split(self.list_separator)
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect()
    }

    pub fn build(&self, raw: &BTreeMap<String, String>) -> BuiltDraft {
        let mut issues: Vec<NormalizationIssue> = Vec::new();
        let mut problems = Vec::new();
        let mut issue = |field: &str, raw_value: &str, action| {
            issues.push(NormalizationIssue {
                field: field.to_string(),
                raw_value: raw_value.to_string(),
                action,
            })
        };
        let mut draft = RecordDraft::default();
        let f = &mut draft.fields;

        f.title = text(raw, "title").unwrap_or_default();
        f.description = text(raw, "description");
        f.repository_name = text(raw, "repository_name");
        f.owner_contact = text(raw, "owner_contact");
        f.access_statement = text(raw, "access_statement");
        f.usage_statement = text(raw, "usage_statement");
        f.inventory_description = text(raw, "inventory_description");
        f.supporting_documentation = text(raw, "supporting_documentation");
        f.historical_relevance = text(raw, "historical_relevance");
        f.notes = text(raw, "notes");

        if let Some(value) = text(raw, "repository_type") {
            match value.parse::<RepositoryType>() {
                Ok(kind) => f.repository_type = kind,
                Err(_) => issue("repository_type", &value, NormalizationAction::Unparsed),
            }
        }
        if let Some(value) = text(raw, "accessibility") {
            match parse_accessibility(&value) {
                Some(a) => f.accessibility = a,
                None => issue("accessibility", &value, NormalizationAction::Unparsed),
            }
        }

        if let Some(value) = text(raw, "location") {
            match value.rsplit_once(',') {
                Some((city, region)) => {
                    f.location.city = Some(city.trim().to_string()).filter(|s| !s.is_empty());
                    f.location.region = Some(region.trim().to_string()).filter(|s| !s.is_empty());
                }
                None if looks_like_region(&value) => f.location.region = Some(value),
                None => f.location.city = Some(value),
            }
        }
        if let Some(city) = text(raw, "city") {
            f.location.city = Some(city);
        }
        if let Some(region) = text(raw, "region") {
            f.location.region = Some(region);
        }

        if let Some(value) = text(raw, "creators") {
            f.creators = self.split(&value);
        }

        if let Some(value) = text(raw, "date_span") {
            match parse_date_span_at(&value, self.current_year) {
                Ok(span) => f.date_span = Some(span),
                Err(_) => issue("date_span", &value, NormalizationAction::Unparsed),
            }
        }

        for field in ["content_types", "physical_formats", "languages", "genres"] {
            if let Some(value) = text(raw, field) {
                let terms = self.split(&value);
                let normalized = self.vocab.normalize_list(field, &terms, &mut issues);
                let target = match field {
                    "content_types" => &mut draft.fields.content_types,
                    "physical_formats" => &mut draft.fields.physical_formats,
                    "languages" => &mut draft.fields.languages,
                    _ => &mut draft.fields.genres,
                };
                *target = normalized;
            }
        }
        let f = &mut draft.fields;
        let mut issue = |field: &str, raw_value: &str, action| {
            issues.push(NormalizationIssue {
                field: field.to_string(),
                raw_value: raw_value.to_string(),
                action,
            })
        };

        if let Some(value) = text(raw, "extent") {
            match parse_extent(&value) {
                Some(extent) => f.extent = Some(extent),
                None => issue("extent", &value, NormalizationAction::Unparsed),
            }
        }
        match (text(raw, "extent_count"), text(raw, "extent_unit")) {
            (None, None) => {}
            (count, unit) => {
                let joined = format!("{} {}", count.clone().unwrap_or_default(), unit.clone().unwrap_or_default());
                match parse_extent(&joined) {
                    Some(extent) => f.extent = Some(extent),
                    None => issue("extent", joined.trim(), NormalizationAction::Unparsed),
                }
            }
        }

        if let Some(value) = text(raw, "condition") {
            match value.parse::<ConditionGrade>() {
                Ok(grade) => f.condition.grade = grade,
                Err(_) => {
                    // Free-text condition: keep it as the note.
                    f.condition.note = Some(value.clone());
                    issue("condition", &value, NormalizationAction::Unparsed);
                }
            }
        }
        if let Some(note) = text(raw, "condition_note") {
            f.condition.note = Some(note);
        }

        if let Some(value) = text(raw, "finding_aid") {
            let folded = value.to_lowercase();
            if is_url(&value) {
                f.finding_aid.exists = true;
                f.finding_aid.url = Some(value);
            } else if matches!(folded.as_str(), "yes" | "y" | "true" | "available") {
                f.finding_aid.exists = true;
            } else if matches!(folded.as_str(), "no" | "n" | "false" | "none") {
                f.finding_aid.exists = false;
            } else {
                f.finding_aid.exists = true;
                f.finding_aid.url = value.split_whitespace().find(|w| is_url(w)).map(str::to_string);
                issue("finding_aid", &value, NormalizationAction::Unparsed);
            }
        }
        if let Some(url) = text(raw, "finding_aid_url") {
            f.finding_aid.exists = true;
            f.finding_aid.url = Some(url);
        }

        if let Some(value) = text(raw, "tier") {
            match value.parse::<Tier>() {
                Ok(tier) => f.visibility.tier = tier,
                Err(message) => problems.push(("tier".to_string(), message)),
            }
        }

        let submitter = match (text(raw, "submitter_name"), text(raw, "submitter_email")) {
            (None, None) => None,
            (name, email) => Some(Submitter {
                name: name.unwrap_or_default(),
                email: email.unwrap_or_default(),
            }),
        };

        draft.normalization_issues = issues;
        BuiltDraft {
            draft,
            submitter,
            problems,
        }
    }
}

fn parse_accessibility(value: &str) -> Option<Accessibility> {
    value.parse().ok().or_else(|| {
        let folded = value.to_lowercase();
        if folded.contains("appointment") {
            Some(Accessibility::ByAppointment)
        } else {
            None
        }
    })
}

fn looks_like_region(value: &str) -> bool {
    value.len() == 2 && value.bytes().all(|b| b.is_ascii_uppercase())
}

fn is_url(value: &str) -> bool {
    value.starts_with("http://") || value.starts_with("https://")
}

/// "1,200 recordings", "35 hours", "12 linear feet".
pub(crate) fn parse_extent(value: &str) -> Option<Extent> {
    let value = value.trim();
    let split = value.find(|c: char| !(c.is_ascii_digit() || c == ','))?;
    let (number, unit) = value.split_at(split);
    let digits: String = number.chars().filter(|c| *c != ',').collect();
    if digits.is_empty() {
        return None;
    }
    let count = digits.parse().ok()?;
    let unit = match unit.trim().to_lowercase().as_str() {
        "recording" | "recordings" => ExtentUnit::Recordings,
        "hour" | "hours" => ExtentUnit::Hours,
        "linear foot" | "linear feet" | "linear_feet" | "lin. ft." => ExtentUnit::LinearFeet,
        "item" | "items" => ExtentUnit::Items,
        _ => return None,
    };
    Some(Extent { count, unit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{DateSpan, Tier};

    fn build(pairs: &[(&str, &str)]) -> BuiltDraft {
        let vocab = Vocabularies::builtin();
        let raw = pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        DraftBuilder {
            vocab: &vocab,
            list_separator: ";",
            current_year: 2026,
        }
        .build(&raw)
    }

    #[test]
    fn lists_are_split_and_normalized() {
        let built = build(&[("physical_formats", "Reel to Reel; transcription disc")]);
        assert_eq!(built.draft.fields.physical_formats, vec!["reel-to-reel tape", "transcription disc"]);
        assert!(built.draft.normalization_issues.is_empty());
    }

    #[test]
    fn unparsed_values_leave_a_trail() {
        let built = build(&[("date_span", "unknown"), ("extent", "lots"), ("genres", "dramas")]);
        let actions: Vec<_> = built
            .draft
            .normalization_issues
            .iter()
            .map(|i| (i.field.as_str(), i.raw_value.as_str(), i.action))
            .collect();
        assert_eq!(
            actions,
            vec![
                ("date_span", "unknown", NormalizationAction::Unparsed),
                ("genres", "dramas", NormalizationAction::Corrected),
                ("extent", "lots", NormalizationAction::Unparsed),
            ]
        );
        assert_eq!(built.draft.fields.genres, vec!["drama"]);
    }

    #[test]
    fn scalar_fields() {
        let built = build(&[
            ("title", "  WXYZ Discs "),
            ("location", "Dubuque, IA"),
            ("date_span", "circa 1940s"),
            ("extent", "1,200 recordings"),
            ("finding_aid", "https://example.org/fa"),
            ("tier", "Limited"),
            ("accessibility", "By appointment only"),
        ]);
        let f = &built.draft.fields;
        assert_eq!(f.title, "WXYZ Discs");
        assert_eq!(f.location.city.as_deref(), Some("Dubuque"));
        assert_eq!(f.location.region.as_deref(), Some("IA"));
        assert_eq!(f.date_span, Some(DateSpan { begin_year: 1940, end_year: 1949, approximate: true }));
        assert_eq!(f.extent, Some(Extent { count: 1200, unit: ExtentUnit::Recordings }));
        assert!(f.finding_aid.exists);
        assert_eq!(f.visibility.tier, Tier::Limited);
        assert_eq!(f.accessibility, Accessibility::ByAppointment);
    }

    #[test]
    fn bad_tier_is_a_problem() {
        let built = build(&[("tier", "secret")]);
        assert_eq!(built.problems.len(), 1);
        assert_eq!(built.draft.fields.visibility.tier, Tier::Restricted);
    }
}
