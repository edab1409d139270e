//! Curator edits: JSON merge patches over a draft's fields.

use serde_json::Value;

use crate::model::{
    parse_date_span_at, Finding, RecordDraft, RecordFields, ValidationReport, Vocabularies, VOCAB_FIELDS,
};

use super::StoreError;

fn date_error(raw: &str) -> StoreError {
    StoreError::Validation(ValidationReport {
        errors: vec![Finding {
            field: "date_span".into(),
            code: "unparsed".into(),
            message: format!("cannot read {raw:?} as a date span"),
        }],
        ..Default::default()
    })
}

/// Applies `patch` to `draft`. Vocabulary lists in the patch are normalized
/// and a textual `date_span` is parsed; normalization issues of every
/// patched field are replaced by the new ones.
pub(crate) fn apply_patch(
    draft: &RecordDraft,
    patch: &Value,
    vocab: &Vocabularies,
    current_year: i32,
) -> Result<RecordDraft, StoreError> {
    let Some(changes) = patch.as_object() else {
        return Err(StoreError::InvalidChange("changes must be a JSON object".into()));
    };
    let mut changes = changes.clone();
    let mut issues = Vec::new();

    if let Some(Value::String(raw)) = changes.get("date_span") {
        let span = parse_date_span_at(raw, current_year).map_err(|_| date_error(raw))?;
        changes.insert("date_span".into(), serde_json::to_value(span).expect("span serializes"));
    }
    for (record_field, _) in VOCAB_FIELDS {
        if let Some(Value::Array(items)) = changes.get(*record_field) {
            let raws: Vec<String> = items
                .iter()
                .map(|v| v.as_str().map(str::to_string))
                .collect::<Option<_>>()
                .ok_or_else(|| StoreError::InvalidChange(format!("{record_field} must be a list of strings")))?;
            let terms = vocab.normalize_list(record_field, &raws, &mut issues);
            changes.insert(record_field.to_string(), serde_json::to_value(terms).expect("terms serialize"));
        }
    }

    let mut fields = serde_json::to_value(&draft.fields).expect("fields serialize");
    json_patch::merge(&mut fields, &Value::Object(changes.clone()));
    let fields: RecordFields =
        serde_json::from_value(fields).map_err(|e| StoreError::InvalidChange(e.to_string()))?;

    let mut normalization_issues: Vec<_> = draft
        .normalization_issues
        .iter()
        .filter(|i| !changes.contains_key(&i.field))
        .cloned()
        .collect();
    normalization_issues.extend(issues);
    Ok(RecordDraft {
        fields,
        normalization_issues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::testing::sample_record;
    use crate::model::{NormalizationAction, NormalizationIssue, Tier};
    use serde_json::json;

    fn base() -> RecordDraft {
        let mut draft = sample_record(Tier::Public).draft();
        draft.normalization_issues.push(NormalizationIssue {
            field: "genres".into(),
            raw_value: "Radio dramas".into(),
            action: NormalizationAction::KeptVerbatim,
        });
        draft
    }

    #[test]
    fn merge_and_normalize() {
        let vocab = Vocabularies::builtin();
        let out = apply_patch(
            &base(),
            &json!({"genres": ["dramas", "Zydeco hour"], "notes": null, "date_span": "1950s", "location": {"city": "Ames"}}),
            &vocab,
            2026,
        )
        .unwrap();
        assert_eq!(out.fields.genres, vec!["drama", "Zydeco hour"]);
        assert_eq!(out.fields.notes, None);
        assert_eq!(out.fields.date_span.map(|d| d.begin_year), Some(1950));
        assert_eq!(out.fields.location.city.as_deref(), Some("Ames"));
        assert_eq!(out.fields.location.region.as_deref(), Some("IA"));
        let raws: Vec<_> = out.normalization_issues.iter().map(|i| i.raw_value.as_str()).collect();
        assert_eq!(raws, vec!["dramas", "Zydeco hour"]);
    }

    #[test]
    fn rejects_bad_changes() {
        let vocab = Vocabularies::builtin();
        assert!(matches!(
            apply_patch(&base(), &json!({"colour": "red"}), &vocab, 2026),
            Err(StoreError::InvalidChange(_))
        ));
        assert!(matches!(apply_patch(&base(), &json!([1]), &vocab, 2026), Err(StoreError::InvalidChange(_))));
        assert!(matches!(
            apply_patch(&base(), &json!({"date_span": "sometime"}), &vocab, 2026),
            Err(StoreError::Validation(_))
        ));
        assert!(matches!(
            apply_patch(&base(), &json!({"genres": [3]}), &vocab, 2026),
            Err(StoreError::InvalidChange(_))
        ));
    }
}
