//! Domain types and pure record logic: validation, vocabulary
//! normalization, date parsing and privacy redaction.

mod dates;
mod privacy;
mod record;
mod validate;
mod vocab;

#[cfg(test)]
pub(crate) mod testing;

pub use dates::{current_year, parse_date_span, parse_date_span_at, DateSpan, UnparsedDate, MIN_YEAR};
pub use privacy::{
    is_overridable, public_field_names, public_view, redact, redacted_record, FieldOverride, PublicView, Tier,
    View, Viewer, VisibilityPolicy, LIMITED_FIELDS,
};
pub use record::{
    Accessibility, CollectionRecord, Condition, ConditionGrade, Extent, ExtentUnit, FindingAid, Location,
    NormalizationAction, NormalizationIssue, Provenance, RecordDraft, RecordFields, RecordStatus, RepositoryType,
    SourceKind, UnknownVariant, DESCRIPTIVE_FIELDS,
};
pub use validate::{validate_record, validate_record_at, Finding, ValidationReport};
pub use vocab::{
    casefold, lint_dir, lint_text, normalize_term, LintFinding, MatchVia, Matching, TermMatch, Vocabularies,
    VocabError, VocabularyScheme, VOCAB_FIELDS,
};
