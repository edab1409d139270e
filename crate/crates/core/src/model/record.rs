//! Collection-level record types.

use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::dates::DateSpan;
use super::privacy::VisibilityPolicy;

macro_rules! string_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        #[serde(rename_all = "snake_case")]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = UnknownVariant;

            /// Accepts the snake_case name as well as free-form spellings
            /// such as "Public Broadcaster" or "by-appointment".
            fn from_str(raw: &str) -> Result<Self, Self::Err> {
                let key = enum_key(raw);
                $name::ALL
                    .iter()
                    .copied()
                    .find(|v| v.as_str() == key)
                    .ok_or_else(|| UnknownVariant { kind: stringify!($name), raw: raw.to_string() })
            }
        }
    };
}

fn enum_key(raw: &str) -> String {
    raw.trim()
        .to_lowercase()
        .split(|c: char| c.is_whitespace() || c == '-' || c == '_')
        .filter(|s| !s.is_empty())
        .collect::<Vec<_>>()
        .join("_")
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown {kind} value {raw:?}")]
pub struct UnknownVariant {
    pub kind: &'static str,
    pub raw: String,
}

string_enum!(
    /// Kind of institution or person holding a collection.
    RepositoryType {
        University => "university",
        PublicBroadcaster => "public_broadcaster",
        CommercialStation => "commercial_station",
        HistoricalSociety => "historical_society",
        Museum => "museum",
        StateArchive => "state_archive",
        FederalArchive => "federal_archive",
        PrivateCollector => "private_collector",
        CommunityOrg => "community_org",
        Other => "other",
    }
);

string_enum!(
    Accessibility {
        Open => "open",
        ByAppointment => "by_appointment",
        Restricted => "restricted",
        Unknown => "unknown",
    }
);

string_enum!(
    ExtentUnit {
        Recordings => "recordings",
        Hours => "hours",
        LinearFeet => "linear_feet",
        Items => "items",
    }
);

string_enum!(
    ConditionGrade {
        Good => "good",
        Fair => "fair",
        Poor => "poor",
        Mixed => "mixed",
        Unknown => "unknown",
    }
);

string_enum!(
    /// Where a record's data originally came from.
    SourceKind {
        SurveyCsv => "survey_csv",
        Form => "form",
        Ead => "ead",
        PrintGuide => "print_guide",
        Api => "api",
    }
);

string_enum!(
    RecordStatus {
        Published => "published",
        Tombstoned => "tombstoned",
    }
);

impl Default for RepositoryType {
    fn default() -> Self {
        RepositoryType::Other
    }
}

impl Default for Accessibility {
    fn default() -> Self {
        Accessibility::Unknown
    }
}

impl Default for ConditionGrade {
    fn default() -> Self {
        ConditionGrade::Unknown
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Location {
    #[serde(default)]
    pub city: Option<String>,
    /// State or territory code.
    #[serde(default)]
    pub region: Option<String>,
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Extent {
    pub count: u64,
    pub unit: ExtentUnit,
}

#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct Condition {
    #[serde(default)]
    pub grade: ConditionGrade,
    #[serde(default)]
    pub note: Option<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FindingAid {
    #[serde(default)]
    pub exists: bool,
    #[serde(default)]
    pub url: Option<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub source: SourceKind,
    pub source_detail: String,
}

/// The descriptive part of a collection record: everything a contributor or
/// curator can edit. Also serves as the draft shape before publication.
#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RecordFields {
    #[serde(default)]
    pub title: String,
    /// Scope-and-content summary.
    #[serde(default)]
    pub description: Option<String>,
    #[serde(default)]
    pub repository_name: Option<String>,
    #[serde(default)]
    pub repository_type: RepositoryType,
    #[serde(default)]
    pub location: Location,
    /// Private at every tier.
    #[serde(default)]
    pub owner_contact: Option<String>,
    #[serde(default)]
    pub accessibility: Accessibility,
    #[serde(default)]
    pub access_statement: Option<String>,
    #[serde(default)]
    pub usage_statement: Option<String>,
    #[serde(default)]
    pub creators: Vec<String>,
    #[serde(default)]
    pub date_span: Option<DateSpan>,
    #[serde(default)]
    pub content_types: Vec<String>,
    #[serde(default)]
    pub physical_formats: Vec<String>,
    #[serde(default)]
    pub languages: Vec<String>,
    #[serde(default)]
    pub genres: Vec<String>,
    #[serde(default)]
    pub extent: Option<Extent>,
    #[serde(default)]
    pub condition: Condition,
    #[serde(default)]
    pub finding_aid: FindingAid,
    #[serde(default)]
    pub inventory_description: Option<String>,
    #[serde(default)]
    pub supporting_documentation: Option<String>,
    #[serde(default)]
    pub historical_relevance: Option<String>,
    #[serde(default)]
    pub notes: Option<String>,
    #[serde(default)]
    pub visibility: VisibilityPolicy,
}

/// Descriptive field names that can appear in a public view, in
/// serialization order. `owner_contact` and `visibility` are never listed.
pub const DESCRIPTIVE_FIELDS: &[&str] = &[
    "title",
    "description",
    "repository_name",
    "repository_type",
    "location",
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
];

/// What a normalizer did with a raw value it could not take as-is.
#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[serde(rename_all = "snake_case")]
pub enum NormalizationAction {
    /// No canonical term matched; the raw term is stored verbatim.
    KeptVerbatim,
    /// Matched a canonical term within one edit; the raw value is kept here.
    Corrected,
    /// Could not be parsed; the field was left empty.
    Unparsed,
    /// Value was derived from another field.
    Derived,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct NormalizationIssue {
    pub field: String,
    pub raw_value: String,
    pub action: NormalizationAction,
}

/// Record fields plus the normalization trail that produced them.
#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq, Eq)]
pub struct RecordDraft {
    pub fields: RecordFields,
    #[serde(default)]
    pub normalization_issues: Vec<NormalizationIssue>,
}

impl RecordDraft {
    pub fn new(fields: RecordFields) -> Self {
        RecordDraft {
            fields,
            normalization_issues: Vec::new(),
        }
    }
}

/// A published (or tombstoned) collection-level description.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct CollectionRecord {
    pub id: String,
    pub fields: RecordFields,
    #[serde(default)]
    pub normalization_issues: Vec<NormalizationIssue>,
    pub provenance: Provenance,
    pub status: RecordStatus,
    pub revision: u64,
    pub created_at: DateTime<Utc>,
    pub updated_at: DateTime<Utc>,
    /// Name of the contributor principal who submitted the data, if any.
    /// Curator-only, like `owner_contact`.
    #[serde(default)]
    pub contributor: Option<String>,
}

impl CollectionRecord {
    pub fn tier(&self) -> super::privacy::Tier {
        self.fields.visibility.tier
    }

    pub fn is_published(&self) -> bool {
        self.status == RecordStatus::Published
    }

    pub fn draft(&self) -> RecordDraft {
        RecordDraft {
            fields: self.fields.clone(),
            normalization_issues: self.normalization_issues.clone(),
        }
    }
}
