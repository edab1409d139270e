//! Sharing tiers, per-field overrides and redaction.
//!
//! Every public surface (search, record pages, snapshots, statistics) is
//! computed from the [`PublicView`] returned by [`redact`], never from the
//! stored record directly.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::record::{CollectionRecord, RecordFields, DESCRIPTIVE_FIELDS};

#[derive(Serialize, Deserialize, Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    /// Everything except the owner contact is public.
    Public,
    /// Only id, title, owner and description are public.
    Limited,
    /// Documented internally, invisible publicly.
    #[default]
    Restricted,
}

impl Tier {
    pub fn as_str(self) -> &'static str {
        match self {
            Tier::Public => "public",
            Tier::Limited => "limited",
            Tier::Restricted => "restricted",
        }
    }
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Tier {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "public" => Ok(Tier::Public),
            "limited" => Ok(Tier::Limited),
            "restricted" => Ok(Tier::Restricted),
            other => Err(format!("unknown tier {other:?}")),
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum FieldOverride {
    Expose,
    Hide,
}

#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct VisibilityPolicy {
    pub tier: Tier,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub field_overrides: BTreeMap<String, FieldOverride>,
}

impl VisibilityPolicy {
    pub fn tier(tier: Tier) -> Self {
        VisibilityPolicy {
            tier,
            field_overrides: BTreeMap::new(),
        }
    }
}

/// Fields a Limited record shows publicly besides `id` and `tier`.
pub const LIMITED_FIELDS: &[&str] = &["title", "repository_name", "description"];

/// Fields that may carry an override. Anything else (including
/// `owner_contact`) is rejected by validation.
pub fn is_overridable(field: &str) -> bool {
    DESCRIPTIVE_FIELDS.contains(&field)
}

/// Who is looking at a record.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Viewer<'a> {
    Public,
    /// A contributor, identified by principal name.
    Contributor(&'a str),
    Curator,
}

/// The publicly visible projection of a record: a flat JSON object holding
/// `id`, `tier` and exactly the exposed descriptive fields (absent values
/// appear as `null`).
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
#[serde(transparent)]
pub struct PublicView(BTreeMap<String, Value>);

#[derive(Clone, Debug, PartialEq)]
pub enum View {
    Full(Box<CollectionRecord>),
    Public(PublicView),
    NotVisible,
}

impl PublicView {
    pub fn from_map(map: BTreeMap<String, Value>) -> Result<Self, String> {
        match (map.get("id"), map.get("tier")) {
            (Some(Value::String(_)), Some(Value::String(t))) if t.parse::<Tier>().is_ok() => {
                Ok(PublicView(map))
            }
            _ => Err("public view needs string id and tier".into()),
        }
    }

    pub fn id(&self) -> &str {
        self.0["id"].as_str().expect("view id is a string")
    }

    pub fn tier(&self) -> Tier {
        self.0["tier"]
            .as_str()
            .and_then(|t| t.parse().ok())
            .expect("view tier is valid")
    }

    pub fn get(&self, field: &str) -> Option<&Value> {
        self.0.get(field).filter(|v| !v.is_null())
    }

    pub fn str_field(&self, field: &str) -> Option<&str> {
        self.get(field).and_then(Value::as_str)
    }

    pub fn has_field(&self, field: &str) -> bool {
        self.0.contains_key(field)
    }

    pub fn field_names(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    /// String items of a list-valued field.
    pub fn list_field(&self, field: &str) -> Vec<&str> {
        match self.get(field) {
            Some(Value::Array(items)) => items.iter().filter_map(Value::as_str).collect(),
            _ => Vec::new(),
        }
    }

    pub fn as_map(&self) -> &BTreeMap<String, Value> {
        &self.0
    }

    /// Canonical single-line JSON (sorted keys, no whitespace).
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(&self.0).expect("view serializes")
    }
}

/// Field names visible to the public for a given policy, sorted.
pub fn public_field_names(policy: &VisibilityPolicy) -> Vec<&'static str> {
    let overridden = |field: &str| policy.field_overrides.get(field).copied();
    let mut names: Vec<&'static str> = match policy.tier {
        Tier::Restricted => return Vec::new(),
        Tier::Public => DESCRIPTIVE_FIELDS
            .iter()
            .copied()
            .filter(|f| overridden(f) != Some(FieldOverride::Hide))
            .collect(),
        Tier::Limited => DESCRIPTIVE_FIELDS
            .iter()
            .copied()
            .filter(|f| LIMITED_FIELDS.contains(f) || overridden(f) == Some(FieldOverride::Expose))
            .collect(),
    };
    names.extend(["id", "tier"]);
    names.sort_unstable();
    names
}

/// Projects `record` for `viewer`.
///
/// Curators and the contributor who supplied a record see it whole. Everyone
/// else gets the tier projection; restricted and tombstoned records are not
/// visible at all.
pub fn redact(record: &CollectionRecord, viewer: Viewer<'_>) -> View {
    let owner = matches!(viewer, Viewer::Contributor(name) if record.contributor.as_deref() == Some(name));
    if viewer == Viewer::Curator || owner {
        return View::Full(Box::new(record.clone()));
    }
    match public_view(record) {
        Some(view) => View::Public(view),
        None => View::NotVisible,
    }
}

/// The public projection, or `None` when the record is not publicly visible.
pub fn public_view(record: &CollectionRecord) -> Option<PublicView> {
    if !record.is_published() || record.tier() == Tier::Restricted {
        return None;
    }
    let mut all = match serde_json::to_value(&record.fields).expect("fields serialize") {
        Value::Object(map) => map,
        _ => unreachable!("record fields serialize to an object"),
    };
    let mut out = BTreeMap::new();
    for name in public_field_names(&record.fields.visibility) {
        let value = match name {
            "id" => Value::String(record.id.clone()),
            "tier" => Value::String(record.tier().as_str().to_string()),
            field => all.remove(field).unwrap_or(Value::Null),
        };
        out.insert(name.to_string(), value);
    }
    Some(PublicView(out))
}

/// The record as a public holder could store it: every field its public
/// view does not show is cleared. Redacting this again yields the same view.
pub fn redacted_record(record: &CollectionRecord) -> CollectionRecord {
    let mut out = record.clone();
    out.contributor = None;
    out.normalization_issues.clear();
    let keep = public_field_names(&record.fields.visibility);
    let mut fields = match serde_json::to_value(&record.fields).expect("fields serialize") {
        Value::Object(map) => map,
        _ => unreachable!(),
    };
    let defaults = match serde_json::to_value(RecordFields::default()).expect("defaults serialize") {
        Value::Object(map) => map,
        _ => unreachable!(),
    };
    for (name, default) in defaults {
        if name != "visibility" && !keep.contains(&name.as_str()) {
            fields.insert(name, default);
        }
    }
    out.fields = serde_json::from_value(Value::Object(fields)).expect("cleared fields deserialize");
    out
}
