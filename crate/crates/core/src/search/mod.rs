//! Full-text and faceted search over public views.
//!
//! Scoring is BM25 (k1 = 1.2, b = 0.75) over weighted term frequencies:
//! title tokens count 3, repository name tokens 2, other exposed text 1.
//! A document's length is its weighted token total. Queries are
//! conjunctive: every query token must occur in a hit.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::model::{DateSpan, PublicView};

mod handle;
mod index;
mod stats;

pub use handle::IndexHandle;
pub use index::{build_index, Index, IndexError};
pub use stats::{compute_stats, Stats};

pub const K1: f64 = 1.2;
pub const B: f64 = 0.75;
pub const TITLE_WEIGHT: f64 = 3.0;
pub const REPOSITORY_WEIGHT: f64 = 2.0;
pub const MAX_PAGE_SIZE: usize = 100;
pub const DEFAULT_PAGE_SIZE: usize = 20;

/// Facet names, in response order.
pub const FACETS: &[&str] = &[
    "repository_type",
    "region",
    "content_type",
    "physical_format",
    "genre",
    "language",
    "decade",
    "accessibility",
];

/// View fields indexed at weight 1. `location` and `condition` contribute
/// their city, region and note.
pub const TEXT_FIELDS: &[&str] = &[
    "description",
    "creators",
    "location",
    "content_types",
    "physical_formats",
    "genres",
    "languages",
    "access_statement",
    "usage_statement",
    "inventory_description",
    "supporting_documentation",
    "historical_relevance",
    "notes",
    "condition",
];

/// Lowercases and splits on anything that is not a letter or digit;
/// tokens shorter than two characters are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= 2)
        .map(str::to_lowercase)
        .collect()
}

/// Strings held by one exposed view field.
pub fn field_texts<'v>(view: &'v PublicView, field: &str) -> Vec<&'v str> {
    match view.get(field) {
        Some(Value::String(s)) => vec![s.as_str()],
        Some(Value::Array(items)) => items.iter().filter_map(Value::as_str).collect(),
        Some(Value::Object(map)) => ["city", "region", "note"]
            .iter()
            .filter_map(|k| map.get(*k).and_then(Value::as_str))
            .collect(),
        _ => Vec::new(),
    }
}

/// Values a view contributes to a facet. Only exposed fields count.
pub fn facet_values(view: &PublicView, facet: &str) -> Vec<String> {
    let strings = |field: &str| view.list_field(field).into_iter().map(str::to_string).collect();
    let mut values: Vec<String> = match facet {
        "repository_type" | "accessibility" => view.str_field(facet).map(str::to_string).into_iter().collect(),
        "region" => view
            .get("location")
            .and_then(|l| l.get("region"))
            .and_then(Value::as_str)
            .filter(|r| !r.is_empty())
            .map(str::to_string)
            .into_iter()
            .collect(),
        "content_type" => strings("content_types"),
        "physical_format" => strings("physical_formats"),
        "genre" => strings("genres"),
        "language" => strings("languages"),
        "decade" => view
            .get("date_span")
            .and_then(|v| serde_json::from_value::<DateSpan>(v.clone()).ok())
            .map(|span| span.decades())
            .unwrap_or_default(),
        _ => Vec::new(),
    };
    values.sort();
    values.dedup();
    values
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct SearchQuery {
    #[serde(default)]
    pub q: String,
    /// facet -> accepted values. Values of one facet are alternatives;
    /// different facets must all match.
    #[serde(default)]
    pub facet_filters: BTreeMap<String, Vec<String>>,
    pub page: usize,
    pub page_size: usize,
}

impl Default for SearchQuery {
    fn default() -> Self {
        SearchQuery {
            q: String::new(),
            facet_filters: BTreeMap::new(),
            page: 1,
            page_size: DEFAULT_PAGE_SIZE,
        }
    }
}

impl SearchQuery {
    pub fn text(q: impl Into<String>) -> Self {
        SearchQuery {
            q: q.into(),
            ..Default::default()
        }
    }

    pub fn filter(mut self, facet: impl Into<String>, value: impl Into<String>) -> Self {
        self.facet_filters.entry(facet.into()).or_default().push(value.into());
        self
    }

    pub fn page(mut self, page: usize, page_size: usize) -> Self {
        self.page = page;
        self.page_size = page_size;
        self
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.page == 0 {
            return Err(SearchError::InvalidPage);
        }
        if !(1..=MAX_PAGE_SIZE).contains(&self.page_size) {
            return Err(SearchError::InvalidPageSize(self.page_size));
        }
        match self.facet_filters.keys().find(|f| !FACETS.contains(&f.as_str())) {
            Some(unknown) => Err(SearchError::UnknownFacet(unknown.clone())),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("unknown facet field {0:?}")]
    UnknownFacet(String),
    #[error("page must be at least 1")]
    InvalidPage,
    #[error("page_size {0} is outside 1..=100")]
    InvalidPageSize(usize),
}

impl SearchError {
    pub fn code(&self) -> &'static str {
        match self {
            SearchError::UnknownFacet(_) => "unknown_facet",
            SearchError::InvalidPage => "invalid_page",
            SearchError::InvalidPageSize(_) => "invalid_page_size",
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct Hit {
    pub id: String,
    pub score: f64,
    pub title: Option<String>,
    pub repository_name: Option<String>,
    pub snippet: Option<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq, Eq)]
pub struct FacetCount {
    pub value: String,
    pub count: usize,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct SearchResult {
    pub total_hits: usize,
    pub hits: Vec<Hit>,
    /// Every facet, values ordered by count descending then value.
    pub facet_counts: BTreeMap<String, Vec<FacetCount>>,
    pub page: usize,
    pub page_size: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizer_examples() {
        assert_eq!(tokenize("Jazz broadcasts, 1947!"), vec!["jazz", "broadcasts", "1947"]);
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("KDKA-AM"), vec!["kdka", "am"]);
        assert_eq!(tokenize("a b Ö Öl"), vec!["öl"]);
    }

    #[test]
    fn query_validation() {
        assert!(SearchQuery::default().validate().is_ok());
        assert_eq!(
            SearchQuery::default().filter("bogus", "x").validate(),
            Err(SearchError::UnknownFacet("bogus".into()))
        );
        assert_eq!(SearchQuery::default().page(0, 10).validate(), Err(SearchError::InvalidPage));
        assert_eq!(SearchQuery::default().page(1, 101).validate(), Err(SearchError::InvalidPageSize(101)));
        assert_eq!(SearchQuery::default().page(1, 0).validate(), Err(SearchError::InvalidPageSize(0)));
    }
}
