use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::model::PublicView;

/// Aggregate figures over publicly visible records. Every visible record
/// counts toward the total; breakdowns only use fields its view exposes.
#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub total_collections: usize,
    pub by_repository_type: BTreeMap<String, usize>,
    pub by_region: BTreeMap<String, usize>,
    /// Sum of extents measured in recordings.
    pub estimated_total_recordings: u64,
}

pub fn compute_stats<'a>(views: impl IntoIterator<Item = &'a PublicView>) -> Stats {
    let mut stats = Stats::default();
    for view in views {
        stats.total_collections += 1;
        if let Some(kind) = view.str_field("repository_type") {
            *stats.by_repository_type.entry(kind.to_string()).or_default() += 1;
        }
        if let Some(region) = view
            .get("location")
            .and_then(|l| l.get("region"))
            .and_then(Value::as_str)
            .filter(|r| !r.is_empty())
        {
            *stats.by_region.entry(region.to_string()).or_default() += 1;
        }
        let extent = view.get("extent");
        if extent.and_then(|e| e.get("unit")).and_then(Value::as_str) == Some("recordings") {
            stats.estimated_total_recordings += extent.and_then(|e| e.get("count")).and_then(Value::as_u64).unwrap_or(0);
        }
    }
    stats
}
