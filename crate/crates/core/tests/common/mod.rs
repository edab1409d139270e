#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::OnceLock;

use atlas::api::{router, AppState, TokenTable};
use atlas::ingest::IncomingSubmission;
use atlas::model::{
    validate_record_at, DateSpan, Provenance, PublicView, RecordDraft, SourceKind, Vocabularies,
};
use atlas::search::{Index, SearchQuery, MAX_PAGE_SIZE};
use atlas::store::{Catalog, CatalogOptions, Principal};
use axum::body::Body;
use axum::http::{HeaderMap, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use rand::seq::IndexedRandom;
use rand::Rng;
use regex::Regex;
use serde_json::Value;
use tower::ServiceExt;

pub const CURATOR_TOKEN: &str = "test-curator-token";
pub const CONTRIBUTOR_TOKEN: &str = "test-contributor-token";

pub fn tokens() -> TokenTable {
    let mut table = TokenTable::default();
    table.insert(CURATOR_TOKEN, Principal::curator("mara"));
    table.insert(CONTRIBUTOR_TOKEN, Principal::contributor("ada"));
    table
}

pub fn incoming(draft: RecordDraft) -> IncomingSubmission {
    let report = validate_record_at(&draft, &Vocabularies::builtin(), 2026);
    IncomingSubmission {
        raw_fields: BTreeMap::new(),
        requested_tier: draft.fields.visibility.tier,
        proposed: draft,
        report,
        submitter: None,
        source: Provenance {
            source: SourceKind::Form,
            source_detail: "test".into(),
        },
    }
}

/// Queues and approves every draft; returns the new record ids in order.
pub fn publish_all(catalog: &Catalog, drafts: Vec<RecordDraft>) -> Vec<String> {
    let queued = catalog
        .submit_all(drafts.into_iter().map(|d| (incoming(d), None)).collect())
        .expect("submit");
    let curator = Principal::curator("mara");
    queued
        .iter()
        .map(|s| catalog.approve(&s.submission_id, &curator, None, None).expect("approve").id.clone())
        .collect()
}

pub fn catalog_with(drafts: Vec<RecordDraft>) -> (Catalog, Vec<String>) {
    let catalog = Catalog::in_memory(CatalogOptions::default());
    let ids = publish_all(&catalog, drafts);
    (catalog, ids)
}

pub fn app(catalog: Catalog) -> Router {
    router(AppState::new(catalog, tokens()).expect("index builds"))
}

pub struct Reply {
    pub status: StatusCode,
    pub headers: HeaderMap,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.body).unwrap_or_else(|e| panic!("{e}: {}", self.text()))
    }

    pub fn text(&self) -> String {
        String::from_utf8_lossy(&self.body).into_owned()
    }

    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers.get(name).and_then(|v| v.to_str().ok())
    }
}

pub async fn call(app: &Router, method: Method, uri: &str, token: Option<&str>, body: Option<&Value>) -> Reply {
    let mut request = Request::builder().method(method).uri(uri);
    if let Some(token) = token {
        request = request.header("authorization", format!("Bearer {token}"));
    }
    let body = match body {
        Some(value) => {
            request = request.header("content-type", "application/json");
            Body::from(serde_json::to_vec(value).unwrap())
        }
        None => Body::empty(),
    };
    let response = app.clone().oneshot(request.body(body).unwrap()).await.expect("infallible service");
    let status = response.status();
    let headers = response.headers().clone();
    let body = response.into_body().collect().await.unwrap().to_bytes().to_vec();
    Reply { status, headers, body }
}

pub async fn get(app: &Router, uri: &str, token: Option<&str>) -> Reply {
    call(app, Method::GET, uri, token, None).await
}

/// Percent-encodes a query parameter value.
pub fn enc(value: &str) -> String {
    let mut out = String::new();
    for b in value.bytes() {
        if b.is_ascii_alphanumeric() || b"-_.~".contains(&b) {
            out.push(b as char);
        } else {
            out.push_str(&format!("%{b:02X}"));
        }
    }
    out
}

/// Every hit of a query, page by page.
pub fn all_hits(index: &Index, query: &SearchQuery) -> Vec<(String, f64)> {
    let mut out = Vec::new();
    for page in 1.. {
        let result = index.search(&query.clone().page(page, MAX_PAGE_SIZE)).unwrap();
        if result.hits.is_empty() {
            break;
        }
        out.extend(result.hits.into_iter().map(|h| (h.id, h.score)));
    }
    out
}

/// Checks total, facet counts, hit order and scores (within 1e-9).
pub fn compare_with_oracle(index: &Index, corpus: &oracle::Corpus<'_>, query: &SearchQuery) -> Result<(), String> {
    let expected = corpus.search(&query.q, &query.facet_filters);
    let first = index.search(&query.clone().page(1, MAX_PAGE_SIZE)).map_err(|e| e.to_string())?;
    if first.total_hits != expected.total_hits {
        return Err(format!("{query:?}: total {} vs {}", first.total_hits, expected.total_hits));
    }
    let counts: BTreeMap<String, Vec<(String, usize)>> = first
        .facet_counts
        .into_iter()
        .map(|(facet, list)| (facet, list.into_iter().map(|c| (c.value, c.count)).collect()))
        .collect();
    if counts != expected.facet_counts {
        return Err(format!("{query:?}: facet counts differ"));
    }
    let got = all_hits(index, query);
    let got_ids: Vec<&str> = got.iter().map(|h| h.0.as_str()).collect();
    let want_ids: Vec<&str> = expected.hits.iter().map(|h| h.0.as_str()).collect();
    if got_ids != want_ids {
        return Err(format!("{query:?}: hit order differs"));
    }
    for ((id, a), (_, b)) in got.iter().zip(&expected.hits) {
        if (a - b).abs() > 1e-9 {
            return Err(format!("{query:?}: score of {id} is {a}, oracle says {b}"));
        }
    }
    Ok(())
}

/// A query built from tokens and facet values that occur in the corpus.
pub fn random_query(rng: &mut impl Rng, views: &[PublicView]) -> SearchQuery {
    let mut query = SearchQuery::default();
    if !views.is_empty() {
        let doc = views.choose(rng).unwrap();
        let (terms, _) = oracle::weighted_terms(doc);
        let mut terms: Vec<String> = terms.into_keys().collect();
        terms.sort();
        let count = rng.random_range(0..=2);
        let picked: Vec<String> = terms.choose_multiple(rng, count).cloned().collect();
        query.q = picked.join(" ");
        for _ in 0..rng.random_range(0..=2) {
            let facet = *oracle::FACETS.choose(rng).unwrap();
            let other = views.choose(rng).unwrap();
            let values: Vec<String> = oracle::facet_values(other, facet).into_iter().collect();
            match values.choose(rng) {
                Some(v) => query = query.filter(facet, v.clone()),
                None => query = query.filter(facet, "no such value"),
            }
        }
    }
    if rng.random_bool(0.2) {
        query.q.push_str(" zzzz");
    }
    query
}

/// A straightforward, index-free evaluation of the search contract used as
/// a reference for the real index.
pub mod oracle {
    use super::*;

    pub const K1: f64 = 1.2;
    pub const B: f64 = 0.75;

    /// Every field besides title and repository name that carries text.
    const BODY_FIELDS: &[&str] = &[
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

    fn splitter() -> &'static Regex {
        static RE: OnceLock<Regex> = OnceLock::new();
        RE.get_or_init(|| Regex::new(r"[^\p{Alphabetic}\p{N}]+").unwrap())
    }

    pub fn tokens(text: &str) -> Vec<String> {
        splitter()
            .split(text)
            .filter(|t| t.chars().count() >= 2)
            .map(|t| t.to_lowercase())
            .collect()
    }

    fn strings(value: &Value) -> Vec<String> {
        match value {
            Value::String(s) => vec![s.clone()],
            Value::Array(items) => items.iter().filter_map(|v| v.as_str().map(String::from)).collect(),
            Value::Object(map) => ["city", "region", "note"]
                .iter()
                .filter_map(|k| map.get(*k).and_then(Value::as_str).map(String::from))
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Weighted term counts and total weighted length of one view.
    pub fn weighted_terms(view: &PublicView) -> (HashMap<String, f64>, f64) {
        let mut tf = HashMap::new();
        let mut length = 0.0;
        let map = view.as_map();
        let weighted = [("title", 3.0), ("repository_name", 2.0)]
            .into_iter()
            .chain(BODY_FIELDS.iter().map(|f| (*f, 1.0)));
        for (field, weight) in weighted {
            let Some(value) = map.get(field) else { continue };
            for text in strings(value) {
                for token in tokens(&text) {
                    *tf.entry(token).or_insert(0.0) += weight;
                    length += weight;
                }
            }
        }
        (tf, length)
    }

    pub fn facet_values(view: &PublicView, facet: &str) -> BTreeSet<String> {
        let map = view.as_map();
        let list = |field: &str| -> BTreeSet<String> {
            map.get(field)
                .and_then(Value::as_array)
                .map(|a| a.iter().filter_map(|v| v.as_str().map(String::from)).collect())
                .unwrap_or_default()
        };
        match facet {
            "repository_type" | "accessibility" => {
                map.get(facet).and_then(Value::as_str).map(String::from).into_iter().collect()
            }
            "region" => map
                .get("location")
                .and_then(|l| l.get("region"))
                .and_then(Value::as_str)
                .filter(|s| !s.is_empty())
                .map(String::from)
                .into_iter()
                .collect(),
            "content_type" => list("content_types"),
            "physical_format" => list("physical_formats"),
            "genre" => list("genres"),
            "language" => list("languages"),
            "decade" => match map.get("date_span") {
                Some(v) if !v.is_null() => {
                    let span: DateSpan = serde_json::from_value(v.clone()).unwrap();
                    let mut out = BTreeSet::new();
                    let mut year = span.begin_year;
                    while year <= span.end_year {
                        out.insert(format!("{}s", year - year.rem_euclid(10)));
                        year += 1;
                    }
                    out
                }
                _ => BTreeSet::new(),
            },
            other => panic!("unknown facet {other}"),
        }
    }

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

    #[derive(Debug)]
    pub struct Expected {
        pub total_hits: usize,
        /// (id, score) in (score desc, id asc) order.
        pub hits: Vec<(String, f64)>,
        pub facet_counts: BTreeMap<String, Vec<(String, usize)>>,
    }

    /// Term statistics for a fixed corpus of views.
    pub struct Corpus<'a> {
        views: &'a [PublicView],
        docs: Vec<(HashMap<String, f64>, f64)>,
        facets: Vec<BTreeMap<&'static str, BTreeSet<String>>>,
        avg: f64,
    }

    impl<'a> Corpus<'a> {
        pub fn new(views: &'a [PublicView]) -> Self {
            let docs: Vec<_> = views.iter().map(weighted_terms).collect();
            let avg = if views.is_empty() {
                0.0
            } else {
                docs.iter().map(|d| d.1).sum::<f64>() / views.len() as f64
            };
            let facets = views
                .iter()
                .map(|v| FACETS.iter().map(|f| (*f, facet_values(v, f))).collect())
                .collect();
            Corpus { views, docs, facets, avg }
        }

        pub fn search(&self, q: &str, filters: &BTreeMap<String, Vec<String>>) -> Expected {
            let n = self.views.len() as f64;
            let mut query: Vec<String> = Vec::new();
            for t in tokens(q) {
                if !query.contains(&t) {
                    query.push(t);
                }
            }
            let idf: Vec<f64> = query
                .iter()
                .map(|t| {
                    let df = self.docs.iter().filter(|d| d.0.contains_key(t)).count() as f64;
                    (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
                })
                .collect();

            let mut hits = Vec::new();
            for (i, (tf, length)) in self.docs.iter().enumerate() {
                if !query.iter().all(|t| tf.contains_key(t)) {
                    continue;
                }
                let passes = filters.iter().all(|(facet, wanted)| {
                    let have = &self.facets[i][facet.as_str()];
                    wanted.iter().any(|w| have.contains(w))
                });
                if !passes {
                    continue;
                }
                let norm = if self.avg > 0.0 { length / self.avg } else { 0.0 };
                let mut score = 0.0;
                for (t, idf) in query.iter().zip(&idf) {
                    let f = tf[t];
                    score += idf * f * (K1 + 1.0) / (f + K1 * (1.0 - B + B * norm));
                }
                hits.push((self.views[i].id().to_string(), score, i));
            }
            hits.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));

            let mut facet_counts = BTreeMap::new();
            for facet in FACETS {
                let mut counts: BTreeMap<String, usize> = BTreeMap::new();
                for (_, _, i) in &hits {
                    for v in &self.facets[*i][facet] {
                        *counts.entry(v.clone()).or_default() += 1;
                    }
                }
                let mut list: Vec<(String, usize)> = counts.into_iter().collect();
                list.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
                facet_counts.insert(facet.to_string(), list);
            }
            Expected {
                total_hits: hits.len(),
                hits: hits.into_iter().map(|(id, score, _)| (id, score)).collect(),
                facet_counts,
            }
        }
    }
}
