use std::collections::{BTreeMap, HashMap, HashSet};

use crate::model::{PublicView, Tier};

use super::{
    facet_values, field_texts, tokenize, FacetCount, Hit, SearchError, SearchQuery, SearchResult, B, FACETS, K1,
    REPOSITORY_WEIGHT, TEXT_FIELDS, TITLE_WEIGHT,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IndexError {
    #[error("duplicate id {0} in index input")]
    DuplicateId(String),
    #[error("record {0} is not publicly visible")]
    NotPublic(String),
}

#[derive(Clone, Copy, Debug)]
struct Posting {
    doc: u32,
    tf: f64,
}

#[derive(Clone, Debug, Default)]
struct FacetTable {
    values: Vec<String>,
    lookup: HashMap<String, u32>,
    /// Value ids per document.
    doc_values: Vec<Vec<u32>>,
}

#[derive(Clone, Debug)]
struct Doc {
    view: PublicView,
    length: f64,
}

/// An immutable inverted index over public views.
#[derive(Clone, Debug, Default)]
pub struct Index {
    docs: Vec<Doc>,
    postings: HashMap<String, Vec<Posting>>,
    facets: Vec<FacetTable>,
    avg_length: f64,
    generation: u64,
}

/// Builds an index; `views` may come in any order.
pub fn build_index(views: Vec<PublicView>) -> Result<Index, IndexError> {
    Index::build(views, 0)
}

impl Index {
    pub(crate) fn build(mut views: Vec<PublicView>, generation: u64) -> Result<Index, IndexError> {
        views.sort_by(|a, b| a.id().cmp(b.id()));
        if let Some(pair) = views.windows(2).find(|w| w[0].id() == w[1].id()) {
            return Err(IndexError::DuplicateId(pair[0].id().to_string()));
        }
        if let Some(hidden) = views.iter().find(|v| v.tier() == Tier::Restricted) {
            return Err(IndexError::NotPublic(hidden.id().to_string()));
        }

        let mut index = Index {
            facets: vec![FacetTable::default(); FACETS.len()],
            generation,
            ..Default::default()
        };
        let mut total_length = 0.0;
        for (doc, view) in views.into_iter().enumerate() {
            let doc = doc as u32;
            let mut weights: HashMap<String, f64> = HashMap::new();
            let mut add = |text: &str, weight: f64| {
                for token in tokenize(text) {
                    *weights.entry(token).or_default() += weight;
                }
            };
            for text in field_texts(&view, "title") {
                add(text, TITLE_WEIGHT);
            }
            for text in field_texts(&view, "repository_name") {
                add(text, REPOSITORY_WEIGHT);
            }
            for field in TEXT_FIELDS {
                for text in field_texts(&view, field) {
                    add(text, 1.0);
                }
            }
            let length: f64 = weights.values().sum();
            total_length += length;
            for (token, tf) in weights {
                index.postings.entry(token).or_default().push(Posting { doc, tf });
            }
            for (table, facet) in index.facets.iter_mut().zip(FACETS) {
                let ids = facet_values(&view, facet)
                    .into_iter()
                    .map(|value| {
                        let next = table.values.len() as u32;
                        *table.lookup.entry(value.clone()).or_insert_with(|| {
                            table.values.push(value);
                            next
                        })
                    })
                    .collect();
                table.doc_values.push(ids);
            }
            index.docs.push(Doc { view, length });
        }
        if !index.docs.is_empty() {
            index.avg_length = total_length / index.docs.len() as f64;
        }
        Ok(index)
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    /// Generation of the catalog state this index was built from.
    pub fn generation(&self) -> u64 {
        self.generation
    }

    /// Indexed views in id order.
    pub fn views(&self) -> impl Iterator<Item = &PublicView> {
        self.docs.iter().map(|d| &d.view)
    }

    pub fn get(&self, id: &str) -> Option<&PublicView> {
        self.docs
            .binary_search_by(|d| d.view.id().cmp(id))
            .ok()
            .map(|i| &self.docs[i].view)
    }

    fn idf(&self, df: usize) -> f64 {
        let n = self.docs.len() as f64;
        let df = df as f64;
        (1.0 + (n - df + 0.5) / (df + 0.5)).ln()
    }

    fn candidates(&self, tokens: &[String]) -> Vec<u32> {
        if tokens.is_empty() {
            return (0..self.docs.len() as u32).collect();
        }
        let mut lists: Vec<&Vec<Posting>> = Vec::with_capacity(tokens.len());
        for token in tokens {
            match self.postings.get(token) {
                Some(list) => lists.push(list),
                None => return Vec::new(),
            }
        }
        lists.sort_by_key(|l| l.len());
        lists[0]
            .iter()
            .map(|p| p.doc)
            .filter(|doc| lists[1..].iter().all(|l| l.binary_search_by_key(doc, |p| p.doc).is_ok()))
            .collect()
    }

    fn score(&self, doc: u32, tokens: &[String]) -> f64 {
        let length = self.docs[doc as usize].length;
        let norm = if self.avg_length > 0.0 { length / self.avg_length } else { 0.0 };
        tokens
            .iter()
            .map(|token| {
                let list = &self.postings[token];
                let tf = list[list.binary_search_by_key(&doc, |p| p.doc).expect("candidate has token")].tf;
                self.idf(list.len()) * tf * (K1 + 1.0) / (tf + K1 * (1.0 - B + B * norm))
            })
            .sum()
    }

    /// Runs a query. Repeated query tokens count once.
    pub fn search(&self, query: &SearchQuery) -> Result<SearchResult, SearchError> {
        query.validate()?;
        let mut tokens = tokenize(&query.q);
        let mut seen = HashSet::new();
        tokens.retain(|t| seen.insert(t.clone()));

        let filters: Vec<(usize, HashSet<u32>)> = query
            .facet_filters
            .iter()
            .map(|(facet, values)| {
                let slot = FACETS.iter().position(|f| f == facet).expect("validated facet");
                let table = &self.facets[slot];
                let ids = values.iter().filter_map(|v| table.lookup.get(v).copied()).collect();
                (slot, ids)
            })
            .collect();

        let mut matched: Vec<(f64, u32)> = self
            .candidates(&tokens)
            .into_iter()
            .filter(|&doc| {
                filters.iter().all(|(slot, ids)| {
                    self.facets[*slot].doc_values[doc as usize]
                        .iter()
                        .any(|v| ids.contains(v))
                })
            })
            .map(|doc| {
                let score = if tokens.is_empty() { 0.0 } else { self.score(doc, &tokens) };
                (score, doc)
            })
            .collect();
        // docs are in id order, so the doc number breaks ties by id
        matched.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

        let facet_counts = FACETS
            .iter()
            .enumerate()
            .map(|(slot, facet)| {
                let table = &self.facets[slot];
                let mut counts = vec![0usize; table.values.len()];
                for (_, doc) in &matched {
                    for &v in &table.doc_values[*doc as usize] {
                        counts[v as usize] += 1;
                    }
                }
                let mut list: Vec<FacetCount> = counts
                    .into_iter()
                    .enumerate()
                    .filter(|(_, count)| *count > 0)
                    .map(|(v, count)| FacetCount {
                        value: table.values[v].clone(),
                        count,
                    })
                    .collect();
                list.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.value.cmp(&b.value)));
                (facet.to_string(), list)
            })
            .collect::<BTreeMap<_, _>>();

        let start = (query.page - 1).saturating_mul(query.page_size);
        let hits = matched
            .iter()
            .skip(start)
            .take(query.page_size)
            .map(|&(score, doc)| {
                let view = &self.docs[doc as usize].view;
                Hit {
                    id: view.id().to_string(),
                    score,
                    title: view.str_field("title").map(str::to_string),
                    repository_name: view.str_field("repository_name").map(str::to_string),
                    snippet: snippet(view, &tokens),
                }
            })
            .collect();

        Ok(SearchResult {
            total_hits: matched.len(),
            hits,
            facet_counts,
            page: query.page,
            page_size: query.page_size,
        })
    }
}

const SNIPPET_FIELDS: &[&str] = &[
    "description",
    "historical_relevance",
    "inventory_description",
    "supporting_documentation",
    "notes",
    "access_statement",
    "usage_statement",
];
const SNIPPET_BEFORE: usize = 8;
const SNIPPET_WORDS: usize = 24;

/// A short excerpt around the first query token found in a descriptive
/// field, or the start of the description.
fn snippet(view: &PublicView, tokens: &[String]) -> Option<String> {
    let excerpt = |words: &[&str], from: usize| {
        let end = (from + SNIPPET_WORDS).min(words.len());
        let mut out = words[from..end].join(" ");
        if from > 0 {
            out.insert_str(0, "… ");
        }
        if end < words.len() {
            out.push_str(" …");
        }
        out
    };
    for field in SNIPPET_FIELDS {
        for text in field_texts(view, field) {
            let words: Vec<&str> = text.split_whitespace().collect();
            let hit = words
                .iter()
                .position(|w| tokenize(w).iter().any(|t| tokens.contains(t)));
            if let Some(i) = hit {
                return Some(excerpt(&words, i.saturating_sub(SNIPPET_BEFORE)));
            }
        }
    }
    let words: Vec<&str> = view.str_field("description")?.split_whitespace().collect();
    (!words.is_empty()).then(|| excerpt(&words, 0))
}
