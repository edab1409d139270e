//! Near-duplicate detection between a draft and published records.
//!
//! score = title_weight * Jaccard(title tokens) + repository_weight * [same repository]

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::model::{casefold, CollectionRecord, RecordFields};

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq)]
pub struct DedupConfig {
    pub threshold: f64,
    pub title_weight: f64,
    pub repository_weight: f64,
}

impl Default for DedupConfig {
    fn default() -> Self {
        DedupConfig {
            threshold: 0.55,
            title_weight: 0.7,
            repository_weight: 0.3,
        }
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct DuplicateEvidence {
    pub title_similarity: f64,
    pub same_repository: bool,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct DuplicateCandidate {
    pub existing_id: String,
    pub score: f64,
    pub evidence: DuplicateEvidence,
}

/// Case-folded title words with punctuation treated as a separator.
pub fn title_tokens(title: &str) -> BTreeSet<String> {
    title
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let shared = a.intersection(b).count();
    let union = a.len() + b.len() - shared;
    if union == 0 {
        0.0
    } else {
        shared as f64 / union as f64
    }
}

fn repository_key(name: Option<&str>) -> Option<String> {
    name.map(casefold).filter(|s| !s.is_empty())
}

fn score_parts(
    config: &DedupConfig,
    tokens_a: &BTreeSet<String>,
    repository_a: &Option<String>,
    tokens_b: &BTreeSet<String>,
    repository_b: &Option<String>,
) -> (f64, DuplicateEvidence) {
    let title_similarity = jaccard(tokens_a, tokens_b);
    let same_repository = matches!((repository_a, repository_b), (Some(a), Some(b)) if a == b);
    let repository_part = if same_repository { config.repository_weight } else { 0.0 };
    let score = (config.title_weight * title_similarity + repository_part).clamp(0.0, 1.0);
    (
        score,
        DuplicateEvidence {
            title_similarity,
            same_repository,
        },
    )
}

/// Pairwise score; symmetric in its two sides. `existing_id` is left empty.
pub fn pair_score(
    config: &DedupConfig,
    title_a: &str,
    repository_a: Option<&str>,
    title_b: &str,
    repository_b: Option<&str>,
) -> DuplicateCandidate {
    let (score, evidence) = score_parts(
        config,
        &title_tokens(title_a),
        &repository_key(repository_a),
        &title_tokens(title_b),
        &repository_key(repository_b),
    );
    DuplicateCandidate {
        existing_id: String::new(),
        score,
        evidence,
    }
}

/// Published records in `corpus` scoring at least the threshold against
/// `draft`, best first, ties broken by id.
pub fn detect_duplicates<'a>(
    draft: &RecordFields,
    corpus: impl IntoIterator<Item = &'a CollectionRecord>,
    config: &DedupConfig,
) -> Vec<DuplicateCandidate> {
    let draft_tokens = title_tokens(&draft.title);
    let draft_repo = repository_key(draft.repository_name.as_deref());
    let mut found: Vec<DuplicateCandidate> = corpus
        .into_iter()
        .filter(|r| r.is_published())
        .filter_map(|record| {
            let (score, evidence) = score_parts(
                config,
                &draft_tokens,
                &draft_repo,
                &title_tokens(&record.fields.title),
                &repository_key(record.fields.repository_name.as_deref()),
            );
            (score >= config.threshold).then(|| DuplicateCandidate {
                existing_id: record.id.clone(),
                score,
                evidence,
            })
        })
        .collect();
    found.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.existing_id.cmp(&b.existing_id))
    });
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::testing::sample_record;
    use crate::model::{RecordStatus, Tier};
    use proptest::prelude::*;

    fn record(id: &str, title: &str, repo: &str) -> CollectionRecord {
        let mut r = sample_record(Tier::Public);
        r.id = id.into();
        r.fields.title = title.into();
        r.fields.repository_name = Some(repo.into());
        r
    }

    fn draft(title: &str, repo: &str) -> RecordFields {
        record("draft", title, repo).fields
    }

    #[test]
    fn identical_scores_one() {
        let corpus = [record("a", "WXYZ Transcription Discs", "Lakeside")];
        let found = detect_duplicates(&draft("WXYZ Transcription Discs", "lakeside"), &corpus, &DedupConfig::default());
        assert_eq!(found.len(), 1);
        assert!((found[0].score - 1.0).abs() < 1e-12);
    }

    #[test]
    fn date_suffix_still_matches() {
        // tokens {wxyz, transcription, discs} vs {wxyz, transcription, discs, 1938, 1952}:
        // Jaccard 3/5, score 0.7 * 0.6 + 0.3 = 0.72
        let corpus = [record("a", "WXYZ transcription discs, 1938-1952", "Lakeside")];
        let found = detect_duplicates(&draft("WXYZ Transcription Discs", "Lakeside"), &corpus, &DedupConfig::default());
        assert_eq!(found.len(), 1);
        assert!((found[0].score - 0.72).abs() < 1e-12);
        assert!((found[0].evidence.title_similarity - 0.6).abs() < 1e-12);
    }

    #[test]
    fn disjoint_not_returned() {
        let corpus = [record("a", "KDKA Logs", "Pittsburgh Museum")];
        assert!(detect_duplicates(&draft("WXYZ Discs", "Lakeside"), &corpus, &DedupConfig::default()).is_empty());
        let s = pair_score(&DedupConfig::default(), "WXYZ Discs", Some("Lakeside"), "KDKA Logs", Some("Pitt"));
        assert_eq!(s.score, 0.0);
    }

    #[test]
    fn ordering_and_tombstones() {
        let mut gone = record("0", "WXYZ Discs", "Lakeside");
        gone.status = RecordStatus::Tombstoned;
        let corpus = [
            record("b", "WXYZ Discs", "Lakeside"),
            record("a", "WXYZ Discs", "Lakeside"),
            record("c", "WXYZ Discs Extra", "Lakeside"),
            gone,
        ];
        let found = detect_duplicates(&draft("WXYZ Discs", "Lakeside"), &corpus, &DedupConfig::default());
        let ids: Vec<_> = found.iter().map(|c| c.existing_id.as_str()).collect();
        assert_eq!(ids, vec!["a", "b", "c"]);
    }

    proptest! {
        #[test]
        fn symmetric(ta in "[a-c ,]{0,12}", tb in "[a-c ,]{0,12}", ra in "[xy]{0,2}", rb in "[xy]{0,2}") {
            let cfg = DedupConfig::default();
            let ab = pair_score(&cfg, &ta, Some(&ra), &tb, Some(&rb));
            let ba = pair_score(&cfg, &tb, Some(&rb), &ta, Some(&ra));
            prop_assert_eq!(ab.score, ba.score);
            prop_assert!((0.0..=1.0).contains(&ab.score));
        }
    }
}
