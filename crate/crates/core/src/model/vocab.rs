//! Controlled vocabularies and term normalization.
//!
//! Each scheme is a small JSON document:
//!
//! ```json
//! {"canonical_terms": ["drama", "news"], "field_name": "genre",
//!  "matching": "casefold_plus_edit1", "synonyms": {"dramas": "drama"}}
//! ```
//!
//! Built-in schemes are compiled in from `vocab/`; a directory of edited
//! files can replace them at runtime.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::record::{NormalizationAction, NormalizationIssue};

const BUILTIN: &[(&str, &str)] = &[
    ("content_type.json", include_str!("../../vocab/content_type.json")),
    ("genre.json", include_str!("../../vocab/genre.json")),
    ("language.json", include_str!("../../vocab/language.json")),
    ("physical_format.json", include_str!("../../vocab/physical_format.json")),
];

/// Record list fields and the scheme that governs each.
pub const VOCAB_FIELDS: &[(&str, &str)] = &[
    ("content_types", "content_type"),
    ("physical_formats", "physical_format"),
    ("genres", "genre"),
    ("languages", "language"),
];

#[derive(Serialize, Deserialize, Clone, Copy, Debug, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Matching {
    ExactCasefold,
    CasefoldPlusEdit1,
}

#[derive(Debug, thiserror::Error)]
pub enum VocabError {
    #[error("{file}: {source}")]
    Json {
        file: String,
        source: serde_json::Error,
    },
    #[error("{file}: {problem}")]
    Invalid { file: String, problem: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("duplicate scheme for field {0:?}")]
    DuplicateField(String),
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(deny_unknown_fields)]
struct SchemeDocument {
    field_name: String,
    matching: Matching,
    canonical_terms: Vec<String>,
    #[serde(default)]
    synonyms: BTreeMap<String, String>,
}

#[derive(Clone, Debug)]
pub struct VocabularyScheme {
    field_name: String,
    matching: Matching,
    canonical_terms: BTreeSet<String>,
    synonyms: BTreeMap<String, String>,
    folded_canonical: BTreeMap<String, String>,
}

/// Outcome of normalizing one raw term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermMatch {
    Canonical { term: String, via: MatchVia },
    Unmatched(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatchVia {
    Exact,
    Synonym,
    EditDistance,
}

/// Case-fold and collapse internal whitespace.
pub fn casefold(raw: &str) -> String {
    raw.split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

impl VocabularyScheme {
    pub fn new(
        field_name: impl Into<String>,
        matching: Matching,
        canonical_terms: impl IntoIterator<Item = String>,
        synonyms: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self, String> {
        let field_name = field_name.into();
        let canonical_terms: BTreeSet<String> = canonical_terms.into_iter().collect();
        let mut folded_canonical = BTreeMap::new();
        for term in &canonical_terms {
            if term.trim().is_empty() {
                return Err("empty canonical term".into());
            }
            if let Some(prev) = folded_canonical.insert(casefold(term), term.clone()) {
                return Err(format!("canonical terms {prev:?} and {term:?} fold together"));
            }
        }
        let mut table = BTreeMap::new();
        for (key, target) in synonyms {
            if key != casefold(&key) {
                return Err(format!("synonym key {key:?} is not case-folded"));
            }
            if !canonical_terms.contains(&target) {
                return Err(format!("synonym {key:?} targets unknown term {target:?}"));
            }
            if folded_canonical.contains_key(&key) {
                return Err(format!("synonym key {key:?} is also a canonical term"));
            }
            table.insert(key, target);
        }
        Ok(VocabularyScheme {
            field_name,
            matching,
            canonical_terms,
            synonyms: table,
            folded_canonical,
        })
    }

    pub fn from_json(file: &str, text: &str) -> Result<Self, VocabError> {
        let doc: SchemeDocument = serde_json::from_str(text).map_err(|source| VocabError::Json {
            file: file.to_string(),
            source,
        })?;
        let canonical_count = doc.canonical_terms.len();
        let scheme = Self::new(doc.field_name, doc.matching, doc.canonical_terms, doc.synonyms)
            .map_err(|problem| VocabError::Invalid {
                file: file.to_string(),
                problem,
            })?;
        if scheme.canonical_terms.len() != canonical_count {
            return Err(VocabError::Invalid {
                file: file.to_string(),
                problem: "duplicate canonical terms".into(),
            });
        }
        Ok(scheme)
    }

    /// Canonical JSON document (sorted keys, sorted terms, trailing newline).
    pub fn to_json(&self) -> String {
        let doc = SchemeDocument {
            field_name: self.field_name.clone(),
            matching: self.matching,
            canonical_terms: self.canonical_terms.iter().cloned().collect(),
            synonyms: self.synonyms.clone(),
        };
        let value = serde_json::to_value(doc).expect("scheme serializes");
        let mut text = serde_json::to_string_pretty(&value).expect("value serializes");
        text.push('\n');
        text
    }

    pub fn field_name(&self) -> &str {
        &self.field_name
    }

    pub fn matching(&self) -> Matching {
        self.matching
    }

    pub fn canonical_terms(&self) -> &BTreeSet<String> {
        &self.canonical_terms
    }

    pub fn synonyms(&self) -> &BTreeMap<String, String> {
        &self.synonyms
    }

    pub fn is_canonical(&self, term: &str) -> bool {
        self.canonical_terms.contains(term)
    }

    pub fn normalize(&self, raw: &str) -> TermMatch {
        let key = casefold(raw);
        if let Some(term) = self.folded_canonical.get(&key) {
            return TermMatch::Canonical {
                term: term.clone(),
                via: MatchVia::Exact,
            };
        }
        if let Some(term) = self.synonyms.get(&key) {
            return TermMatch::Canonical {
                term: term.clone(),
                via: MatchVia::Synonym,
            };
        }
        if self.matching == Matching::CasefoldPlusEdit1 && !key.is_empty() {
            let mut near = self
                .folded_canonical
                .iter()
                .filter(|(folded, _)| strsim::levenshtein(folded, &key) <= 1);
            if let (Some((_, term)), None) = (near.next(), near.next()) {
                return TermMatch::Canonical {
                    term: term.clone(),
                    via: MatchVia::EditDistance,
                };
            }
        }
        TermMatch::Unmatched(raw.to_string())
    }
}

/// Normalizes `raw` against `scheme`.
pub fn normalize_term(scheme: &VocabularyScheme, raw: &str) -> TermMatch {
    scheme.normalize(raw)
}

/// The set of schemes in force, keyed by scheme field name.
#[derive(Clone, Debug)]
pub struct Vocabularies {
    schemes: BTreeMap<String, VocabularyScheme>,
}

impl Vocabularies {
    pub fn builtin() -> Self {
        let mut schemes = BTreeMap::new();
        for (file, text) in BUILTIN {
            let scheme = VocabularyScheme::from_json(file, text).expect("built-in vocabulary is valid");
            schemes.insert(scheme.field_name.clone(), scheme);
        }
        Vocabularies { schemes }
    }

    pub fn from_schemes(list: impl IntoIterator<Item = VocabularyScheme>) -> Result<Self, VocabError> {
        let mut schemes = BTreeMap::new();
        for scheme in list {
            let name = scheme.field_name.clone();
            if schemes.insert(name.clone(), scheme).is_some() {
                return Err(VocabError::DuplicateField(name));
            }
        }
        Ok(Vocabularies { schemes })
    }

    /// Loads every `*.json` file in `dir`.
    pub fn load_dir(dir: &Path) -> Result<Self, VocabError> {
        let io = |source| VocabError::Io {
            path: dir.display().to_string(),
            source,
        };
        let mut paths: Vec<_> = std::fs::read_dir(dir)
            .map_err(io)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "json"))
            .collect();
        paths.sort();
        let mut schemes = Vec::new();
        for path in paths {
            let text = std::fs::read_to_string(&path).map_err(|source| VocabError::Io {
                path: path.display().to_string(),
                source,
            })?;
            schemes.push(VocabularyScheme::from_json(&path.display().to_string(), &text)?);
        }
        Self::from_schemes(schemes)
    }

    pub fn scheme(&self, field_name: &str) -> Option<&VocabularyScheme> {
        self.schemes.get(field_name)
    }

    /// Scheme governing a record list field such as `physical_formats`.
    pub fn scheme_for_record_field(&self, record_field: &str) -> Option<&VocabularyScheme> {
        VOCAB_FIELDS
            .iter()
            .find(|(field, _)| *field == record_field)
            .and_then(|(_, scheme)| self.scheme(scheme))
    }

    pub fn schemes(&self) -> impl Iterator<Item = &VocabularyScheme> {
        self.schemes.values()
    }

    /// Normalizes every term of a record list field, dropping repeats.
    /// Unmatched and edit-distance matches leave a trail in `issues`.
    pub fn normalize_list(
        &self,
        record_field: &str,
        raws: &[String],
        issues: &mut Vec<NormalizationIssue>,
    ) -> Vec<String> {
        let scheme = self.scheme_for_record_field(record_field);
        let mut out: Vec<String> = Vec::with_capacity(raws.len());
        for raw in raws {
            let raw_trimmed = raw.trim();
            if raw_trimmed.is_empty() {
                continue;
            }
            let term = match scheme.map(|s| s.normalize(raw_trimmed)) {
                None => raw_trimmed.to_string(),
                Some(TermMatch::Canonical { term, via }) => {
                    if via == MatchVia::EditDistance {
                        issues.push(NormalizationIssue {
                            field: record_field.to_string(),
                            raw_value: raw_trimmed.to_string(),
                            action: NormalizationAction::Corrected,
                        });
                    }
                    term
                }
                Some(TermMatch::Unmatched(raw)) => {
                    issues.push(NormalizationIssue {
                        field: record_field.to_string(),
                        raw_value: raw.clone(),
                        action: NormalizationAction::KeptVerbatim,
                    });
                    raw
                }
            };
            if !out.contains(&term) {
                out.push(term);
            }
        }
        out
    }
}

impl Default for Vocabularies {
    fn default() -> Self {
        Self::builtin()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LintFinding {
    pub file: String,
    pub message: String,
}

/// Checks a vocabulary directory: each file must load, keep its terms and
/// synonym keys sorted and unique, and be stored in canonical form.
pub fn lint_dir(dir: &Path) -> Result<Vec<LintFinding>, VocabError> {
    let mut findings = Vec::new();
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(|source| VocabError::Io {
            path: dir.display().to_string(),
            source,
        })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    let mut seen_fields = BTreeSet::new();
    for path in paths {
        let file = path.display().to_string();
        let text = std::fs::read_to_string(&path).map_err(|source| VocabError::Io {
            path: file.clone(),
            source,
        })?;
        findings.extend(lint_text(&file, &text));
        if let Ok(scheme) = VocabularyScheme::from_json(&file, &text) {
            if !seen_fields.insert(scheme.field_name.clone()) {
                findings.push(LintFinding {
                    file: file.clone(),
                    message: format!("second scheme for field {:?}", scheme.field_name),
                });
            }
        }
    }
    Ok(findings)
}

pub fn lint_text(file: &str, text: &str) -> Vec<LintFinding> {
    let finding = |message: String| LintFinding {
        file: file.to_string(),
        message,
    };
    let scheme = match VocabularyScheme::from_json(file, text) {
        Ok(scheme) => scheme,
        Err(err) => return vec![finding(err.to_string())],
    };
    let mut findings = Vec::new();
    if let Ok(doc) = serde_json::from_str::<SchemeDocument>(text) {
        if !doc.canonical_terms.windows(2).all(|w| w[0] < w[1]) {
            findings.push(finding("canonical_terms are not sorted".into()));
        }
    }
    if text != scheme.to_json() {
        findings.push(finding("file is not in canonical form (sorted keys, 2-space indent)".into()));
    }
    findings
}
