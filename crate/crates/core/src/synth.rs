//! Seeded generators for synthetic catalogs, print guides and OCR noise.
//!
//! Everything here is deterministic for a given seed. Synthetic text marks
//! each free-text value with a unique nonce token (`zq` plus ten letters) so
//! a leak of that value can be found with a plain substring search.

use std::collections::{BTreeMap, HashSet};

use chrono::{DateTime, Duration, TimeZone, Utc};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ingest::GUIDE_LABELS;
use crate::model::{
    Accessibility, CollectionRecord, Condition, ConditionGrade, DateSpan, Extent, ExtentUnit, FieldOverride,
    FindingAid, Location, NormalizationAction, NormalizationIssue, Provenance, RecordDraft, RecordFields,
    RecordStatus, RepositoryType, SourceKind, Tier, Vocabularies, VisibilityPolicy, DESCRIPTIVE_FIELDS,
};

pub const NONCE_PREFIX: &str = "zq";

const WORDS: &[&str] = &[
    "radio", "station", "broadcast", "program", "news", "drama", "music", "jazz", "orchestra", "live",
    "studio", "remote", "election", "coverage", "wartime", "bulletin", "interview", "farm", "report",
    "weather", "sports", "baseball", "football", "church", "service", "sermon", "choir", "county", "fair",
    "parade", "speech", "mayor", "governor", "council", "school", "lecture", "poetry", "reading", "folk",
    "ballad", "fiddle", "dance", "band", "concert", "opera", "children", "story", "serial", "comedy",
    "variety", "quiz", "soap", "mystery", "western", "advertising", "jingle", "announcer", "engineer",
    "transmitter", "network", "affiliate", "local", "regional", "national", "community", "family", "home",
    "oral", "history", "memoir", "veteran", "labor", "union", "strike", "harvest", "flood", "storm",
    "disaster", "relief", "hospital", "library", "museum", "archive", "collection", "donation", "estate",
    "discs", "tapes", "reels", "acetate", "lacquer", "shellac", "cylinder", "wire", "cassette", "aircheck",
    "logbook", "script", "schedule", "rundown", "transcription", "duplicate", "master", "copy", "fragile",
    "warped", "cracked", "mold", "vinegar", "baked", "cleaned", "digitized", "inventory", "catalog", "box",
    "folder", "shelf", "vault", "basement", "attic", "garage", "early", "late", "postwar", "prewar",
    "depression", "century", "decade", "season", "holiday", "christmas", "easter", "summer", "winter",
    "morning", "evening", "midnight", "hour", "minute", "signal", "static", "frequency", "antenna", "tower",
];

const FIRST_NAMES: &[&str] = &[
    "Ada", "Alma", "Arthur", "Bessie", "Burl", "Carl", "Clara", "Cora", "Dale", "Della", "Edith", "Edna",
    "Elmer", "Ethel", "Floyd", "Frances", "Grace", "Harold", "Hazel", "Homer", "Ida", "Irene", "Jesse",
    "June", "Lena", "Leon", "Lottie", "Lyle", "Mabel", "Marvin", "Maude", "Merle", "Mildred", "Myrtle",
    "Nellie", "Norman", "Opal", "Orville", "Pearl", "Ralph", "Rosa", "Ruby", "Ruth", "Stella", "Thelma",
    "Vera", "Vernon", "Viola", "Wilbur", "Willa",
];

const LAST_NAMES: &[&str] = &[
    "Abbott", "Barlow", "Becker", "Brandt", "Carver", "Coleman", "Dalton", "Dunbar", "Eckert", "Fenwick",
    "Fischer", "Garland", "Greer", "Hadley", "Harmon", "Hollis", "Hubbard", "Ingram", "Jansen", "Keller",
    "Kessler", "Lambert", "Lindqvist", "Lowell", "Mercer", "Moreau", "Nolan", "Novak", "Olsen", "Pruitt",
    "Quinlan", "Ramsey", "Reyes", "Sauer", "Sommer", "Strand", "Tate", "Thorne", "Ulrich", "Vance",
    "Voss", "Wagner", "Whitlock", "Winslow", "Yates", "Zeller", "Brock", "Castillo", "Duval", "Engel",
];

const TITLE_GENRES: &[&str] = &[
    "Jazz", "News", "Drama", "Sports", "Farm", "Church", "Election", "Variety", "Folk", "Comedy",
];

const TITLE_FORMATS: &[&str] = &[
    "Discs", "Reels", "Tapes", "Recordings", "Cylinders", "Broadcasts", "Airchecks", "Acetates",
];

const PLACES: &[&str] = &[
    "Lakeside", "Prairie", "Riverbend", "Hillcrest", "Cedar", "Maple", "Granite", "Harbor", "Pinewood",
    "Red Rock", "Silver Creek", "Elm Valley", "Bluff", "Meadow", "Oakridge", "Sandhill", "Willow",
    "Stonebridge", "Fairview", "Northfield", "Southgate", "Eastwood", "Westbrook", "Clearwater",
    "Ironwood", "Highland", "Millbrook", "Brookside", "Kingsley", "Ashford", "Birchwood", "Copper Falls",
    "Deer Park", "Fox Hollow", "Glenwood", "Hawthorne", "Juniper", "Lone Pine", "Marshfield", "Newcastle",
    "Orchard", "Pleasant Hill", "Quarry", "Rosewood", "Spring Lake", "Timberline", "Union Grove",
    "Valley Forge", "Whitehall", "Yellow Pine", "Bay City", "Crystal Lake", "Dry Creek", "Evergreen",
    "Falcon Ridge", "Golden Plains", "Heron Bay", "Indian Hill", "Jasper", "Kettle River",
];

const KINDS: &[(&str, RepositoryType)] = &[
    ("University Library", RepositoryType::University),
    ("College Archives", RepositoryType::University),
    ("Public Radio", RepositoryType::PublicBroadcaster),
    ("Broadcasting Company", RepositoryType::CommercialStation),
    ("Historical Society", RepositoryType::HistoricalSociety),
    ("Museum of Broadcasting", RepositoryType::Museum),
    ("State Archives", RepositoryType::StateArchive),
    ("Sound Heritage Center", RepositoryType::CommunityOrg),
];

const CITIES: &[&str] = &[
    "Dubuque", "Pittsburgh", "Fargo", "Spokane", "Tulsa", "Duluth", "Macon", "Boise", "Topeka", "Albany",
    "Reno", "Peoria", "Erie", "Joplin", "Bangor", "Laredo", "Provo", "Eugene", "Dayton", "Mobile",
];

const REGIONS: &[&str] = &[
    "IA", "PA", "ND", "WA", "OK", "MN", "GA", "ID", "KS", "NY", "NV", "IL", "MO", "ME", "TX", "UT", "OR", "OH",
    "AL", "WI",
];

/// Characters the label noise may substitute, and what they become.
pub const LABEL_CONFUSIONS: &[(char, char)] = &[
    ('o', '0'),
    ('l', '1'),
    ('i', 'l'),
    ('s', '5'),
    ('S', '5'),
    ('e', 'c'),
    ('n', 'm'),
    ('t', 'f'),
];

/// Year digits the noise may swap for a look-alike letter.
pub const YEAR_DIGIT_SWAPS: &[(char, char)] = &[('1', 'l'), ('0', 'O'), ('5', 'S')];

/// A guide text and the raw fields a correct extraction yields per entry.
#[derive(Clone, Debug)]
pub struct SyntheticGuide {
    pub text: String,
    pub expected: Vec<BTreeMap<String, String>>,
}

/// Published records in ingest order, with each planted near-duplicate
/// listed as (duplicate id, original id). Originals precede their copies.
#[derive(Clone, Debug)]
pub struct DedupCorpus {
    pub records: Vec<CollectionRecord>,
    pub planted: Vec<(String, String)>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct NoiseCounts {
    pub labels_perturbed: usize,
    pub year_digits_swapped: usize,
}

pub struct Synth {
    rng: ChaCha8Rng,
    terms: BTreeMap<&'static str, Vec<String>>,
    calls: HashSet<String>,
    ids: HashSet<String>,
    nonces: HashSet<String>,
    base_time: DateTime<Utc>,
    serial: i64,
}

impl Synth {
    pub fn new(seed: u64) -> Self {
        let vocab = Vocabularies::builtin();
        let mut terms = BTreeMap::new();
        for field in ["content_types", "physical_formats", "languages", "genres"] {
            let scheme = vocab.scheme_for_record_field(field).expect("built-in scheme");
            terms.insert(field, scheme.canonical_terms().iter().cloned().collect());
        }
        Synth {
            rng: ChaCha8Rng::seed_from_u64(seed),
            terms,
            calls: HashSet::new(),
            ids: HashSet::new(),
            nonces: HashSet::new(),
            base_time: Utc.with_ymd_and_hms(2024, 1, 1, 0, 0, 0).unwrap(),
            serial: 0,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn pick<T: Copy>(&mut self, items: &[T]) -> T {
        *items.choose(&mut self.rng).expect("non-empty pool")
    }

    fn letters(&mut self, n: usize) -> String {
        (0..n).map(|_| self.rng.random_range(b'a'..=b'z') as char).collect()
    }

    /// A token never returned before by this generator.
    pub fn nonce(&mut self) -> String {
        loop {
            let token = format!("{NONCE_PREFIX}{}", self.letters(10));
            if self.nonces.insert(token.clone()) {
                return token;
            }
        }
    }

    /// Unique four-letter station call sign.
    pub fn call_letters(&mut self) -> String {
        loop {
            let first = if self.rng.random_bool(0.5) { 'W' } else { 'K' };
            let rest = self.letters(3).to_uppercase();
            let call = format!("{first}{rest}");
            if self.calls.insert(call.clone()) {
                return call;
            }
        }
    }

    /// Unique 16-hex-digit record id.
    pub fn record_id(&mut self) -> String {
        loop {
            let id = format!("{:016x}", self.rng.random::<u64>());
            if self.ids.insert(id.clone()) {
                return id;
            }
        }
    }

    pub fn repository(&mut self) -> (String, RepositoryType) {
        let place = self.pick(PLACES);
        let (kind, kind_type) = self.pick(KINDS);
        (format!("{place} {kind}"), kind_type)
    }

    pub fn title(&mut self) -> String {
        let call = self.call_letters();
        let first = self.pick(FIRST_NAMES);
        let last = self.pick(LAST_NAMES);
        let genre = self.pick(TITLE_GENRES);
        let format = self.pick(TITLE_FORMATS);
        format!("{call} {first} {last} {genre} {format}")
    }

    /// Some words from the common pool.
    pub fn phrase(&mut self, min: usize, max: usize) -> String {
        let n = self.rng.random_range(min..=max);
        (0..n).map(|_| self.pick(WORDS)).collect::<Vec<_>>().join(" ")
    }

    fn marked_text(&mut self) -> Option<String> {
        if self.rng.random_bool(0.1) {
            return None;
        }
        let words = self.phrase(3, 14);
        let nonce = self.nonce();
        Some(format!("{words} {nonce}."))
    }

    fn terms(&mut self, field: &'static str, max: usize) -> Vec<String> {
        let n = self.rng.random_range(0..=max);
        let pool = &self.terms[field];
        let mut out: Vec<String> = pool.choose_multiple(&mut self.rng, n).cloned().collect();
        out.sort();
        out
    }

    fn date_span(&mut self) -> Option<DateSpan> {
        if self.rng.random_bool(0.1) {
            return None;
        }
        let begin = self.rng.random_range(1890..=2015);
        let end = (begin + self.rng.random_range(0..=35)).min(2025);
        Some(DateSpan {
            begin_year: begin,
            end_year: end,
            approximate: self.rng.random_bool(0.2),
        })
    }

    fn tier(&mut self) -> Tier {
        match self.rng.random_range(0..20) {
            0..8 => Tier::Public,
            8..15 => Tier::Limited,
            _ => Tier::Restricted,
        }
    }

    fn overrides(&mut self, tier: Tier) -> BTreeMap<String, FieldOverride> {
        let mut out = BTreeMap::new();
        for field in DESCRIPTIVE_FIELDS {
            let choice = match tier {
                Tier::Public if self.rng.random_bool(0.1) => FieldOverride::Hide,
                Tier::Limited if self.rng.random_bool(0.1) => FieldOverride::Expose,
                Tier::Restricted if self.rng.random_bool(0.05) => FieldOverride::Expose,
                _ => continue,
            };
            out.insert(field.to_string(), choice);
        }
        out
    }

    /// A valid draft with a random tier and overrides. Free-text values,
    /// one creator, the owner contact, the finding aid URL and any
    /// non-canonical genre carry nonce tokens.
    pub fn draft(&mut self) -> RecordDraft {
        let (repository, repository_type) = self.repository();
        let tier = self.tier();
        let mut issues = Vec::new();

        let mut creators = Vec::new();
        for _ in 0..self.rng.random_range(0..3) {
            let first = self.pick(FIRST_NAMES);
            let last = self.pick(LAST_NAMES);
            creators.push(format!("{last}, {first}"));
        }
        if self.rng.random_bool(0.7) {
            let nonce = self.nonce();
            creators.push(format!("{nonce} Orchestra"));
        }
        let mut genres = self.terms("genres", 2);
        if self.rng.random_bool(0.2) {
            let term = format!("{} hour", self.nonce());
            issues.push(NormalizationIssue {
                field: "genres".into(),
                raw_value: term.clone(),
                action: NormalizationAction::KeptVerbatim,
            });
            genres.push(term);
        }
        let finding_aid = if self.rng.random_bool(0.5) {
            let nonce = self.nonce();
            FindingAid {
                exists: true,
                url: Some(format!("https://archives.example/{nonce}")),
            }
        } else {
            FindingAid::default()
        };
        let extent = self.rng.random_bool(0.8).then(|| Extent {
            count: self.rng.random_range(1..5000),
            unit: *ExtentUnit::ALL.choose(&mut self.rng).unwrap(),
        });
        let owner_contact = format!("{}@owners.example", self.nonce());

        let fields = RecordFields {
            title: self.title(),
            description: self.marked_text(),
            repository_name: Some(repository),
            repository_type,
            location: Location {
                city: Some(self.pick(CITIES).to_string()),
                region: Some(self.pick(REGIONS).to_string()),
            },
            owner_contact: Some(owner_contact),
            accessibility: *Accessibility::ALL.choose(&mut self.rng).unwrap(),
            access_statement: self.marked_text(),
            usage_statement: self.marked_text(),
            creators,
            date_span: self.date_span(),
            content_types: self.terms("content_types", 2),
            physical_formats: self.terms("physical_formats", 3),
            languages: self.terms("languages", 2),
            genres,
            extent,
            condition: Condition {
                grade: *ConditionGrade::ALL.choose(&mut self.rng).unwrap(),
                note: self.marked_text(),
            },
            finding_aid,
            inventory_description: self.marked_text(),
            supporting_documentation: self.marked_text(),
            historical_relevance: self.marked_text(),
            notes: self.marked_text(),
            visibility: VisibilityPolicy {
                tier,
                field_overrides: self.overrides(tier),
            },
        };
        RecordDraft {
            fields,
            normalization_issues: issues,
        }
    }

    /// A published record built from [`Synth::draft`].
    pub fn record(&mut self) -> CollectionRecord {
        let draft = self.draft();
        self.publish(draft)
    }

    pub fn records(&mut self, n: usize) -> Vec<CollectionRecord> {
        (0..n).map(|_| self.record()).collect()
    }

    fn publish(&mut self, draft: RecordDraft) -> CollectionRecord {
        let at = self.base_time + Duration::seconds(self.serial);
        self.serial += 1;
        CollectionRecord {
            id: self.record_id(),
            fields: draft.fields,
            normalization_issues: draft.normalization_issues,
            provenance: Provenance {
                source: SourceKind::Form,
                source_detail: "synthetic".into(),
            },
            status: RecordStatus::Published,
            revision: 1,
            created_at: at,
            updated_at: at,
            contributor: None,
        }
    }

    fn guide_date(&mut self) -> String {
        let begin: i32 = self.rng.random_range(1920..=1990);
        match self.rng.random_range(0..4) {
            0 => format!("{begin}-{}", begin + self.rng.random_range(1..=30)),
            1 => format!("{}s", begin / 10 * 10),
            2 => format!("circa {}s", begin / 10 * 10),
            _ => begin.to_string(),
        }
    }

    fn guide_entry(&mut self) -> BTreeMap<String, String> {
        let mut raw = BTreeMap::new();
        let (repository, _) = self.repository();
        raw.insert("repository_name".to_string(), repository);
        if self.rng.random_bool(0.9) {
            let city = self.pick(CITIES);
            let region = self.pick(REGIONS);
            raw.insert("location".into(), format!("{city}, {region}"));
        }
        if self.rng.random_bool(0.8) {
            let count = self.rng.random_range(2..3000u32);
            let count = if count >= 1000 {
                format!("{},{:03}", count / 1000, count % 1000)
            } else {
                count.to_string()
            };
            let call = self.call_letters();
            let what = self.pick(&["transcription discs", "reels", "tapes", "acetates"]);
            raw.insert("inventory_description".into(), format!("{count} {what} of {call} programs"));
        }
        if self.rng.random_bool(0.85) {
            let date = self.guide_date();
            raw.insert("date_span".into(), date);
        }
        if self.rng.random_bool(0.7) {
            let terms = self.terms("physical_formats", 2);
            if !terms.is_empty() {
                raw.insert("physical_formats".into(), terms.join("; "));
            }
        }
        if self.rng.random_bool(0.7) {
            let contact = if self.rng.random_bool(0.5) {
                format!("archives@{}.example", self.letters(6))
            } else {
                format!("555-{:04}", self.rng.random_range(100..10000))
            };
            raw.insert("owner_contact".into(), contact);
        }
        if self.rng.random_bool(0.4) {
            let value = match self.rng.random_range(0..3) {
                0 => "yes".to_string(),
                1 => "no".to_string(),
                _ => format!("https://guides.example/{}", self.letters(8)),
            };
            raw.insert("finding_aid".into(), value);
        }
        if self.rng.random_bool(0.4) {
            let mut note = self.phrase(3, 10);
            note[..1].make_ascii_uppercase();
            raw.insert("notes".into(), format!("{note}."));
        }
        raw
    }

    /// `n` guide entries separated by blank lines. Label lines appear in a
    /// random order after the name line.
    pub fn guide(&mut self, n: usize) -> SyntheticGuide {
        let mut text = String::new();
        let mut expected = Vec::with_capacity(n);
        for index in 0..n {
            let raw = self.guide_entry();
            if index > 0 {
                text.push('\n');
            }
            text.push_str(&raw["repository_name"]);
            text.push('\n');
            let mut lines: Vec<String> = GUIDE_LABELS
                .iter()
                .filter_map(|(label, field)| raw.get(*field).map(|v| format!("{label}: {v}")))
                .collect();
            lines.shuffle(&mut self.rng);
            for line in lines {
                text.push_str(&line);
                text.push('\n');
            }
            expected.push(raw);
        }
        SyntheticGuide { text, expected }
    }

    /// Perturbs guide text the way a poor scan does: each label is misread
    /// with probability `label_rate` (one character through
    /// [`LABEL_CONFUSIONS`]) and each swappable digit of a `Dates` value is
    /// misread with probability `year_digit_rate` (through
    /// [`YEAR_DIGIT_SWAPS`]).
    pub fn ocr_noise(&mut self, text: &str, label_rate: f64, year_digit_rate: f64) -> (String, NoiseCounts) {
        let mut counts = NoiseCounts::default();
        let mut out = String::with_capacity(text.len());
        for line in text.split_inclusive('\n') {
            let label = GUIDE_LABELS
                .iter()
                .map(|(label, _)| *label)
                .find(|label| line.strip_prefix(label).is_some_and(|rest| rest.starts_with(':')));
            let Some(label) = label else {
                out.push_str(line);
                continue;
            };
            let rest = &line[label.len()..];
            if self.rng.random_bool(label_rate) {
                let chars: Vec<char> = label.chars().collect();
                let positions: Vec<usize> = (0..chars.len())
                    .filter(|&i| LABEL_CONFUSIONS.iter().any(|(from, _)| *from == chars[i]))
                    .collect();
                let &at = positions.choose(&mut self.rng).expect("every label has a confusable character");
                let to = LABEL_CONFUSIONS.iter().find(|(from, _)| *from == chars[at]).unwrap().1;
                out.extend(chars.iter().enumerate().map(|(i, c)| if i == at { to } else { *c }));
                counts.labels_perturbed += 1;
            } else {
                out.push_str(label);
            }
            if label == "Dates" {
                for c in rest.chars() {
                    match YEAR_DIGIT_SWAPS.iter().find(|(digit, _)| *digit == c) {
                        Some((_, letter)) if self.rng.random_bool(year_digit_rate) => {
                            out.push(*letter);
                            counts.year_digits_swapped += 1;
                        }
                        _ => out.push(c),
                    }
                }
            } else {
                out.push_str(rest);
            }
        }
        (out, counts)
    }

    fn variant_title(&mut self, title: &str, span: Option<DateSpan>) -> String {
        let words: Vec<&str> = title.split(' ').collect();
        match self.rng.random_range(0..5) {
            0 => match span {
                Some(s) => format!("{title}, {}-{}", s.begin_year, s.end_year),
                None => format!("{title} (copy)"),
            },
            1 => {
                let drop = self.rng.random_range(1..words.len());
                words.iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, w)| *w).collect::<Vec<_>>().join(" ")
            }
            2 => format!("{}: {}", words[0], words[1..].join(" ").to_lowercase()),
            3 => {
                let mut shuffled = words.clone();
                shuffled[1..].shuffle(&mut self.rng);
                shuffled.join(" ").to_uppercase()
            }
            _ => {
                let at = self.rng.random_range(1..words.len());
                let mut typo: Vec<String> = words.iter().map(|w| w.to_string()).collect();
                let mut chars: Vec<char> = typo[at].chars().collect();
                let i = self.rng.random_range(1..chars.len());
                chars.swap(i - 1, i);
                if chars.iter().collect::<String>() == typo[at] {
                    chars.push('s');
                }
                typo[at] = chars.into_iter().collect();
                typo.join(" ")
            }
        }
    }

    /// `n` published records of which `planted` are near-duplicates of
    /// earlier ones. Most copies keep the repository; one in five names it
    /// differently.
    pub fn dedup_corpus(&mut self, n: usize, planted: usize) -> DedupCorpus {
        assert!(planted * 2 <= n, "not enough originals");
        let originals: Vec<CollectionRecord> = (0..n - planted).map(|_| self.record()).collect();
        let mut sources: Vec<usize> = (0..originals.len()).collect();
        sources.shuffle(&mut self.rng);
        sources.truncate(planted);

        // Each copy goes somewhere after its original.
        let mut copies_after: BTreeMap<usize, Vec<CollectionRecord>> = BTreeMap::new();
        let mut pairs = Vec::with_capacity(planted);
        for &source in &sources {
            let original = &originals[source];
            let mut draft = original.draft();
            draft.fields.title = self.variant_title(&original.fields.title, original.fields.date_span);
            if self.rng.random_bool(0.2) {
                let name = draft.fields.repository_name.take().unwrap_or_default();
                draft.fields.repository_name = Some(format!("The {name}"));
            }
            let copy = self.publish(draft);
            pairs.push((copy.id.clone(), original.id.clone()));
            let slot = self.rng.random_range(source..originals.len());
            copies_after.entry(slot).or_default().push(copy);
        }

        let mut records = Vec::with_capacity(n);
        for (index, original) in originals.into_iter().enumerate() {
            records.push(original);
            if let Some(copies) = copies_after.remove(&index) {
                records.extend(copies);
            }
        }
        DedupCorpus { records, planted: pairs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{extract_print_entries, ocr_cleanup};
    use crate::model::validate_record_at;

    #[test]
    fn drafts_validate() {
        let vocab = Vocabularies::builtin();
        let mut synth = Synth::new(7);
        for _ in 0..300 {
            let draft = synth.draft();
            let report = validate_record_at(&draft, &vocab, 2026);
            assert!(report.errors.is_empty(), "{:?}", report.errors);
        }
    }

    #[test]
    fn seeded_output_repeats() {
        let a = Synth::new(3).records(20);
        let b = Synth::new(3).records(20);
        assert_eq!(a, b);
        assert_ne!(a, Synth::new(4).records(20));
    }

    #[test]
    fn clean_guide_round_trips() {
        let guide = Synth::new(11).guide(50);
        let got = extract_print_entries(&ocr_cleanup(&guide.text).cleaned);
        let fields: Vec<_> = got.entries.into_iter().map(|e| e.raw_fields).collect();
        assert_eq!(fields, guide.expected);
    }

    #[test]
    fn noise_stays_within_tables() {
        let mut synth = Synth::new(5);
        let guide = synth.guide(100);
        let (noisy, counts) = synth.ocr_noise(&guide.text, 1.0, 1.0);
        assert_eq!(noisy.len(), guide.text.len());
        assert!(counts.labels_perturbed > 100);
        assert!(counts.year_digits_swapped > 0);
        for (a, b) in guide.text.chars().zip(noisy.chars()) {
            if a != b {
                let allowed = LABEL_CONFUSIONS.contains(&(a, b)) || YEAR_DIGIT_SWAPS.contains(&(a, b));
                assert!(allowed, "{a:?} -> {b:?}");
            }
        }
        let (same, counts) = synth.ocr_noise(&guide.text, 0.0, 0.0);
        assert_eq!(same, guide.text);
        assert_eq!(counts, NoiseCounts::default());
    }

    #[test]
    fn dedup_corpus_shape() {
        let corpus = Synth::new(9).dedup_corpus(200, 10);
        assert_eq!(corpus.records.len(), 200);
        assert_eq!(corpus.planted.len(), 10);
        let position = |id: &str| corpus.records.iter().position(|r| r.id == id).unwrap();
        for (copy, original) in &corpus.planted {
            assert!(position(original) < position(copy));
        }
    }
}
