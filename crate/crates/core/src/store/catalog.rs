use std::fs::{File, OpenOptions};
use std::path::Path;
use std::sync::{Arc, Mutex, PoisonError};

use arc_swap::ArcSwap;
use chrono::{DateTime, Datelike, Duration, SecondsFormat, Utc};
use imbl::OrdMap;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::ingest::{detect_duplicates, DedupConfig, IncomingSubmission};
use crate::model::{
    public_view, validate_record_at, CollectionRecord, PublicView, RecordFields, RecordStatus, Tier, Vocabularies,
};

use super::log::{read_events, Event, EventLog};
use super::patch::apply_patch;
use super::{ChangeKind, Decision, Principal, RevisionEntry, Role, StoreError, Submission, SubmissionState};

pub const LOG_FILE: &str = "catalog.log";
pub const LOCK_FILE: &str = "atlas.lock";

pub trait Clock: Send + Sync {
    fn now(&self) -> DateTime<Utc>;
}

pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> DateTime<Utc> {
        Utc::now()
    }
}

/// A deterministic clock that advances by a fixed step on every reading.
pub struct FixedClock {
    next: Mutex<DateTime<Utc>>,
    step: Duration,
}

impl FixedClock {
    pub fn new(start: DateTime<Utc>) -> Self {
        Self::stepping(start, Duration::seconds(1))
    }

    pub fn stepping(start: DateTime<Utc>, step: Duration) -> Self {
        FixedClock {
            next: Mutex::new(start),
            step,
        }
    }
}

impl Clock for FixedClock {
    fn now(&self) -> DateTime<Utc> {
        let mut next = self.next.lock().unwrap_or_else(PoisonError::into_inner);
        let now = *next;
        *next = now + self.step;
        now
    }
}

#[derive(Clone)]
pub struct CatalogOptions {
    pub vocab: Arc<Vocabularies>,
    pub clock: Arc<dyn Clock>,
    pub dedup: DedupConfig,
}

impl Default for CatalogOptions {
    fn default() -> Self {
        CatalogOptions {
            vocab: Arc::new(Vocabularies::builtin()),
            clock: Arc::new(SystemClock),
            dedup: DedupConfig::default(),
        }
    }
}

/// One consistent state of the catalog. Cheap to clone.
#[derive(Clone, Debug, Default)]
pub struct CatalogView {
    records: OrdMap<String, Arc<CollectionRecord>>,
    history: OrdMap<String, Arc<Vec<RevisionEntry>>>,
    submissions: OrdMap<String, Arc<Submission>>,
    generation: u64,
    last_modified: Option<DateTime<Utc>>,
}

impl CatalogView {
    pub fn record(&self, id: &str) -> Option<&Arc<CollectionRecord>> {
        self.records.get(id)
    }

    /// All records, tombstoned included, in id order.
    pub fn records(&self) -> impl Iterator<Item = &Arc<CollectionRecord>> {
        self.records.values()
    }

    pub fn published(&self) -> impl Iterator<Item = &Arc<CollectionRecord>> {
        self.records.values().filter(|r| r.is_published())
    }

    /// Public views of every publicly visible record, in id order.
    pub fn public_views(&self) -> Vec<PublicView> {
        self.records.values().filter_map(|r| public_view(r)).collect()
    }

    pub fn history(&self, id: &str) -> Option<&[RevisionEntry]> {
        self.history.get(id).map(|h| h.as_slice())
    }

    pub fn submission(&self, id: &str) -> Option<&Arc<Submission>> {
        self.submissions.get(id)
    }

    pub fn submissions(&self) -> impl Iterator<Item = &Arc<Submission>> {
        self.submissions.values()
    }

    pub fn submissions_in(&self, state: SubmissionState) -> impl Iterator<Item = &Arc<Submission>> {
        self.submissions.values().filter(move |s| s.state == state)
    }

    /// Number of committed mutations; changes whenever the state does.
    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn last_modified(&self) -> Option<DateTime<Utc>> {
        self.last_modified
    }

    fn touch(&mut self, at: DateTime<Utc>) {
        self.generation += 1;
        self.last_modified = Some(self.last_modified.map_or(at, |m| m.max(at)));
    }

    fn apply(&mut self, event: &Event) -> Result<(), String> {
        match event {
            Event::Submitted { submission } => {
                if self.submissions.contains_key(&submission.submission_id) {
                    return Err(format!("submission {} received twice", submission.submission_id));
                }
                self.submissions
                    .insert(submission.submission_id.clone(), Arc::new(submission.clone()));
                self.touch(submission.received_at);
            }
            Event::Rejected { submission_id, decision } => {
                let mut sub = self.pending(submission_id)?;
                sub.state = SubmissionState::Rejected;
                sub.decision = Some(decision.clone());
                self.submissions.insert(submission_id.clone(), Arc::new(sub));
                self.touch(decision.at);
            }
            Event::Revision {
                entry,
                approved_submission,
            } => {
                let id = &entry.record_id;
                let known = self.history.get(id).map_or(0, |h| h.len() as u64);
                if entry.revision != known + 1 || entry.record.revision != entry.revision || &entry.record.id != id {
                    return Err(format!("revision {} of {id} out of sequence", entry.revision));
                }
                if (entry.change == ChangeKind::Create) != (known == 0) {
                    return Err(format!("create of {id} must be its first revision"));
                }
                if let Some(sub_id) = approved_submission {
                    let mut sub = self.pending(sub_id)?;
                    sub.state = SubmissionState::Approved;
                    sub.decision = Some(Decision {
                        by: entry.author.clone(),
                        at: entry.at,
                        reason: None,
                        record_id: Some(id.clone()),
                    });
                    self.submissions.insert(sub_id.clone(), Arc::new(sub));
                }
                let mut history = self.history.get(id).cloned().unwrap_or_default();
                Arc::make_mut(&mut history).push(entry.clone());
                self.history.insert(id.clone(), history);
                self.records.insert(id.clone(), Arc::new(entry.record.clone()));
                self.touch(entry.at);
            }
        }
        Ok(())
    }

    fn pending(&self, submission_id: &str) -> Result<Submission, String> {
        match self.submissions.get(submission_id) {
            Some(s) if s.state == SubmissionState::Pending => Ok((**s).clone()),
            Some(_) => Err(format!("submission {submission_id} already decided")),
            None => Err(format!("unknown submission {submission_id}")),
        }
    }

    fn replay(events: &[Event]) -> Result<CatalogView, StoreError> {
        let mut view = CatalogView::default();
        for (index, event) in events.iter().enumerate() {
            view.apply(event).map_err(|message| StoreError::Corrupt {
                line: index + 1,
                message,
            })?;
        }
        Ok(view)
    }
}

enum Sink {
    Memory,
    ReadOnly,
    File { log: EventLog, _lock: File },
}

/// The record store. All mutations go through one writer; readers take
/// snapshots of the current [`CatalogView`] without locking.
pub struct Catalog {
    sink: Mutex<Sink>,
    view: ArcSwap<CatalogView>,
    options: CatalogOptions,
}

impl Catalog {
    /// A store that lives only in memory.
    pub fn in_memory(options: CatalogOptions) -> Self {
        Catalog {
            sink: Mutex::new(Sink::Memory),
            view: ArcSwap::from_pointee(CatalogView::default()),
            options,
        }
    }

    /// Creates the data directory and an empty log; a no-op when both exist.
    pub fn init(dir: &Path) -> Result<(), StoreError> {
        std::fs::create_dir_all(dir)?;
        OpenOptions::new().create(true).append(true).open(dir.join(LOG_FILE))?;
        Ok(())
    }

    /// Opens a data directory for writing. Fails with [`StoreError::Locked`]
    /// while another process has it open for writing.
    pub fn open(dir: &Path, options: CatalogOptions) -> Result<Self, StoreError> {
        let log_path = Self::log_path(dir)?;
        let lock = OpenOptions::new()
            .create(true)
            .truncate(false)
            .write(true)
            .open(dir.join(LOCK_FILE))?;
        match lock.try_lock() {
            Ok(()) => {}
            Err(std::fs::TryLockError::WouldBlock) => return Err(StoreError::Locked),
            Err(std::fs::TryLockError::Error(e)) => return Err(e.into()),
        }
        let (log, events) = EventLog::open(&log_path)?;
        Ok(Catalog {
            sink: Mutex::new(Sink::File { log, _lock: lock }),
            view: ArcSwap::from_pointee(CatalogView::replay(&events)?),
            options,
        })
    }

    /// Loads a data directory without taking the writer lock. Mutations
    /// fail with [`StoreError::Forbidden`].
    pub fn open_read_only(dir: &Path, options: CatalogOptions) -> Result<Self, StoreError> {
        let events = read_events(&Self::log_path(dir)?)?;
        Ok(Catalog {
            sink: Mutex::new(Sink::ReadOnly),
            view: ArcSwap::from_pointee(CatalogView::replay(&events)?),
            options,
        })
    }

    fn log_path(dir: &Path) -> Result<std::path::PathBuf, StoreError> {
        let path = dir.join(LOG_FILE);
        if path.is_file() {
            Ok(path)
        } else {
            Err(StoreError::NotInitialized(dir.display().to_string()))
        }
    }

    pub fn options(&self) -> &CatalogOptions {
        &self.options
    }

    pub fn vocab(&self) -> &Vocabularies {
        &self.options.vocab
    }

    /// The current state. The returned view never changes.
    pub fn view(&self) -> Arc<CatalogView> {
        self.view.load_full()
    }

    /// Runs `build` against the current state under the writer lock,
    /// persists the events it returns and publishes the new state.
    fn commit<T>(
        &self,
        build: impl FnOnce(&CatalogView, DateTime<Utc>) -> Result<(Vec<Event>, T), StoreError>,
    ) -> Result<T, StoreError> {
        let mut sink = self.sink.lock().unwrap_or_else(PoisonError::into_inner);
        if matches!(*sink, Sink::ReadOnly) {
            return Err(StoreError::Forbidden("catalog was opened read-only".into()));
        }
        let current = self.view.load_full();
        let (events, out) = build(&current, self.options.clock.now())?;
        let mut next = (*current).clone();
        for event in &events {
            next.apply(event).map_err(StoreError::Conflict)?;
        }
        if let Sink::File { log, .. } = &mut *sink {
            log.append(&events)?;
        }
        self.view.store(Arc::new(next));
        Ok(out)
    }

    /// Queues a parsed contribution. `contributor` is the principal name of
    /// an authenticated contributor.
    pub fn submit(&self, incoming: IncomingSubmission, contributor: Option<&str>) -> Result<Arc<Submission>, StoreError> {
        let mut all = self.submit_all(vec![(incoming, contributor.map(str::to_string))])?;
        Ok(all.pop().expect("one submission"))
    }

    /// Queues several contributions in one commit.
    pub fn submit_all(
        &self,
        items: Vec<(IncomingSubmission, Option<String>)>,
    ) -> Result<Vec<Arc<Submission>>, StoreError> {
        self.commit(|view, now| {
            let base = view.submissions.len();
            let mut events = Vec::with_capacity(items.len());
            let mut out = Vec::with_capacity(items.len());
            for (index, (incoming, contributor)) in items.into_iter().enumerate() {
                let duplicates =
                    detect_duplicates(&incoming.proposed.fields, view.published().map(|r| &**r), &self.options.dedup);
                let submission = Submission {
                    submission_id: format!("sub-{:06}", base + index + 1),
                    raw_fields: incoming.raw_fields,
                    proposed: incoming.proposed,
                    report: incoming.report,
                    requested_tier: incoming.requested_tier,
                    submitter: incoming.submitter,
                    source: incoming.source,
                    state: SubmissionState::Pending,
                    received_at: now,
                    contributor,
                    duplicates,
                    decision: None,
                };
                out.push(Arc::new(submission.clone()));
                events.push(Event::Submitted { submission });
            }
            Ok((events, out))
        })
    }

    /// Publishes a pending submission as a new record. `edits` is a JSON
    /// merge patch over the proposed fields; `tier` overrides the requested
    /// tier.
    pub fn approve(
        &self,
        submission_id: &str,
        author: &Principal,
        edits: Option<&Value>,
        tier: Option<Tier>,
    ) -> Result<Arc<CollectionRecord>, StoreError> {
        require_curator(author)?;
        self.commit(|view, now| {
            let sub = pending_submission(view, submission_id)?;
            let mut draft = match edits {
                Some(patch) => apply_patch(&sub.proposed, patch, self.vocab(), now.year())?,
                None => sub.proposed.clone(),
            };
            if let Some(tier) = tier {
                draft.fields.visibility.tier = tier;
            }
            let report = validate_record_at(&draft, self.vocab(), now.year());
            if !report.is_publishable() {
                return Err(StoreError::Validation(report));
            }
            let id = new_record_id(view, &draft.fields, now);
            let record = CollectionRecord {
                id: id.clone(),
                fields: draft.fields,
                normalization_issues: draft.normalization_issues,
                provenance: sub.source.clone(),
                status: RecordStatus::Published,
                revision: 1,
                created_at: now,
                updated_at: now,
                contributor: sub.contributor.clone(),
            };
            let entry = revision(author, ChangeKind::Create, record, now);
            let record = Arc::new(entry.record.clone());
            Ok((
                vec![Event::Revision {
                    entry,
                    approved_submission: Some(submission_id.to_string()),
                }],
                record,
            ))
        })
    }

    pub fn reject(&self, submission_id: &str, author: &Principal, reason: &str) -> Result<Arc<Submission>, StoreError> {
        require_curator(author)?;
        if reason.trim().is_empty() {
            return Err(StoreError::InvalidChange("a rejection needs a reason".into()));
        }
        self.commit(|view, now| {
            let mut sub = (**pending_submission(view, submission_id)?).clone();
            let decision = Decision {
                by: author.clone(),
                at: now,
                reason: Some(reason.to_string()),
                record_id: None,
            };
            sub.state = SubmissionState::Rejected;
            sub.decision = Some(decision.clone());
            Ok((
                vec![Event::Rejected {
                    submission_id: submission_id.to_string(),
                    decision,
                }],
                Arc::new(sub),
            ))
        })
    }

    /// Applies a JSON merge patch to a published record.
    pub fn amend(&self, id: &str, author: &Principal, changes: &Value) -> Result<Arc<CollectionRecord>, StoreError> {
        require_curator(author)?;
        self.commit(|view, now| {
            let current = live_record(view, id)?;
            let draft = apply_patch(&current.draft(), changes, self.vocab(), now.year())?;
            let report = validate_record_at(&draft, self.vocab(), now.year());
            if !report.is_publishable() {
                return Err(StoreError::Validation(report));
            }
            let change = if draft.fields.visibility.tier != current.tier() {
                ChangeKind::TierChange
            } else {
                ChangeKind::Amend
            };
            let mut record = (**current).clone();
            record.fields = draft.fields;
            record.normalization_issues = draft.normalization_issues;
            record.revision += 1;
            record.updated_at = now;
            Ok(single_revision(author, change, record, now))
        })
    }

    /// Withdraws a record from public view. Its history stays readable and
    /// its id is never reused.
    pub fn tombstone(&self, id: &str, author: &Principal) -> Result<Arc<CollectionRecord>, StoreError> {
        require_curator(author)?;
        self.commit(|view, now| {
            let mut record = (**live_record(view, id)?).clone();
            record.status = RecordStatus::Tombstoned;
            record.revision += 1;
            record.updated_at = now;
            Ok(single_revision(author, ChangeKind::Tombstone, record, now))
        })
    }
}

fn require_curator(author: &Principal) -> Result<(), StoreError> {
    if author.role == Role::Curator {
        Ok(())
    } else {
        Err(StoreError::Forbidden(format!("{} may not curate", author.role)))
    }
}

fn pending_submission<'v>(view: &'v CatalogView, id: &str) -> Result<&'v Arc<Submission>, StoreError> {
    let sub = view.submissions.get(id).ok_or_else(|| StoreError::NotFound {
        kind: "submission",
        id: id.to_string(),
    })?;
    match sub.state {
        SubmissionState::Pending => Ok(sub),
        state => Err(StoreError::Conflict(format!("submission {id} is already {}", state.as_str()))),
    }
}

fn live_record<'v>(view: &'v CatalogView, id: &str) -> Result<&'v Arc<CollectionRecord>, StoreError> {
    let record = view.records.get(id).ok_or_else(|| StoreError::NotFound {
        kind: "record",
        id: id.to_string(),
    })?;
    if record.is_published() {
        Ok(record)
    } else {
        Err(StoreError::Tombstoned(id.to_string()))
    }
}

fn revision(author: &Principal, change: ChangeKind, record: CollectionRecord, at: DateTime<Utc>) -> RevisionEntry {
    RevisionEntry {
        record_id: record.id.clone(),
        revision: record.revision,
        author: author.clone(),
        change,
        record,
        at,
    }
}

fn single_revision(
    author: &Principal,
    change: ChangeKind,
    record: CollectionRecord,
    at: DateTime<Utc>,
) -> (Vec<Event>, Arc<CollectionRecord>) {
    let entry = revision(author, change, record, at);
    let record = Arc::new(entry.record.clone());
    (
        vec![Event::Revision {
            entry,
            approved_submission: None,
        }],
        record,
    )
}

/// First 16 hex chars of SHA-256 over (repository name, title, creation
/// time); a counter is mixed in until the id is unused.
fn new_record_id(view: &CatalogView, fields: &RecordFields, at: DateTime<Utc>) -> String {
    let stamp = at.to_rfc3339_opts(SecondsFormat::Nanos, true);
    (0u64..)
        .map(|attempt| {
            let mut hash = Sha256::new();
            hash.update(fields.repository_name.as_deref().unwrap_or_default());
            hash.update([0]);
            hash.update(&fields.title);
            hash.update([0]);
            hash.update(&stamp);
            if attempt > 0 {
                hash.update([0]);
                hash.update(attempt.to_string());
            }
            hex::encode(hash.finalize())[..16].to_string()
        })
        .find(|id| !view.records.contains_key(id))
        .expect("an unused id exists")
}
