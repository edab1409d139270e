//! The append-only event log: one JSON event per LF-terminated line.

use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Decision, RevisionEntry, StoreError, Submission};

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
#[serde(tag = "event", rename_all = "snake_case")]
pub(crate) enum Event {
    Submitted {
        submission: Submission,
    },
    Rejected {
        submission_id: String,
        decision: Decision,
    },
    Revision {
        entry: RevisionEntry,
        /// Set on the create revision of an approved submission.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        approved_submission: Option<String>,
    },
}

pub(crate) struct EventLog {
    file: File,
}

/// Parses log bytes. A final line without its LF is a torn write and is
/// dropped; its byte offset is returned so a writer can cut it off.
fn parse(bytes: &[u8]) -> Result<(Vec<Event>, usize), StoreError> {
    let complete = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
    let mut events = Vec::new();
    for (index, line) in bytes[..complete].split(|&b| b == b'\n').enumerate() {
        if line.is_empty() {
            continue;
        }
        let event = serde_json::from_slice(line).map_err(|e| StoreError::Corrupt {
            line: index + 1,
            message: e.to_string(),
        })?;
        events.push(event);
    }
    Ok((events, complete))
}

pub(crate) fn read_events(path: &Path) -> Result<Vec<Event>, StoreError> {
    let bytes = std::fs::read(path)?;
    Ok(parse(&bytes)?.0)
}

impl EventLog {
    /// Opens the log for appending and returns the events already in it.
    pub fn open(path: &Path) -> Result<(EventLog, Vec<Event>), StoreError> {
        let mut file = OpenOptions::new().read(true).write(true).open(path)?;
        let mut bytes = Vec::new();
        file.read_to_end(&mut bytes)?;
        let (events, complete) = parse(&bytes)?;
        if complete < bytes.len() {
            file.set_len(complete as u64)?;
        }
        file.seek(SeekFrom::End(0))?;
        Ok((EventLog { file }, events))
    }

    /// Writes the events and syncs them to disk before returning.
    pub fn append(&mut self, events: &[Event]) -> Result<(), StoreError> {
        let mut buf = Vec::new();
        for event in events {
            serde_json::to_writer(&mut buf, event).map_err(std::io::Error::other)?;
            buf.push(b'\n');
        }
        self.file.write_all(&buf)?;
        self.file.sync_data()?;
        Ok(())
    }
}
