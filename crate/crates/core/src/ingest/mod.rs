//! Ingestion of git history exports and mbox mailing-list archives.
//!
//! Parsers are pure functions over an input stream. Output records are
//! normalized to UTC and carry exactly the fields written to
//! `commits.jsonl` / `messages.jsonl`.

mod clean;
mod component;
mod git;
mod mbox;
mod summary;

use std::io::{self, BufRead, Write};

use chrono::{DateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use clean::clean_email_body;
pub use component::{attribute_component, ComponentMap, DEFAULT_COMPONENT};
pub use git::parse_git_log;
pub use mbox::{parse_mbox, MboxParse, MboxWarning};
pub use summary::{ingest_summary, IngestSummary, SummaryRow};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("malformed record at line {0}")]
    MalformedRecord(usize),
    #[error("unparseable date at line {0}")]
    UnparseableDate(usize),
    #[error("malformed mbox: first non-empty line is not a \"From \" separator")]
    MalformedMbox,
    #[error("invalid date range: start must precede end")]
    InvalidDateRange,
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("json error at line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitRecord {
    pub commit_id: String,
    pub author_name: String,
    pub author_email: String,
    pub timestamp: DateTime<Utc>,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmailMessage {
    pub message_id: String,
    pub list_name: String,
    pub sender_name: String,
    pub sender_email: String,
    pub timestamp: DateTime<Utc>,
    pub subject: String,
    pub body_raw: String,
    pub body_clean: String,
}

/// Half-open time window `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawDateRange")]
pub struct DateRange {
    start: DateTime<Utc>,
    end: DateTime<Utc>,
}

#[derive(Deserialize)]
struct RawDateRange {
    start: DateTime<Utc>,
    end: DateTime<Utc>,
}

impl TryFrom<RawDateRange> for DateRange {
    type Error = IngestError;

    fn try_from(raw: RawDateRange) -> Result<Self, Self::Error> {
        DateRange::new(raw.start, raw.end)
    }
}

impl DateRange {
    pub fn new(start: DateTime<Utc>, end: DateTime<Utc>) -> Result<Self, IngestError> {
        if start < end {
            Ok(Self { start, end })
        } else {
            Err(IngestError::InvalidDateRange)
        }
    }

    pub fn start(&self) -> DateTime<Utc> {
        self.start
    }

    pub fn end(&self) -> DateTime<Utc> {
        self.end
    }

    /// Inclusive of `start`, exclusive of `end`.
    pub fn contains(&self, t: DateTime<Utc>) -> bool {
        self.start <= t && t < self.end
    }
}

impl Default for DateRange {
    /// 2003-01-01 to 2015-01-01 UTC.
    fn default() -> Self {
        Self {
            start: Utc.with_ymd_and_hms(2003, 1, 1, 0, 0, 0).unwrap(),
            end: Utc.with_ymd_and_hms(2015, 1, 1, 0, 0, 0).unwrap(),
        }
    }
}

pub fn filter_commits(commits: Vec<CommitRecord>, range: &DateRange) -> Vec<CommitRecord> {
    commits
        .into_iter()
        .filter(|c| range.contains(c.timestamp))
        .collect()
}

pub fn filter_messages(messages: Vec<EmailMessage>, range: &DateRange) -> Vec<EmailMessage> {
    messages
        .into_iter()
        .filter(|m| range.contains(m.timestamp))
        .collect()
}

/// Writes one JSON object per line, LF terminated.
pub fn write_jsonl<T: Serialize, W: Write>(records: &[T], mut out: W) -> Result<(), IngestError> {
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl<T: for<'de> Deserialize<'de>, R: BufRead>(input: R) -> Result<Vec<T>, IngestError> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|source| IngestError::Json { line: i + 1, source })?;
        out.push(rec);
    }
    Ok(out)
}

/// Parses the timestamp forms found in git exports: RFC 3339 and git's
/// `--date=iso` output (`2005-04-07 15:13:13 -0700`).
pub(crate) fn parse_iso_timestamp(s: &str) -> Option<DateTime<Utc>> {
    let s = s.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%d %H:%M:%S %z", "%Y-%m-%dT%H:%M:%S%z"] {
        if let Ok(t) = DateTime::parse_from_str(s, fmt) {
            return Some(t.with_timezone(&Utc));
        }
    }
    None
}
