use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, Write};

use super::{CommitRecord, EmailMessage};

/// One row per repository / mailing list sharing a name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SummaryRow {
    pub name: String,
    pub committers: usize,
    pub commits: usize,
    pub senders: usize,
    pub messages: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestSummary {
    pub rows: Vec<SummaryRow>,
}

/// Counts committers, commits, senders and messages per source name.
///
/// Repositories and lists with the same name land on the same row; rows are
/// sorted by name. People are counted by distinct lowercase e-mail.
pub fn ingest_summary(repos: &[(String, Vec<CommitRecord>)], messages: &[EmailMessage]) -> IngestSummary {
    #[derive(Default)]
    struct Acc {
        committers: BTreeSet<String>,
        commits: usize,
        senders: BTreeSet<String>,
        messages: usize,
    }
    let mut acc: BTreeMap<&str, Acc> = BTreeMap::new();
    for (name, commits) in repos {
        let a = acc.entry(name.as_str()).or_default();
        for c in commits {
            a.committers.insert(c.author_email.trim().to_lowercase());
            a.commits += 1;
        }
    }
    for m in messages {
        let a = acc.entry(m.list_name.as_str()).or_default();
        a.senders.insert(m.sender_email.trim().to_lowercase());
        a.messages += 1;
    }
    IngestSummary {
        rows: acc
            .into_iter()
            .map(|(name, a)| SummaryRow {
                name: name.to_string(),
                committers: a.committers.len(),
                commits: a.commits,
                senders: a.senders.len(),
                messages: a.messages,
            })
            .collect(),
    }
}

impl IngestSummary {
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "name,committers,commits,senders,messages")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                crate::csv_field(&r.name),
                r.committers,
                r.commits,
                r.senders,
                r.messages
            )?;
        }
        Ok(())
    }
}
