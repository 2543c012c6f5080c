use std::io::BufRead;

use super::{parse_iso_timestamp, CommitRecord, IngestError};

enum State {
    Between,
    Author { id: String },
    Date { id: String, name: String, email: String },
    Blank(CommitRecord),
    Files(CommitRecord),
}

/// Parses the plain-text git-log export:
///
/// ```text
/// commit <id>
/// author <name> <<email>>
/// date <ISO-8601>
///
/// path/one
/// path/two
/// ---
/// ```
///
/// Blank lines between records are ignored. File paths are deduplicated
/// within a record, keeping first-seen order.
pub fn parse_git_log<R: BufRead>(input: R) -> Result<Vec<CommitRecord>, IngestError> {
    let mut out = Vec::new();
    let mut state = State::Between;
    let mut line_no = 0;
    for line in input.lines() {
        let line = line?;
        line_no += 1;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        state = match state {
            State::Between => {
                if line.trim().is_empty() {
                    State::Between
                } else {
                    let id = line
                        .strip_prefix("commit ")
                        .map(str::trim)
                        .filter(|id| !id.is_empty())
                        .ok_or(IngestError::MalformedRecord(line_no))?;
                    State::Author { id: id.to_string() }
                }
            }
            State::Author { id } => {
                let (name, email) = line
                    .strip_prefix("author ")
                    .and_then(split_author)
                    .ok_or(IngestError::MalformedRecord(line_no))?;
                State::Date { id, name, email }
            }
            State::Date { id, name, email } => {
                let raw = line
                    .strip_prefix("date ")
                    .ok_or(IngestError::MalformedRecord(line_no))?;
                let timestamp =
                    parse_iso_timestamp(raw).ok_or(IngestError::UnparseableDate(line_no))?;
                State::Blank(CommitRecord {
                    commit_id: id,
                    author_name: name,
                    author_email: email,
                    timestamp,
                    files: Vec::new(),
                })
            }
            State::Blank(rec) => {
                if !line.is_empty() {
                    return Err(IngestError::MalformedRecord(line_no));
                }
                State::Files(rec)
            }
            State::Files(mut rec) => {
                if line == "---" {
                    out.push(rec);
                    State::Between
                } else if line.trim().is_empty() {
                    return Err(IngestError::MalformedRecord(line_no));
                } else {
                    if !rec.files.iter().any(|f| f == line) {
                        rec.files.push(line.to_string());
                    }
                    State::Files(rec)
                }
            }
        };
    }
    match state {
        State::Between => Ok(out),
        _ => Err(IngestError::MalformedRecord(line_no + 1)),
    }
}

/// `Jane Roe <jane@x.org>` -> ("Jane Roe", "jane@x.org").
fn split_author(s: &str) -> Option<(String, String)> {
    let s = s.trim();
    let open = s.rfind('<')?;
    let email = s[open + 1..].strip_suffix('>')?.trim();
    if email.is_empty() {
        return None;
    }
    Some((s[..open].trim().to_string(), email.to_string()))
}
