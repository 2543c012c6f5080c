use std::io::BufRead;

use chrono::{DateTime, Utc};
use log::warn;

use super::{clean_email_body, parse_iso_timestamp, EmailMessage, IngestError};

/// Non-fatal problems met while reading an archive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MboxWarning {
    /// Message skipped because a required header is absent or unusable.
    MissingHeader { message_index: usize, header: &'static str },
    /// An HTML part (or HTML-only body) was dropped.
    HtmlPartSkipped { message_index: usize },
}

#[derive(Debug, Clone, Default)]
pub struct MboxParse {
    pub messages: Vec<EmailMessage>,
    pub warnings: Vec<MboxWarning>,
}

/// Reads an RFC 4155 mbox archive.
///
/// Messages are delimited by lines starting with `From `. Body lines of the
/// form `>From `, `>>From `, ... lose one leading `>`. Messages without a
/// usable `From:` or `Date:` header are skipped and reported as warnings.
pub fn parse_mbox<R: BufRead>(input: R, list_name: &str) -> Result<MboxParse, IngestError> {
    let mut chunks: Vec<Vec<String>> = Vec::new();
    for line in input.lines() {
        let line = line?;
        let line = match line.strip_suffix('\r') {
            Some(l) => l.to_string(),
            None => line,
        };
        if line.starts_with("From ") {
            chunks.push(Vec::new());
            continue;
        }
        match chunks.last_mut() {
            Some(chunk) => chunk.push(line),
            None if line.trim().is_empty() => {}
            None => return Err(IngestError::MalformedMbox),
        }
    }

    let mut parse = MboxParse::default();
    for (index, chunk) in chunks.into_iter().enumerate() {
        if let Some(m) = parse_message(index, chunk, list_name, &mut parse.warnings) {
            parse.messages.push(m);
        }
    }
    for w in &parse.warnings {
        warn!("{list_name}: {w:?}");
    }
    Ok(parse)
}

type Headers = Vec<(String, String)>;

fn header<'a>(headers: &'a Headers, name: &str) -> Option<&'a str> {
    headers
        .iter()
        .find(|(k, _)| k.eq_ignore_ascii_case(name))
        .map(|(_, v)| v.as_str())
}

/// Splits header block from body; folds continuation lines.
fn split_headers(lines: &[String]) -> (Headers, &[String]) {
    let mut headers: Headers = Vec::new();
    let mut i = 0;
    while i < lines.len() {
        let line = &lines[i];
        i += 1;
        if line.is_empty() {
            break;
        }
        if line.starts_with([' ', '\t']) {
            if let Some((_, v)) = headers.last_mut() {
                v.push(' ');
                v.push_str(line.trim());
            }
            continue;
        }
        if let Some((k, v)) = line.split_once(':') {
            headers.push((k.trim().to_string(), v.trim().to_string()));
        }
    }
    (headers, &lines[i..])
}

fn parse_message(
    index: usize,
    mut lines: Vec<String>,
    list_name: &str,
    warnings: &mut Vec<MboxWarning>,
) -> Option<EmailMessage> {
    // the blank line preceding the next separator belongs to the framing
    if lines.last().is_some_and(|l| l.is_empty()) {
        lines.pop();
    }
    for line in lines.iter_mut() {
        if is_escaped_from(line) {
            line.remove(0);
        }
    }
    let (headers, body) = split_headers(&lines);

    let Some((sender_name, sender_email)) = header(&headers, "From").and_then(parse_address) else {
        warnings.push(MboxWarning::MissingHeader { message_index: index, header: "From" });
        return None;
    };
    let Some(timestamp) = header(&headers, "Date").and_then(parse_mail_date) else {
        warnings.push(MboxWarning::MissingHeader { message_index: index, header: "Date" });
        return None;
    };
    let subject = header(&headers, "Subject").unwrap_or_default().to_string();
    let message_id = header(&headers, "Message-ID")
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .unwrap_or_else(|| format!("{list_name}:{index}"));

    let mut html_skipped = false;
    let body_raw = extract_text(&headers, body, &mut html_skipped);
    if html_skipped {
        warnings.push(MboxWarning::HtmlPartSkipped { message_index: index });
    }
    let body_clean = clean_email_body(&body_raw);
    Some(EmailMessage {
        message_id,
        list_name: list_name.to_string(),
        sender_name,
        sender_email,
        timestamp,
        subject,
        body_raw,
        body_clean,
    })
}

fn is_escaped_from(line: &str) -> bool {
    let rest = line.trim_start_matches('>');
    rest.len() < line.len() && rest.starts_with("From ")
}

/// Plain-text content of a message or MIME part. HTML parts are dropped.
fn extract_text(headers: &Headers, body: &[String], html_skipped: &mut bool) -> String {
    let ctype = header(headers, "Content-Type").unwrap_or("text/plain");
    let mime = ctype.split(';').next().unwrap_or("").trim().to_ascii_lowercase();
    if mime.starts_with("multipart/") {
        let Some(boundary) = mime_param(ctype, "boundary") else {
            return body.join("\n");
        };
        let open = format!("--{boundary}");
        let close = format!("--{boundary}--");
        let mut parts: Vec<&[String]> = Vec::new();
        let mut start: Option<usize> = None;
        for (i, line) in body.iter().enumerate() {
            let l = line.trim_end();
            if l == open || l == close {
                if let Some(s) = start {
                    parts.push(&body[s..i]);
                }
                start = if l == close { None } else { Some(i + 1) };
            }
        }
        if let Some(s) = start {
            parts.push(&body[s..]);
        }
        let texts: Vec<String> = parts
            .into_iter()
            .map(|part| {
                let (h, b) = split_headers(part);
                extract_text(&h, b, html_skipped)
            })
            .filter(|t| !t.is_empty())
            .collect();
        texts.join("\n")
    } else if mime == "text/html" {
        *html_skipped = true;
        String::new()
    } else if mime.starts_with("text/") || mime.is_empty() {
        let mut lines = body;
        while lines.last().is_some_and(|l| l.is_empty()) {
            lines = &lines[..lines.len() - 1];
        }
        lines.join("\n")
    } else {
        String::new()
    }
}

fn mime_param(ctype: &str, name: &str) -> Option<String> {
    ctype.split(';').skip(1).find_map(|p| {
        let (k, v) = p.split_once('=')?;
        k.trim()
            .eq_ignore_ascii_case(name)
            .then(|| v.trim().trim_matches('"').to_string())
    })
}

/// Parses `Name <addr>`, `addr (Name)`, bare `addr`, and the pipermail
/// obfuscation `jane at x.org`.
fn parse_address(raw: &str) -> Option<(String, String)> {
    let raw = raw.trim();
    let (name, email) = if let (Some(open), Some(close)) = (raw.rfind('<'), raw.rfind('>')) {
        if open >= close {
            return None;
        }
        (raw[..open].to_string(), raw[open + 1..close].to_string())
    } else if let (Some(open), Some(close)) = (raw.find('('), raw.rfind(')')) {
        if open >= close {
            return None;
        }
        (raw[open + 1..close].to_string(), raw[..open].to_string())
    } else {
        (String::new(), raw.to_string())
    };
    let email = email.trim().replace(" at ", "@");
    if email.is_empty() || !email.contains('@') {
        return None;
    }
    let name = name.trim().trim_matches('"').trim().to_string();
    Some((name, email))
}

fn parse_mail_date(raw: &str) -> Option<DateTime<Utc>> {
    let raw = raw.trim();
    if let Ok(t) = DateTime::parse_from_rfc2822(raw) {
        return Some(t.with_timezone(&Utc));
    }
    // trailing zone comments such as "(PST)"
    if let Some(open) = raw.rfind('(') {
        if let Ok(t) = DateTime::parse_from_rfc2822(raw[..open].trim()) {
            return Some(t.with_timezone(&Utc));
        }
    }
    parse_iso_timestamp(raw)
}

#[cfg(test)]
mod tests {
    use super::*;

    const THREE: &str = "\
From jane@x.org Mon Jan  3 10:00:00 2005
From: Jane Roe <jane@x.org>
Date: Mon, 3 Jan 2005 10:00:00 +0000
Subject: first
Message-ID: <1@x.org>

Hello all.
>From here on we use the new API.
>>From nested escape

From john@y.com Tue Jan  4 10:00:00 2005
From: john at y.com (John Doe)
Date: Tue, 4 Jan 2005 10:00:00 -0800 (PST)
Subject: second

On Mon, Jane Roe wrote:
> Hello all.
Sounds good.
-- 
John

From bob@z.org Wed Jan  5 10:00:00 2005
From: \"Bob\" <bob@z.org>
Date: Wed, 5 Jan 2005 10:00:00 +0000
Subject: third
Content-Type: multipart/alternative; boundary=\"XYZ\"

--XYZ
Content-Type: text/plain

plain part
--XYZ
Content-Type: text/html

<p>html part</p>
--XYZ--
";

    #[test]
    fn three_messages() {
        let p = parse_mbox(THREE.as_bytes(), "platform-dev").unwrap();
        assert_eq!(p.messages.len(), 3);
        let m0 = &p.messages[0];
        assert_eq!(m0.sender_email, "jane@x.org");
        assert_eq!(m0.sender_name, "Jane Roe");
        assert_eq!(m0.message_id, "<1@x.org>");
        assert_eq!(
            m0.body_raw,
            "Hello all.\nFrom here on we use the new API.\n>From nested escape"
        );
        let m1 = &p.messages[1];
        assert_eq!(m1.sender_email, "john@y.com");
        assert_eq!(m1.sender_name, "John Doe");
        assert_eq!(m1.timestamp.to_rfc3339(), "2005-01-04T18:00:00+00:00");
        assert_eq!(m1.message_id, "platform-dev:1");
        assert_eq!(m1.body_clean, "Sounds good.");
        let m2 = &p.messages[2];
        assert_eq!(m2.sender_name, "Bob");
        assert_eq!(m2.body_raw, "plain part");
        assert_eq!(p.warnings, vec![MboxWarning::HtmlPartSkipped { message_index: 2 }]);
    }

    #[test]
    fn leading_garbage_is_malformed() {
        let s = "Subject: hi\nFrom: a@b\n\nbody\n";
        assert!(matches!(
            parse_mbox(s.as_bytes(), "l"),
            Err(IngestError::MalformedMbox)
        ));
    }

    #[test]
    fn leading_blank_lines_are_fine() {
        let s = "\n\nFrom a@b Mon Jan  3 10:00:00 2005\nFrom: a@b\nDate: Mon, 3 Jan 2005 10:00:00 +0000\n\nx\n";
        assert_eq!(parse_mbox(s.as_bytes(), "l").unwrap().messages.len(), 1);
    }

    #[test]
    fn missing_headers_skip_with_warning() {
        let s = "From a\nFrom: a@b\n\nno date\n\nFrom b\nDate: Mon, 3 Jan 2005 10:00:00 +0000\n\nno from\n\nFrom c\nFrom: c@d\nDate: Mon, 3 Jan 2005 10:00:00 +0000\n\nok\n";
        let p = parse_mbox(s.as_bytes(), "l").unwrap();
        assert_eq!(p.messages.len(), 1);
        assert_eq!(
            p.warnings,
            vec![
                MboxWarning::MissingHeader { message_index: 0, header: "Date" },
                MboxWarning::MissingHeader { message_index: 1, header: "From" },
            ]
        );
    }

    #[test]
    fn empty_archive() {
        assert!(parse_mbox("".as_bytes(), "l").unwrap().messages.is_empty());
    }
}
