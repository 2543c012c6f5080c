/// Strips quoted text, signatures and reply attributions from a message body.
///
/// Rules, applied line by line:
/// - everything from the first line equal to `-- ` onward is dropped;
/// - lines starting with `>` are dropped;
/// - attribution lines of the form `On ... wrote:` are dropped;
/// - runs of blank lines collapse to one, leading and trailing blank lines go.
pub fn clean_email_body(body_raw: &str) -> String {
    let mut kept: Vec<&str> = Vec::new();
    for line in body_raw.split('\n') {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line == "-- " {
            break;
        }
        if line.starts_with('>') || is_attribution(line) {
            continue;
        }
        if line.trim().is_empty() {
            if kept.last().is_some_and(|l| l.is_empty()) || kept.is_empty() {
                continue;
            }
            kept.push("");
        } else {
            kept.push(line);
        }
    }
    while kept.last().is_some_and(|l| l.is_empty()) {
        kept.pop();
    }
    kept.join("\n")
}

fn is_attribution(line: &str) -> bool {
    let t = line.trim();
    t.starts_with("On ") && t.ends_with("wrote:")
}
