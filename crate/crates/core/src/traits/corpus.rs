use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::identity::IdentityMap;
use crate::ingest::EmailMessage;

pub const DEFAULT_MIN_WORDS: usize = 3500;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorCorpus {
    pub identity_id: String,
    pub text: String,
    pub word_count: usize,
    pub eligible: bool,
}

/// Whitespace-separated token count.
pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Concatenates each identity's cleaned message bodies in timestamp order.
///
/// One corpus per identity with at least one message, sorted by identity id.
/// Senders absent from `map` are ignored. `eligible` is `word_count >= min_words`.
pub fn build_author_corpus(messages: &[EmailMessage], map: &IdentityMap, min_words: usize) -> Vec<AuthorCorpus> {
    let mut grouped: BTreeMap<&str, Vec<&EmailMessage>> = BTreeMap::new();
    for m in messages {
        if let Some(id) = map.lookup(&m.sender_email) {
            grouped.entry(id.id.as_str()).or_default().push(m);
        }
    }
    grouped
        .into_iter()
        .map(|(id, mut msgs)| {
            msgs.sort_by(|a, b| {
                (a.timestamp, &a.list_name, &a.message_id).cmp(&(b.timestamp, &b.list_name, &b.message_id))
            });
            let text = msgs
                .iter()
                .map(|m| m.body_clean.as_str())
                .collect::<Vec<_>>()
                .join("\n");
            let word_count = word_count(&text);
            AuthorCorpus {
                identity_id: id.to_string(),
                text,
                word_count,
                eligible: word_count >= min_words,
            }
        })
        .collect()
}
