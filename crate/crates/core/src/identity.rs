//! Canonical developer identities across git authors and list senders.
//!
//! Two automatic rules merge raw `(name, email)` pairs: identical e-mail after
//! lowercasing, and identical normalized multi-token names. Override files
//! force further merges (`merge`) or pin people apart (`never_merge`).

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IdentityError {
    #[error("empty e-mail in raw pair {0}")]
    EmptyEmail(usize),
    #[error("override merge group {group} joins e-mails pinned apart by never_merge: {a} / {b}")]
    ConflictingOverride { group: usize, a: String, b: String },
    #[error("override merge groups {0} and {1} overlap")]
    OverlappingGroups(usize, usize),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Identity {
    pub id: String,
    pub canonical_email: String,
    pub emails: BTreeSet<String>,
    pub names: BTreeSet<String>,
}

/// Manual alias overrides, as read from the overrides JSON file.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AliasOverride {
    #[serde(default)]
    pub merge: Vec<Vec<String>>,
    #[serde(default)]
    pub never_merge: Vec<Vec<String>>,
}

impl AliasOverride {
    pub fn from_reader<R: Read>(r: R) -> Result<Self, IdentityError> {
        Ok(serde_json::from_reader(r)?)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityMap {
    identities: Vec<Identity>,
    #[serde(skip)]
    by_email: BTreeMap<String, usize>,
}

impl IdentityMap {
    fn from_identities(mut identities: Vec<Identity>) -> Self {
        identities.sort_by(|a, b| a.canonical_email.cmp(&b.canonical_email));
        let by_email = identities
            .iter()
            .enumerate()
            .flat_map(|(i, id)| id.emails.iter().map(move |e| (e.clone(), i)))
            .collect();
        Self { identities, by_email }
    }

    pub fn identities(&self) -> &[Identity] {
        &self.identities
    }

    pub fn len(&self) -> usize {
        self.identities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.identities.is_empty()
    }

    /// Case-insensitive e-mail lookup.
    pub fn lookup(&self, email: &str) -> Option<&Identity> {
        self.by_email
            .get(&normalize_email(email))
            .map(|&i| &self.identities[i])
    }

    /// `identities.json` body.
    pub fn write_json<W: Write>(&self, mut out: W) -> Result<(), IdentityError> {
        serde_json::to_writer_pretty(&mut out, self)?;
        out.write_all(b"\n")?;
        Ok(())
    }

    pub fn read_json<R: Read>(r: R) -> Result<Self, IdentityError> {
        #[derive(Deserialize)]
        struct File {
            identities: Vec<Identity>,
        }
        let f: File = serde_json::from_reader(r)?;
        Ok(Self::from_identities(f.identities))
    }
}

pub fn normalize_email(email: &str) -> String {
    email.trim().to_lowercase()
}

/// Casefold, drop punctuation, collapse whitespace.
pub fn normalize_name(name: &str) -> String {
    let stripped: String = name
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect::<String>()
        .to_lowercase();
    stripped.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn identity_id(canonical_email: &str) -> String {
    let digest = Sha256::digest(canonical_email.as_bytes());
    format!("id-{}", &hex::encode(digest)[..16])
}

struct Partition {
    parent: Vec<usize>,
    members: Vec<Vec<usize>>,
}

impl Partition {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), members: (0..n).map(|i| vec![i]).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Root with the smaller index survives, so results do not depend on
    /// union order.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (keep, gone) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[gone] = keep;
        let moved = std::mem::take(&mut self.members[gone]);
        self.members[keep].extend(moved);
    }
}

/// Pairs of e-mail indices that must never share an identity, as a lookup
/// from email index to never-merge group ids.
struct NeverMerge {
    groups_of: BTreeMap<usize, Vec<usize>>,
}

impl NeverMerge {
    /// First pair of emails from one never-merge group that a union of the
    /// two components would bring together.
    fn conflict(&self, part: &mut Partition, a: usize, b: usize) -> Option<(usize, usize)> {
        let (ra, rb) = (part.find(a), part.find(b));
        if ra == rb {
            return None;
        }
        for &x in &part.members[ra] {
            let Some(gx) = self.groups_of.get(&x) else { continue };
            for &y in &part.members[rb] {
                if let Some(gy) = self.groups_of.get(&y) {
                    if gx.iter().any(|g| gy.contains(g)) {
                        return Some((x.min(y), x.max(y)));
                    }
                }
            }
        }
        None
    }
}

/// Merges raw author/sender pairs into canonical identities.
///
/// Override e-mails that never occur in `raw` are ignored.
pub fn resolve_identities(
    raw: &[(String, String)],
    overrides: &AliasOverride,
) -> Result<IdentityMap, IdentityError> {
    let mut names_of: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (i, (name, email)) in raw.iter().enumerate() {
        let email = normalize_email(email);
        if email.is_empty() {
            return Err(IdentityError::EmptyEmail(i));
        }
        let entry = names_of.entry(email).or_default();
        let name = name.trim();
        if !name.is_empty() {
            entry.insert(name.to_string());
        }
    }
    let emails: Vec<String> = names_of.keys().cloned().collect();
    let index: BTreeMap<&str, usize> = emails.iter().enumerate().map(|(i, e)| (e.as_str(), i)).collect();

    let mut never = NeverMerge { groups_of: BTreeMap::new() };
    for (g, group) in overrides.never_merge.iter().enumerate() {
        for e in group {
            if let Some(&i) = index.get(normalize_email(e).as_str()) {
                never.groups_of.entry(i).or_default().push(g);
            }
        }
    }

    let merge_groups: Vec<Vec<usize>> = overrides
        .merge
        .iter()
        .map(|g| {
            let set: BTreeSet<usize> = g
                .iter()
                .filter_map(|e| index.get(normalize_email(e).as_str()).copied())
                .collect();
            set.into_iter().collect()
        })
        .collect();
    let mut owner: BTreeMap<String, usize> = BTreeMap::new();
    for (g, group) in overrides.merge.iter().enumerate() {
        for e in group {
            if let Some(prev) = owner.insert(normalize_email(e), g) {
                if prev != g {
                    return Err(IdentityError::OverlappingGroups(prev, g));
                }
            }
        }
    }

    let mut part = Partition::new(emails.len());

    // rule 2: strong name match
    let mut by_name: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, e) in emails.iter().enumerate() {
        for n in &names_of[e] {
            let norm = normalize_name(n);
            if norm.split(' ').count() >= 2 {
                by_name.entry(norm).or_default().push(i);
            }
        }
    }
    for members in by_name.values() {
        for &b in members.iter().skip(1) {
            let a = members[0];
            if never.conflict(&mut part, a, b).is_none() {
                part.union(a, b);
            }
        }
    }

    // rule 3: forced merges
    for (g, members) in merge_groups.iter().enumerate() {
        for &b in members.iter().skip(1) {
            let a = members[0];
            if let Some((x, y)) = never.conflict(&mut part, a, b) {
                return Err(IdentityError::ConflictingOverride {
                    group: g,
                    a: emails[x].clone(),
                    b: emails[y].clone(),
                });
            }
            part.union(a, b);
        }
    }

    let mut identities = Vec::new();
    for root in 0..emails.len() {
        if part.find(root) != root {
            continue;
        }
        let member_emails: BTreeSet<String> =
            part.members[root].iter().map(|&i| emails[i].clone()).collect();
        let names: BTreeSet<String> = member_emails
            .iter()
            .flat_map(|e| names_of[e].iter().cloned())
            .collect();
        let canonical_email = member_emails.iter().next().cloned().expect("non-empty component");
        identities.push(Identity {
            id: identity_id(&canonical_email),
            canonical_email,
            emails: member_emails,
            names,
        });
    }
    Ok(IdentityMap::from_identities(identities))
}
