//! Bipartite committer <-> mailing-list communication graph.

mod dot;
mod graphml;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cluster::ClusterAssignment;
use crate::identity::IdentityMap;
use crate::ingest::EmailMessage;

pub use dot::{export_dot, penwidth, PALETTE, LIST_COLOR, UNCLUSTERED_COLOR};
pub use graphml::{export_graphml, parse_graphml};

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graphml parse error: {0}")]
    Xml(String),
    #[error("graphml structure error: {0}")]
    Structure(String),
}

pub const DEFAULT_MIN_MESSAGES: u64 = 10;

/// Which count the inclusion threshold applies to.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMode {
    /// Some single list received more than `min_messages` from the committer.
    #[default]
    PerList,
    /// The committer's total over all lists exceeds `min_messages`.
    Total,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommitterNode {
    pub identity_id: String,
    pub personality_cluster: Option<usize>,
    pub technical_cluster: Option<usize>,
    pub total_messages: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub identity_id: String,
    pub list_name: String,
    pub weight: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CommGraph {
    /// Sorted by identity id.
    pub committers: Vec<CommitterNode>,
    /// Sorted list names.
    pub lists: Vec<String>,
    /// Sorted by (identity id, list name).
    pub edges: Vec<Edge>,
}

pub(crate) fn committer_node_id(id: &str) -> String {
    format!("committer:{id}")
}

pub(crate) fn list_node_id(name: &str) -> String {
    format!("list:{name}")
}

/// Builds the graph from date-filtered messages.
///
/// A committer is kept when the count selected by `mode` is strictly greater
/// than `min_messages`; kept committers retain every positive-weight edge.
/// Senders missing from `map` are ignored. Every list seen in `messages` is a
/// node.
pub fn build_comm_graph(
    messages: &[EmailMessage],
    map: &IdentityMap,
    personality: Option<&ClusterAssignment>,
    technical: Option<&ClusterAssignment>,
    min_messages: u64,
    mode: ThresholdMode,
) -> CommGraph {
    let mut counts: BTreeMap<&str, BTreeMap<&str, u64>> = BTreeMap::new();
    let mut lists: BTreeSet<&str> = BTreeSet::new();
    for m in messages {
        lists.insert(m.list_name.as_str());
        if let Some(id) = map.lookup(&m.sender_email) {
            *counts
                .entry(id.id.as_str())
                .or_default()
                .entry(m.list_name.as_str())
                .or_default() += 1;
        }
    }
    let mut g = CommGraph { lists: lists.into_iter().map(str::to_string).collect(), ..Default::default() };
    for (id, per_list) in counts {
        let total: u64 = per_list.values().sum();
        let max = per_list.values().copied().max().unwrap_or(0);
        let keep = match mode {
            ThresholdMode::PerList => max > min_messages,
            ThresholdMode::Total => total > min_messages,
        };
        if !keep {
            continue;
        }
        g.committers.push(CommitterNode {
            identity_id: id.to_string(),
            personality_cluster: personality.and_then(|a| a.label(id)),
            technical_cluster: technical.and_then(|a| a.label(id)),
            total_messages: total,
        });
        for (list, w) in per_list {
            g.edges.push(Edge { identity_id: id.to_string(), list_name: list.to_string(), weight: w });
        }
    }
    g
}

impl CommGraph {
    /// Edges join a committer node to a list node, never two of a kind.
    pub fn is_bipartite(&self) -> bool {
        let committers: BTreeSet<&str> = self.committers.iter().map(|c| c.identity_id.as_str()).collect();
        let lists: BTreeSet<&str> = self.lists.iter().map(String::as_str).collect();
        self.edges
            .iter()
            .all(|e| committers.contains(e.identity_id.as_str()) && lists.contains(e.list_name.as_str()))
    }

    pub fn max_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.weight).max().unwrap_or(0)
    }
}
