use std::fmt::Write as _;

use super::{committer_node_id, list_node_id, CommGraph};

/// Committer fill colors, indexed by personality cluster (wrapping).
pub const PALETTE: [&str; 9] = [
    "#9467bd", "#1f77b4", "#2ca02c", "#ff7f0e", "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
];
pub const LIST_COLOR: &str = "#d62728";
pub const UNCLUSTERED_COLOR: &str = "#d9d9d9";

/// `1 + 4 * weight / max_weight`.
pub fn penwidth(weight: u64, max_weight: u64) -> f64 {
    if max_weight == 0 {
        return 1.0;
    }
    1.0 + 4.0 * weight as f64 / max_weight as f64
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Undirected DOT graph. Committers are filled ellipses colored by
/// personality cluster; lists are boxes.
pub fn export_dot(g: &CommGraph) -> String {
    let mut out = String::from("graph comm {\n  node [style=filled];\n");
    for c in &g.committers {
        let color = c
            .personality_cluster
            .map_or(UNCLUSTERED_COLOR, |p| PALETTE[p % PALETTE.len()]);
        write!(
            out,
            "  {} [label={}, shape=ellipse, fillcolor={}, total_messages={}",
            quote(&committer_node_id(&c.identity_id)),
            quote(&c.identity_id),
            quote(color),
            c.total_messages
        )
        .unwrap();
        if let Some(p) = c.personality_cluster {
            write!(out, ", personality_cluster={p}").unwrap();
        }
        if let Some(t) = c.technical_cluster {
            write!(out, ", technical_cluster={t}").unwrap();
        }
        out.push_str("];\n");
    }
    for l in &g.lists {
        writeln!(
            out,
            "  {} [label={}, shape=box, fillcolor={}];",
            quote(&list_node_id(l)),
            quote(l),
            quote(LIST_COLOR)
        )
        .unwrap();
    }
    let max = g.max_weight();
    for e in &g.edges {
        writeln!(
            out,
            "  {} -- {} [weight={}, penwidth={:.3}];",
            quote(&committer_node_id(&e.identity_id)),
            quote(&list_node_id(&e.list_name)),
            e.weight,
            penwidth(e.weight, max)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
