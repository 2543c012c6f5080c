use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::cluster::{ClusterAssignment, TouchMatrix};
use crate::ingest::{attribute_component, ComponentMap};
use crate::Scalar;

pub const DEFAULT_PARTICIPATION_THRESHOLD: f64 = 0.07;

/// How each member's touches are aggregated before averaging per cluster.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParticipationMode {
    /// Per-member share of touched files per component (sums to 1).
    #[default]
    Fractions,
    /// Raw per-member touched-file counts.
    Counts,
}

/// Cluster x component mean participation. Raw values are kept; the
/// threshold only applies when rendering.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticipationTable<T> {
    pub components: Vec<String>,
    /// `cells[cluster][component]`; `None` for empty clusters.
    pub cells: Vec<Vec<Option<T>>>,
    pub threshold: T,
    pub mode: ParticipationMode,
}

/// Cluster x component number of members with at least one touch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossTab {
    pub components: Vec<String>,
    pub cells: Vec<Vec<usize>>,
    pub cluster_sizes: Vec<usize>,
}

/// Per-row touched-file counts per component, in `components` order.
fn component_counts(
    m: &TouchMatrix,
    assignment: &ClusterAssignment,
    map: &ComponentMap,
) -> Result<(Vec<String>, Vec<(usize, Vec<usize>)>), AnalysisError> {
    let components = map.components();
    let idx: BTreeMap<&str, usize> = components.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let col_component: Vec<usize> = m
        .cols()
        .iter()
        .map(|p| idx[attribute_component(p, map)])
        .collect();
    let mut rows = Vec::with_capacity(m.n_rows());
    for (r, id) in m.rows().iter().enumerate() {
        let label = assignment
            .label(id)
            .ok_or_else(|| AnalysisError::UnassignedRow(id.clone()))?;
        let mut counts = vec![0usize; components.len()];
        for &c in m.row(r) {
            counts[col_component[c]] += 1;
        }
        rows.push((label, counts));
    }
    Ok((components, rows))
}

pub fn participation_table<T: Scalar>(
    m: &TouchMatrix,
    assignment: &ClusterAssignment,
    map: &ComponentMap,
    threshold: T,
    mode: ParticipationMode,
) -> Result<ParticipationTable<T>, AnalysisError> {
    let (components, rows) = component_counts(m, assignment, map)?;
    let k = assignment.k;
    let mut sums = vec![vec![T::zero(); components.len()]; k];
    let mut sizes = vec![0usize; k];
    for (label, counts) in rows {
        sizes[label] += 1;
        let total: usize = counts.iter().sum();
        for (s, &c) in sums[label].iter_mut().zip(&counts) {
            let x = T::from_usize_lossy(c);
            *s = *s + match mode {
                ParticipationMode::Fractions => x / T::from_usize_lossy(total),
                ParticipationMode::Counts => x,
            };
        }
    }
    let cells = sums
        .into_iter()
        .zip(&sizes)
        .map(|(row, &n)| {
            row.into_iter()
                .map(|s| (n > 0).then(|| s / T::from_usize_lossy(n)))
                .collect()
        })
        .collect();
    Ok(ParticipationTable { components, cells, threshold, mode })
}

pub fn committer_component_counts(
    m: &TouchMatrix,
    assignment: &ClusterAssignment,
    map: &ComponentMap,
) -> Result<CrossTab, AnalysisError> {
    let (components, rows) = component_counts(m, assignment, map)?;
    let mut cells = vec![vec![0usize; components.len()]; assignment.k];
    let mut sizes = vec![0usize; assignment.k];
    for (label, counts) in rows {
        sizes[label] += 1;
        for (cell, &c) in cells[label].iter_mut().zip(&counts) {
            if c > 0 {
                *cell += 1;
            }
        }
    }
    Ok(CrossTab { components, cells, cluster_sizes: sizes })
}

fn write_header<W: Write>(out: &mut W, components: &[String]) -> io::Result<()> {
    write!(out, "cluster")?;
    for c in components {
        write!(out, ",{}", crate::csv_field(c))?;
    }
    writeln!(out)
}

impl<T: Scalar> ParticipationTable<T> {
    /// Display form of one cell: `*` below the threshold, else six decimals.
    pub fn render_cell(&self, value: T) -> String {
        if value < self.threshold {
            "*".to_string()
        } else {
            format!("{:.6}", value.to_f64_lossy())
        }
    }

    /// `participation.csv` with unmasked values.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        write_header(&mut out, &self.components)?;
        for (c, row) in self.cells.iter().enumerate() {
            write!(out, "{c}")?;
            for cell in row {
                match cell {
                    Some(x) => write!(out, ",{:.6}", x.to_f64_lossy())?,
                    None => write!(out, ",")?,
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }

    /// Same layout with cells below the threshold printed as `*`.
    pub fn write_masked_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        write_header(&mut out, &self.components)?;
        for (c, row) in self.cells.iter().enumerate() {
            write!(out, "{c}")?;
            for cell in row {
                match cell {
                    Some(x) => write!(out, ",{}", self.render_cell(*x))?,
                    None => write!(out, ",")?,
                }
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

impl CrossTab {
    /// `crosstab.csv`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        write_header(&mut out, &self.components)?;
        for (c, row) in self.cells.iter().enumerate() {
            write!(out, "{c}")?;
            for n in row {
                write!(out, ",{n}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}
