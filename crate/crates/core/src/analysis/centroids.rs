use std::collections::BTreeMap;
use std::io::{self, Write};

use crate::cluster::ClusterAssignment;
use crate::traits::{TraitVector, TAXONOMY, TRAIT_COUNT};
use crate::Scalar;

/// Mean trait value per (trait, cluster). Rows follow the taxonomy order;
/// empty clusters have a column of `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterTraitTable<T> {
    pub k: usize,
    /// `cells[trait][cluster]`
    pub cells: Vec<Vec<Option<T>>>,
    /// Assigned ids with no trait vector; left out of the means.
    pub missing: Vec<String>,
    pub cluster_sizes: Vec<usize>,
}

pub fn trait_centroids<T: Scalar>(traits: &[TraitVector<T>], assignment: &ClusterAssignment) -> ClusterTraitTable<T> {
    let by_id: BTreeMap<&str, &TraitVector<T>> = traits.iter().map(|t| (t.identity_id.as_str(), t)).collect();
    let k = assignment.k;
    let mut sums = vec![vec![T::zero(); k]; TRAIT_COUNT];
    let mut sizes = vec![0usize; k];
    let mut missing = Vec::new();
    for (id, &label) in &assignment.labels {
        let Some(v) = by_id.get(id.as_str()) else {
            missing.push(id.clone());
            continue;
        };
        sizes[label] += 1;
        for (t, &x) in v.values.iter().enumerate() {
            sums[t][label] = sums[t][label] + x;
        }
    }
    let cells = sums
        .into_iter()
        .map(|row| {
            row.into_iter()
                .zip(&sizes)
                .map(|(s, &n)| (n > 0).then(|| s / T::from_usize_lossy(n)))
                .collect()
        })
        .collect();
    ClusterTraitTable { k, cells, missing, cluster_sizes: sizes }
}

impl<T: Scalar> ClusterTraitTable<T> {
    pub fn populated_clusters(&self) -> Vec<usize> {
        (0..self.k).filter(|&c| self.cluster_sizes[c] > 0).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.populated_clusters().is_empty()
    }

    /// `centroids.csv`: `trait,<cluster indices>`; empty clusters print blank.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        write!(out, "trait")?;
        for c in 0..self.k {
            write!(out, ",{c}")?;
        }
        writeln!(out)?;
        for (t, row) in self.cells.iter().enumerate() {
            write!(out, "{}", TAXONOMY[t].key)?;
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
}
