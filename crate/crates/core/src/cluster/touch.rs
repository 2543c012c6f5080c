use std::collections::{BTreeMap, BTreeSet};

use super::ClusterError;
use crate::Scalar;

/// Sparse binary committer x file matrix.
///
/// Each row is the sorted set of touched column indices; every row touches at
/// least one column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TouchMatrix {
    rows: Vec<String>,
    cols: Vec<String>,
    row_sets: Vec<Vec<usize>>,
}

impl TouchMatrix {
    /// Builds from `(row, col)` index triplets; duplicates collapse.
    pub fn from_triplets(
        rows: Vec<String>,
        cols: Vec<String>,
        entries: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, ClusterError> {
        let mut sets = vec![BTreeSet::new(); rows.len()];
        for (r, c) in entries {
            if r >= rows.len() || c >= cols.len() {
                return Err(ClusterError::InvalidInput(format!("entry ({r}, {c}) out of range")));
            }
            sets[r].insert(c);
        }
        if let Some(i) = sets.iter().position(BTreeSet::is_empty) {
            return Err(ClusterError::EmptyRow(rows[i].clone()));
        }
        Ok(Self {
            rows,
            cols,
            row_sets: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        })
    }

    /// Builds from `(row id, column name)` facts. Rows and columns are sorted.
    pub fn from_touches<I, R, C>(touches: I) -> Self
    where
        I: IntoIterator<Item = (R, C)>,
        R: Into<String>,
        C: Into<String>,
    {
        let mut by_row: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (r, c) in touches {
            by_row.entry(r.into()).or_default().insert(c.into());
        }
        let cols: Vec<String> = by_row
            .values()
            .flatten()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let col_idx: BTreeMap<&str, usize> = cols.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
        let row_sets = by_row
            .values()
            .map(|s| s.iter().map(|c| col_idx[c.as_str()]).collect())
            .collect();
        let rows = by_row.keys().cloned().collect();
        Self { rows, cols, row_sets }
    }

    pub fn rows(&self) -> &[String] {
        &self.rows
    }

    pub fn cols(&self) -> &[String] {
        &self.cols
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    /// Sorted touched column indices of row `i`.
    pub fn row(&self, i: usize) -> &[usize] {
        &self.row_sets[i]
    }

    pub fn nnz(&self) -> usize {
        self.row_sets.iter().map(Vec::len).sum()
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.row_sets
            .iter()
            .enumerate()
            .flat_map(|(r, cs)| cs.iter().map(move |&c| (r, c)))
    }

    /// Keeps only the listed rows (in the given order); columns unchanged.
    pub fn select_rows(&self, keep: &[usize]) -> Self {
        Self {
            rows: keep.iter().map(|&i| self.rows[i].clone()).collect(),
            cols: self.cols.clone(),
            row_sets: keep.iter().map(|&i| self.row_sets[i].clone()).collect(),
        }
    }

    /// Dense 0/1 rows.
    pub fn dense_rows<T: Scalar>(&self) -> Vec<Vec<T>> {
        self.row_sets
            .iter()
            .map(|cs| {
                let mut v = vec![T::zero(); self.cols.len()];
                for &c in cs {
                    v[c] = T::one();
                }
                v
            })
            .collect()
    }
}
