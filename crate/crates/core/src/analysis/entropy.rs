use std::io::{self, Write};

use super::{AnalysisError, ClusterTraitTable};
use crate::traits::{TAXONOMY, TRAIT_COUNT};
use crate::Scalar;

/// Traits sorted by ascending entropy; ties keep taxonomy order.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyRanking<T> {
    pub entries: Vec<(&'static str, T)>,
}

/// Base-2 entropy of values normalized to sum 1. An all-zero vector is
/// treated as uniform (`log2 k`); `0 * log2 0 = 0`.
pub fn entropy_of<T: Scalar>(values: &[T]) -> T {
    let total: T = values.iter().copied().sum();
    if total == T::zero() {
        return T::from_usize_lossy(values.len()).log2();
    }
    values
        .iter()
        .filter(|&&v| v > T::zero())
        .map(|&v| {
            let p = v / total;
            -(p * p.log2())
        })
        .sum()
}

/// Entropy of each trait over the populated clusters of `table`, lowest
/// (most discriminative) first.
pub fn trait_entropy_ranking<T: Scalar>(table: &ClusterTraitTable<T>) -> Result<EntropyRanking<T>, AnalysisError> {
    let cols = table.populated_clusters();
    if cols.is_empty() {
        return Err(AnalysisError::EmptyTable);
    }
    let mut entries: Vec<(&'static str, T)> = table
        .cells
        .iter()
        .enumerate()
        .map(|(t, row)| {
            let vals: Vec<T> = cols.iter().map(|&c| row[c].expect("populated column")).collect();
            (TAXONOMY[t].key, entropy_of(&vals))
        })
        .collect();
    entries.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    Ok(EntropyRanking { entries })
}

/// `(lowest n, highest n)`; the second slice runs from the highest down.
pub fn top_bottom<T: Scalar>(
    ranking: &EntropyRanking<T>,
    n: usize,
) -> Result<(Vec<(&'static str, T)>, Vec<(&'static str, T)>), AnalysisError> {
    if n > TRAIT_COUNT || n > ranking.entries.len() {
        return Err(AnalysisError::InvalidN(n));
    }
    let low = ranking.entries[..n].to_vec();
    let high = ranking.entries.iter().rev().take(n).copied().collect();
    Ok((low, high))
}

impl<T: Scalar> EntropyRanking<T> {
    /// `entropy.csv`: `trait,entropy,rank` with 1-based ranks.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "trait,entropy,rank")?;
        for (i, (key, h)) in self.entries.iter().enumerate() {
            writeln!(out, "{key},{:.6},{}", h.to_f64_lossy(), i + 1)?;
        }
        Ok(())
    }
}
