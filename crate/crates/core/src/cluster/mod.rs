//! Touch matrices, Jaccard affinity, k-means, spectral clustering and SSE
//! elbow diagnostics.
//!
//! Everything here is a deterministic function of its inputs, `k`, the seed
//! and the restart count.

mod jaccard;
mod kmeans;
mod metrics;
mod spectral;
mod sweep;
mod touch;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use jaccard::{jaccard_affinity, AffinityMatrix};
pub use kmeans::{kmeans, KMeansFit, KMeansParams};
pub use metrics::adjusted_rand_index;
pub use spectral::{spectral_cluster, spectral_cluster_with, spectral_embedding};
pub use sweep::{sse_sweep, suggest_knee, SSECurve, SweepData};
pub use touch::TouchMatrix;

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("invalid k={k}: {reason}")]
    InvalidK { k: usize, reason: String },
    #[error("rows with zero affinity degree: {0:?}")]
    IsolatedRows(Vec<String>),
    #[error("SSE curve needs at least 3 points, got {0}")]
    CurveTooShort(usize),
    #[error("touch matrix row {0:?} has no touched columns")]
    EmptyRow(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub(crate) fn invalid_k(k: usize, reason: impl Into<String>) -> ClusterError {
    ClusterError::InvalidK { k, reason: reason.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Kmeans,
    Spectral,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Kmeans => "kmeans",
            Algorithm::Spectral => "spectral",
        })
    }
}

/// Labels keyed by committer id; serialized as `clusters.json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub algorithm: Algorithm,
    pub k: usize,
    pub seed: u64,
    pub restarts: usize,
    pub labels: BTreeMap<String, usize>,
}

impl ClusterAssignment {
    pub fn from_labels(
        algorithm: Algorithm,
        k: usize,
        seed: u64,
        restarts: usize,
        ids: &[String],
        labels: &[usize],
    ) -> Self {
        assert_eq!(ids.len(), labels.len());
        Self {
            algorithm,
            k,
            seed,
            restarts,
            labels: ids.iter().cloned().zip(labels.iter().copied()).collect(),
        }
    }

    pub fn label(&self, id: &str) -> Option<usize> {
        self.labels.get(id).copied()
    }

    /// Member count per cluster index.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in self.labels.values() {
            sizes[l] += 1;
        }
        sizes
    }

    pub fn empty_clusters(&self) -> Vec<usize> {
        self.sizes()
            .iter()
            .enumerate()
            .filter(|(_, &n)| n == 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn members(&self, cluster: usize) -> BTreeSet<&str> {
        self.labels
            .iter()
            .filter(|(_, &l)| l == cluster)
            .map(|(id, _)| id.as_str())
            .collect()
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<(), ClusterError> {
        serde_json::to_writer_pretty(&mut out, self)?;
        out.write_all(b"\n")?;
        Ok(())
    }

    pub fn read_json<R: Read>(r: R) -> Result<Self, ClusterError> {
        let a: Self = serde_json::from_reader(r)?;
        if let Some((id, &l)) = a.labels.iter().find(|(_, &l)| l >= a.k) {
            return Err(ClusterError::InvalidInput(format!("label {l} of {id} not below k={}", a.k)));
        }
        Ok(a)
    }
}
