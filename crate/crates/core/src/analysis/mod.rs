//! Crossing clusters with traits and touch data: trait centroids, entropy
//! ranking, participation tables and committer/component cross-tabs.

mod centroids;
mod entropy;
mod participation;

use thiserror::Error;

pub use centroids::{trait_centroids, ClusterTraitTable};
pub use entropy::{entropy_of, top_bottom, trait_entropy_ranking, EntropyRanking};
pub use participation::{
    committer_component_counts, participation_table, CrossTab, ParticipationMode, ParticipationTable,
    DEFAULT_PARTICIPATION_THRESHOLD,
};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("table has no populated clusters")]
    EmptyTable,
    #[error("n={0} exceeds the number of traits")]
    InvalidN(usize),
    #[error("touch-matrix row {0:?} has no cluster label")]
    UnassignedRow(String),
}
