//! Socio-technical mining of a project's git history and mailing lists.
//!
//! The crate covers the whole batch: parsing git-log exports and mbox
//! archives ([`ingest`]), merging author aliases ([`identity`]), scoring
//! 52-trait personality profiles from e-mail text ([`traits`]), clustering
//! committers by touched files and by traits ([`cluster`]), crossing the two
//! ([`analysis`]), the committer/list communication graph ([`graph`]) and the
//! file-based pipeline that ties them together ([`pipeline`]).
//!
//! Numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which is what the pipeline uses.

pub mod analysis;
pub mod cluster;
pub mod fixtures;
pub mod graph;
pub mod identity;
pub mod ingest;
pub mod pipeline;
mod scalar;
pub mod traits;

pub use scalar::Scalar;

pub type AffinityMatrix = cluster::AffinityMatrix<f64>;
pub type KMeansFit = cluster::KMeansFit<f64>;
pub type ClusterTraitTable = analysis::ClusterTraitTable<f64>;
pub type EntropyRanking = analysis::EntropyRanking<f64>;
pub type ParticipationTable = analysis::ParticipationTable<f64>;
pub type SSECurve = cluster::SSECurve<f64>;
pub type TraitVector = traits::TraitVector<f64>;

/// Quotes a CSV field when it contains a delimiter, quote or newline.
pub(crate) fn csv_field(s: &str) -> std::borrow::Cow<'_, str> {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\"")).into()
    } else {
        s.into()
    }
}
