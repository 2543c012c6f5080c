//! File-based batch pipeline: configuration, stages, manifest and reports.
//!
//! Every stage reads artifacts from the workspace, writes its own artifacts
//! atomically and records input and output digests in `manifest.json`.
//! [`run_pipeline`] skips stages whose recorded digests still match.

mod config;
mod manifest;
pub mod report;
mod stages;

use std::fmt;

use thiserror::Error;

pub use config::{
    Inputs, RunConfig, ScorerConfig, ScorerMode, SweepConfig, SweepRange, Thresholds, TouchGranularity, WORKSPACE_ENV,
};
pub use manifest::{
    digest_bytes, digest_file, write_atomic, Manifest, StageRecord, StageStatus, WorkspaceLock, ASSUMPTIONS, LOCK_FILE,
    MANIFEST_FILE, TIMES_FILE, TOOL_VERSION,
};
pub use stages::{run_pipeline, run_stage, RunSummary};

use crate::analysis::AnalysisError;
use crate::cluster::ClusterError;
use crate::graph::GraphError;
use crate::identity::IdentityError;
use crate::ingest::IngestError;
use crate::traits::TraitError;

#[derive(Debug, Error)]
pub enum PipelineError {
    /// Unusable input data or configuration.
    #[error("bad input: {0}")]
    BadInput(String),
    /// A prerequisite artifact (workspace-relative path) is absent.
    #[error("missing prerequisite {0}; run the stage that produces it first")]
    MissingStage(String),
    #[error("workspace is locked by another writer ({0})")]
    Locked(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<PipelineError>,
    },
}

impl PipelineError {
    /// Process exit status: 2 for bad input or configuration, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            PipelineError::BadInput(_) | PipelineError::MissingStage(_) => 2,
            _ => 1,
        }
    }

    /// The innermost error, past any stage qualification.
    pub fn root(&self) -> &PipelineError {
        match self {
            PipelineError::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    pub(crate) fn in_stage(self, stage: Stage) -> Self {
        match self {
            e @ PipelineError::Stage { .. } => e,
            e => PipelineError::Stage { stage, source: Box::new(e) },
        }
    }
}

impl From<IngestError> for PipelineError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Io(e) => PipelineError::Internal(e.to_string()),
            e => PipelineError::BadInput(e.to_string()),
        }
    }
}

impl From<IdentityError> for PipelineError {
    fn from(e: IdentityError) -> Self {
        match e {
            IdentityError::Io(e) => PipelineError::Internal(e.to_string()),
            e => PipelineError::BadInput(e.to_string()),
        }
    }
}

impl From<TraitError> for PipelineError {
    fn from(e: TraitError) -> Self {
        match e {
            TraitError::TransportError(_) | TraitError::ServiceError(_) | TraitError::SchemaError(_) | TraitError::Io(_) => {
                PipelineError::Internal(e.to_string())
            }
            e => PipelineError::BadInput(e.to_string()),
        }
    }
}

impl From<ClusterError> for PipelineError {
    fn from(e: ClusterError) -> Self {
        match e {
            ClusterError::Io(e) => PipelineError::Internal(e.to_string()),
            e => PipelineError::BadInput(e.to_string()),
        }
    }
}

impl From<AnalysisError> for PipelineError {
    fn from(e: AnalysisError) -> Self {
        PipelineError::BadInput(e.to_string())
    }
}

impl From<GraphError> for PipelineError {
    fn from(e: GraphError) -> Self {
        PipelineError::Internal(e.to_string())
    }
}

impl From<std::io::Error> for PipelineError {
    fn from(e: std::io::Error) -> Self {
        PipelineError::Internal(e.to_string())
    }
}

/// Pipeline stages in execution order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Ingest,
    Identities,
    Traits,
    ClusterTechnical,
    ClusterPersonality,
    Analyze,
    Graph,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 8] = [
        Stage::Ingest,
        Stage::Identities,
        Stage::Traits,
        Stage::ClusterTechnical,
        Stage::ClusterPersonality,
        Stage::Analyze,
        Stage::Graph,
        Stage::Report,
    ];

    /// Key used in the manifest.
    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Identities => "identities",
            Stage::Traits => "traits",
            Stage::ClusterTechnical => "cluster_technical",
            Stage::ClusterPersonality => "cluster_personality",
            Stage::Analyze => "analyze",
            Stage::Graph => "graph",
            Stage::Report => "report",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
