use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::PipelineError;
use crate::analysis::{ParticipationMode, DEFAULT_PARTICIPATION_THRESHOLD};
use crate::graph::{ThresholdMode, DEFAULT_MIN_MESSAGES};
use crate::ingest::{ComponentMap, DateRange};
use crate::traits::{trait_index, DEFAULT_MIN_WORDS, RADAR_DEFAULT};

pub const WORKSPACE_ENV: &str = "SOCIOMINER_WORKSPACE";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    /// A git-log export file, or a directory of them (one per repository,
    /// named by file stem).
    pub git_logs: PathBuf,
    /// Directory of mbox archives, one per list, named by file stem.
    pub mbox_dir: PathBuf,
    #[serde(default)]
    pub overrides: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub participation: f64,
    pub min_words: usize,
    pub min_messages: u64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            participation: DEFAULT_PARTICIPATION_THRESHOLD,
            min_words: DEFAULT_MIN_WORDS,
            min_messages: DEFAULT_MIN_MESSAGES,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScorerMode {
    #[default]
    Lexicon,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScorerConfig {
    pub mode: ScorerMode,
    pub endpoint: Option<String>,
    /// Custom lexicon JSON; the bundled word list when absent.
    pub lexicon_path: Option<PathBuf>,
    pub timeout_secs: u64,
    pub concurrency: usize,
}

impl Default for ScorerConfig {
    fn default() -> Self {
        Self { mode: ScorerMode::Lexicon, endpoint: None, lexicon_path: None, timeout_secs: 30, concurrency: 4 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TouchGranularity {
    #[default]
    File,
    Directory,
}

/// Inclusive `k` range for an SSE sweep, written `a..b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SweepRange {
    pub k_min: usize,
    pub k_max: usize,
}

impl std::str::FromStr for SweepRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (a, b) = s.split_once("..").ok_or_else(|| format!("sweep {s:?} is not of the form a..b"))?;
        let k_min: usize = a.trim().parse().map_err(|_| format!("bad sweep start {a:?}"))?;
        let k_max: usize = b.trim().parse().map_err(|_| format!("bad sweep end {b:?}"))?;
        if k_min == 0 || k_min > k_max {
            return Err(format!("sweep {s:?} needs 1 <= a <= b"));
        }
        Ok(Self { k_min, k_max })
    }
}

impl TryFrom<String> for SweepRange {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<SweepRange> for String {
    fn from(r: SweepRange) -> String {
        format!("{}..{}", r.k_min, r.k_max)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub technical: Option<SweepRange>,
    pub personality: Option<SweepRange>,
}

/// Everything one run needs; read from a single JSON file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub workspace: PathBuf,
    pub inputs: Inputs,
    #[serde(default)]
    pub date_range: DateRange,
    #[serde(default = "default_k_technical")]
    pub k_technical: usize,
    #[serde(default = "default_k_personality")]
    pub k_personality: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default)]
    pub scorer: ScorerConfig,
    #[serde(default)]
    pub component_map: ComponentMap,
    #[serde(default)]
    pub touch_granularity: TouchGranularity,
    #[serde(default)]
    pub threshold_mode: ThresholdMode,
    #[serde(default)]
    pub participation_mode: ParticipationMode,
    #[serde(default = "default_radar")]
    pub radar_traits: Vec<String>,
    #[serde(default)]
    pub sweep: SweepConfig,
}

fn default_k_technical() -> usize {
    5
}
fn default_k_personality() -> usize {
    3
}
fn default_restarts() -> usize {
    10
}
fn default_radar() -> Vec<String> {
    RADAR_DEFAULT.iter().map(|s| s.to_string()).collect()
}

impl RunConfig {
    /// Minimal config with every optional field at its default.
    pub fn new(workspace: impl Into<PathBuf>, git_logs: impl Into<PathBuf>, mbox_dir: impl Into<PathBuf>) -> Self {
        Self {
            workspace: workspace.into(),
            inputs: Inputs { git_logs: git_logs.into(), mbox_dir: mbox_dir.into(), overrides: None },
            date_range: DateRange::default(),
            k_technical: default_k_technical(),
            k_personality: default_k_personality(),
            seed: 0,
            restarts: default_restarts(),
            thresholds: Thresholds::default(),
            scorer: ScorerConfig::default(),
            component_map: ComponentMap::default(),
            touch_granularity: TouchGranularity::default(),
            threshold_mode: ThresholdMode::default(),
            participation_mode: ParticipationMode::default(),
            radar_traits: default_radar(),
            sweep: SweepConfig::default(),
        }
    }

    /// Reads the config, resolves relative paths against the file's
    /// directory and applies the `SOCIOMINER_WORKSPACE` override.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = fs::read_to_string(path)
            .map_err(|e| PipelineError::BadInput(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| PipelineError::BadInput(format!("config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        if let Some(ws) = std::env::var_os(WORKSPACE_ENV) {
            cfg.workspace = PathBuf::from(ws);
        }
        cfg.resolve_paths(base);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.workspace);
        fix(&mut self.inputs.git_logs);
        fix(&mut self.inputs.mbox_dir);
        if let Some(o) = self.inputs.overrides.as_mut() {
            fix(o);
        }
        if let Some(l) = self.scorer.lexicon_path.as_mut() {
            fix(l);
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::BadInput(m));
        if self.k_technical == 0 || self.k_personality == 0 {
            return bad("k_technical and k_personality must be at least 1".into());
        }
        if self.restarts == 0 {
            return bad("restarts must be at least 1".into());
        }
        let t = &self.thresholds;
        if t.participation.is_nan() || t.participation <= 0.0 || t.min_words == 0 || t.min_messages == 0 {
            return bad("thresholds must be positive".into());
        }
        if self.scorer.mode == ScorerMode::Remote && self.scorer.endpoint.is_none() {
            return bad("scorer.mode remote needs scorer.endpoint".into());
        }
        if self.scorer.concurrency == 0 {
            return bad("scorer.concurrency must be at least 1".into());
        }
        if let Some(k) = self.radar_traits.iter().find(|k| trait_index(k).is_none()) {
            return bad(format!("radar_traits: unknown trait {k:?}"));
        }
        Ok(())
    }

    /// Digest of every setting that influences artifact contents. Paths are
    /// left out: input contents are tracked through their own digests.
    pub fn analysis_digest(&self) -> String {
        let mut c = self.clone();
        c.workspace = PathBuf::new();
        c.inputs.git_logs = PathBuf::new();
        c.inputs.mbox_dir = PathBuf::new();
        c.inputs.overrides = c.inputs.overrides.map(|_| PathBuf::from("overrides"));
        c.scorer.lexicon_path = c.scorer.lexicon_path.map(|_| PathBuf::from("lexicon"));
        let json = serde_json::to_vec(&c).expect("config serializes");
        hex::encode(Sha256::digest(json))
    }
}
