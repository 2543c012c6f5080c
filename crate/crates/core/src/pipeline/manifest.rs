use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::RunConfig;

pub const MANIFEST_FILE: &str = "manifest.json";
/// Wall-clock stage times live apart from the manifest so the manifest
/// itself stays byte-stable across identical runs.
pub const TIMES_FILE: &str = "manifest.times.json";
pub const LOCK_FILE: &str = ".sociominer.lock";

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub status: StageStatus,
    pub config_digest: String,
    /// Input path (workspace-relative for artifacts, `input:`-prefixed for
    /// raw inputs) to SHA-256.
    pub inputs: BTreeMap<String, String>,
    /// Workspace-relative output path to SHA-256.
    pub outputs: BTreeMap<String, String>,
    #[serde(default)]
    pub warnings: Vec<String>,
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool_version: String,
    pub config_digest: String,
    pub config: serde_json::Value,
    /// Fixed interpretation choices applied by this tool.
    pub assumptions: Vec<String>,
    pub stages: BTreeMap<String, StageRecord>,
}

pub const ASSUMPTIONS: &[&str] = &[
    "word counts are taken after quote, attribution and signature stripping",
    "personality clustering covers committers whose corpus passes the word gate",
    "technical rows are the union of committers over all repositories",
    "every path listed in a commit counts as a touch, merges and renames included",
    "graph inclusion threshold is applied after date filtering",
    "committers absent from the mailing lists are kept in technical artifacts and left out of the graph",
];

impl Manifest {
    pub fn new(config: &RunConfig) -> Self {
        let mut snapshot = serde_json::to_value(config).expect("config serializes");
        // machine-specific paths stay out of the manifest
        snapshot["workspace"] = serde_json::Value::Null;
        snapshot["inputs"] = serde_json::json!({
            "git_logs": file_label(&config.inputs.git_logs),
            "mbox_dir": file_label(&config.inputs.mbox_dir),
            "overrides": config.inputs.overrides.as_deref().map(file_label),
        });
        if let Some(l) = &config.scorer.lexicon_path {
            snapshot["scorer"]["lexicon_path"] = file_label(l).into();
        }
        Self {
            tool_version: TOOL_VERSION.to_string(),
            config_digest: config.analysis_digest(),
            config: snapshot,
            assumptions: ASSUMPTIONS.iter().map(|s| s.to_string()).collect(),
            stages: BTreeMap::new(),
        }
    }

    pub fn load(workspace: &Path) -> Option<Self> {
        let text = fs::read_to_string(workspace.join(MANIFEST_FILE)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn save(&self, workspace: &Path) -> io::Result<()> {
        let mut bytes = serde_json::to_vec_pretty(self).map_err(io::Error::from)?;
        bytes.push(b'\n');
        write_atomic(&workspace.join(MANIFEST_FILE), &bytes)
    }
}

fn file_label(p: &Path) -> String {
    p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

pub fn digest_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn digest_file(path: &Path) -> io::Result<String> {
    Ok(digest_bytes(&fs::read(path)?))
}

/// Writes through a temporary sibling and renames into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Exclusive writer lock on a workspace, released on drop.
#[derive(Debug)]
pub struct WorkspaceLock {
    path: PathBuf,
}

impl WorkspaceLock {
    pub fn acquire(workspace: &Path) -> io::Result<Self> {
        fs::create_dir_all(workspace)?;
        let path = workspace.join(LOCK_FILE);
        let mut f = fs::OpenOptions::new().write(true).create_new(true).open(&path)?;
        writeln!(f, "{}", std::process::id())?;
        Ok(Self { path })
    }
}

impl Drop for WorkspaceLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lock_is_exclusive() {
        let dir = tempfile::tempdir().unwrap();
        let lock = WorkspaceLock::acquire(dir.path()).unwrap();
        assert!(WorkspaceLock::acquire(dir.path()).is_err());
        drop(lock);
        assert!(WorkspaceLock::acquire(dir.path()).is_ok());
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/x.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert!(!dir.path().join("sub/x.txt.tmp").exists());
    }

    #[test]
    fn manifest_has_no_paths() {
        let cfg = RunConfig::new("/tmp/somewhere/ws", "/data/git", "/data/mbox");
        let m = Manifest::new(&cfg);
        let text = serde_json::to_string(&m).unwrap();
        assert!(!text.contains("/tmp/somewhere"));
        assert!(!text.contains("/data/"));
    }
}
