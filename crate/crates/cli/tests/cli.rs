use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sociominer_core::fixtures::synthetic_project;

fn sociominer(args: &[&str], config: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sociominer"))
        .args(args)
        .arg("--config")
        .arg(config)
        .env_remove("SOCIOMINER_WORKSPACE")
        .output()
        .unwrap()
}

fn project() -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let p = synthetic_project(dir.path(), 21).unwrap();
    (dir, p.config)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn run_then_rerun() {
    let (dir, config) = project();
    let first = sociominer(&["run"], &config);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    assert!(dir.path().join("workspace/report/heatmap.svg").exists());
    let second = sociominer(&["run"], &config);
    assert_eq!(second.status.code(), Some(0));
    let out = String::from_utf8_lossy(&second.stdout);
    assert!(out.contains("executed: \n"), "{out}");
    assert!(out.contains("skipped: ingest, identities, traits"), "{out}");
}

#[test]
fn missing_mbox_directory_exits_2() {
    let (dir, config) = project();
    fs::remove_dir_all(dir.path().join("raw/mbox")).unwrap();
    let o = sociominer(&["ingest"], &config);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("raw/mbox") && err.contains("ingest"), "{err}");
}

#[test]
fn personality_before_traits_names_the_file() {
    let (_dir, config) = project();
    let o = sociominer(&["cluster", "--target", "personality"], &config);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("traits.csv"), "{}", stderr(&o));
}

#[test]
fn sweep_flag_controls_sse_rows() {
    let (dir, config) = project();
    for cmd in ["ingest", "identities"] {
        assert_eq!(sociominer(&[cmd], &config).status.code(), Some(0));
    }
    let o = sociominer(&["cluster", "--target", "technical", "--sweep", "2..8"], &config);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let sse = fs::read_to_string(dir.path().join("workspace/technical/sse.csv")).unwrap();
    assert_eq!(sse.lines().count(), 8, "{sse}");
    assert_eq!(sse.lines().next(), Some("k,sse"));

    let o = sociominer(&["cluster", "--target", "technical", "--sweep", "8..2"], &config);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn workspace_env_override() {
    let (dir, config) = project();
    let elsewhere = dir.path().join("elsewhere");
    let o = Command::new(env!("CARGO_BIN_EXE_sociominer"))
        .args(["ingest", "--config"])
        .arg(&config)
        .env("SOCIOMINER_WORKSPACE", &elsewhere)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(elsewhere.join("summary.csv").exists());
    assert!(!dir.path().join("workspace").exists());
}

#[test]
fn bad_config_exits_2() {
    let (dir, _) = project();
    let config = dir.path().join("bad.json");
    fs::write(&config, r#"{"workspace": "w", "inputs": {"git_logs": "g", "mbox_dir": "m"}, "k_technical": 0}"#).unwrap();
    assert_eq!(sociominer(&["run"], &config).status.code(), Some(2));
    fs::write(&config, "not json").unwrap();
    assert_eq!(sociominer(&["run"], &config).status.code(), Some(2));
    assert_eq!(sociominer(&["run"], &dir.path().join("absent.json")).status.code(), Some(2));
}
