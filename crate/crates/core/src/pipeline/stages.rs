use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{self, BufReader};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use log::{info, warn};

use super::config::{ScorerMode, SweepRange, TouchGranularity};
use super::manifest::{digest_bytes, digest_file, write_atomic, Manifest, StageRecord, StageStatus, WorkspaceLock, TIMES_FILE};
use super::report::{self, HeatmapRow};
use super::{PipelineError, RunConfig, Stage};
use crate::analysis::{
    committer_component_counts, participation_table, top_bottom, trait_centroids, trait_entropy_ranking,
    ClusterTraitTable, ParticipationTable,
};
use crate::cluster::{
    jaccard_affinity, kmeans, spectral_cluster_with, sse_sweep, suggest_knee, Algorithm, ClusterAssignment,
    ClusterError, KMeansParams, SSECurve, SweepData, TouchMatrix,
};
use crate::graph::{build_comm_graph, export_dot, export_graphml};
use crate::identity::{resolve_identities, AliasOverride, IdentityMap};
use crate::ingest::{
    filter_commits, filter_messages, ingest_summary, parse_git_log, parse_mbox, read_jsonl, write_jsonl, CommitRecord,
    EmailMessage, MboxWarning,
};
use crate::traits::{
    build_author_corpus, read_traits_csv, score_traits_lexicon, write_traits_csv, Lexicon, RemoteScorer,
    TraitSource, TraitVector, TAXONOMY,
};

const COMMITS: &str = "commits.jsonl";
const MESSAGES: &str = "messages.jsonl";
const SUMMARY: &str = "summary.csv";
const IDENTITIES: &str = "identities.json";
const CORPORA: &str = "corpora.csv";
const TRAITS: &str = "traits.csv";
const TECH_CLUSTERS: &str = "technical/clusters.json";
const TECH_SSE: &str = "technical/sse.csv";
const PERS_CLUSTERS: &str = "personality/clusters.json";
const PERS_SSE: &str = "personality/sse.csv";
const CENTROIDS: &str = "analysis/centroids.csv";
const ENTROPY: &str = "analysis/entropy.csv";
const PERS_CENTROIDS: &str = "analysis/personality_centroids.csv";
const PERS_ENTROPY: &str = "analysis/personality_entropy.csv";
const PARTICIPATION: &str = "analysis/participation.csv";
const CROSSTAB: &str = "analysis/crosstab.csv";

/// Rows per half of the entropy heat map.
const HEATMAP_HALF: usize = 10;

/// Which stages a [`run_pipeline`] call executed and which it skipped.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunSummary {
    pub executed: Vec<Stage>,
    pub skipped: Vec<Stage>,
}

enum Input {
    Artifact(&'static str),
    Raw { label: &'static str, path: PathBuf },
}

fn stage_inputs(stage: Stage, cfg: &RunConfig) -> Vec<Input> {
    use Input::Artifact as A;
    let mut v = match stage {
        Stage::Ingest => vec![
            Input::Raw { label: "git_logs", path: cfg.inputs.git_logs.clone() },
            Input::Raw { label: "mbox_dir", path: cfg.inputs.mbox_dir.clone() },
        ],
        Stage::Identities => vec![A(COMMITS), A(MESSAGES)],
        Stage::Traits => vec![A(COMMITS), A(MESSAGES), A(IDENTITIES)],
        Stage::ClusterTechnical => vec![A(COMMITS), A(IDENTITIES)],
        Stage::ClusterPersonality => vec![A(TRAITS)],
        Stage::Analyze => vec![A(COMMITS), A(IDENTITIES), A(TRAITS), A(TECH_CLUSTERS), A(PERS_CLUSTERS)],
        Stage::Graph => vec![A(COMMITS), A(MESSAGES), A(IDENTITIES), A(TECH_CLUSTERS), A(PERS_CLUSTERS)],
        Stage::Report => vec![
            A(COMMITS),
            A(IDENTITIES),
            A(TRAITS),
            A(TECH_CLUSTERS),
            A(PERS_CLUSTERS),
            A(CENTROIDS),
            A(ENTROPY),
            A(PARTICIPATION),
        ],
    };
    if stage == Stage::Identities {
        if let Some(p) = &cfg.inputs.overrides {
            v.push(Input::Raw { label: "overrides", path: p.clone() });
        }
    }
    if stage == Stage::Traits && cfg.scorer.mode == ScorerMode::Lexicon {
        if let Some(p) = &cfg.scorer.lexicon_path {
            v.push(Input::Raw { label: "lexicon", path: p.clone() });
        }
    }
    v
}

/// Regular files directly inside `dir`, sorted by name.
fn list_files(dir: &Path) -> io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && !p.file_name().is_some_and(|n| n.to_string_lossy().starts_with('.')))
        .collect();
    files.sort();
    Ok(files)
}

fn raw_digest(label: &str, path: &Path) -> Result<String, PipelineError> {
    if path.is_dir() {
        let mut listing = String::new();
        for f in list_files(path)? {
            let name = f.file_name().unwrap_or_default().to_string_lossy().into_owned();
            listing.push_str(&format!("{name} {}\n", digest_file(&f)?));
        }
        Ok(digest_bytes(listing.as_bytes()))
    } else if path.is_file() {
        Ok(digest_file(path)?)
    } else {
        Err(PipelineError::BadInput(format!("{label} path {} does not exist", path.display())))
    }
}

fn input_digests(stage: Stage, cfg: &RunConfig) -> Result<BTreeMap<String, String>, PipelineError> {
    let mut out = BTreeMap::new();
    for input in stage_inputs(stage, cfg) {
        match input {
            Input::Artifact(rel) => {
                let p = cfg.workspace.join(rel);
                if !p.is_file() {
                    return Err(PipelineError::MissingStage(rel.to_string()));
                }
                out.insert(rel.to_string(), digest_file(&p)?);
            }
            Input::Raw { label, path } => {
                out.insert(format!("input:{label}"), raw_digest(label, &path)?);
            }
        }
    }
    Ok(out)
}

#[derive(Default)]
struct StageOutput {
    files: Vec<(String, Vec<u8>)>,
    warnings: Vec<String>,
    notes: Vec<String>,
}

impl StageOutput {
    fn file(&mut self, rel: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((rel.into(), bytes));
    }

    fn warn(&mut self, msg: String) {
        warn!("{msg}");
        self.warnings.push(msg);
    }
}

fn read_artifact(cfg: &RunConfig, rel: &str) -> Result<BufReader<fs::File>, PipelineError> {
    fs::File::open(cfg.workspace.join(rel))
        .map(BufReader::new)
        .map_err(|_| PipelineError::MissingStage(rel.to_string()))
}

fn bad_artifact(rel: &str, e: impl std::fmt::Display) -> PipelineError {
    PipelineError::BadInput(format!("{rel}: {e}"))
}

fn load_commits(cfg: &RunConfig) -> Result<Vec<CommitRecord>, PipelineError> {
    read_jsonl(read_artifact(cfg, COMMITS)?).map_err(|e| bad_artifact(COMMITS, e))
}

fn load_messages(cfg: &RunConfig) -> Result<Vec<EmailMessage>, PipelineError> {
    read_jsonl(read_artifact(cfg, MESSAGES)?).map_err(|e| bad_artifact(MESSAGES, e))
}

fn load_identities(cfg: &RunConfig) -> Result<IdentityMap, PipelineError> {
    IdentityMap::read_json(read_artifact(cfg, IDENTITIES)?).map_err(|e| bad_artifact(IDENTITIES, e))
}

fn trait_source(cfg: &RunConfig) -> TraitSource {
    match cfg.scorer.mode {
        ScorerMode::Lexicon => TraitSource::Lexicon,
        ScorerMode::Remote => TraitSource::Remote,
    }
}

fn load_traits(cfg: &RunConfig) -> Result<Vec<TraitVector<f64>>, PipelineError> {
    read_traits_csv(read_artifact(cfg, TRAITS)?, trait_source(cfg)).map_err(|e| bad_artifact(TRAITS, e))
}

fn load_assignment(cfg: &RunConfig, rel: &str) -> Result<ClusterAssignment, PipelineError> {
    ClusterAssignment::read_json(read_artifact(cfg, rel)?).map_err(|e| bad_artifact(rel, e))
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> io::Result<()>) -> Result<Vec<u8>, PipelineError> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    Ok(buf)
}

fn file_stem(p: &Path) -> String {
    p.file_stem().unwrap_or_default().to_string_lossy().into_owned()
}

fn ingest(cfg: &RunConfig) -> Result<StageOutput, PipelineError> {
    let mut out = StageOutput::default();
    let git = &cfg.inputs.git_logs;
    let logs = if git.is_dir() {
        list_files(git)?
    } else if git.is_file() {
        vec![git.clone()]
    } else {
        return Err(PipelineError::BadInput(format!("git log path {} does not exist", git.display())));
    };
    let mbox_dir = &cfg.inputs.mbox_dir;
    if !mbox_dir.is_dir() {
        return Err(PipelineError::BadInput(format!("mbox directory {} does not exist", mbox_dir.display())));
    }

    let mut repos = Vec::new();
    let mut all_commits = Vec::new();
    for path in &logs {
        let name = file_stem(path);
        let parsed = parse_git_log(BufReader::new(fs::File::open(path)?))
            .map_err(|e| PipelineError::BadInput(format!("{}: {e}", path.display())))?;
        let n = parsed.len();
        let kept = filter_commits(parsed, &cfg.date_range);
        if kept.len() < n {
            out.notes.push(format!("{name}: {} of {n} commits outside the date range", n - kept.len()));
        }
        all_commits.extend(kept.iter().cloned());
        repos.push((name, kept));
    }

    let mut all_messages = Vec::new();
    for path in list_files(mbox_dir)? {
        let list = file_stem(&path);
        let parsed = parse_mbox(BufReader::new(fs::File::open(&path)?), &list)
            .map_err(|e| PipelineError::BadInput(format!("{}: {e}", path.display())))?;
        for w in &parsed.warnings {
            out.warn(match w {
                MboxWarning::MissingHeader { message_index, header } => {
                    format!("{list}: message {message_index} skipped, no usable {header} header")
                }
                MboxWarning::HtmlPartSkipped { message_index } => {
                    format!("{list}: message {message_index} had an HTML part that was dropped")
                }
            });
        }
        let n = parsed.messages.len();
        let kept = filter_messages(parsed.messages, &cfg.date_range);
        if kept.len() < n {
            out.notes.push(format!("{list}: {} of {n} messages outside the date range", n - kept.len()));
        }
        all_messages.extend(kept);
    }

    let summary = ingest_summary(&repos, &all_messages);
    let mut commits = Vec::new();
    write_jsonl(&all_commits, &mut commits)?;
    let mut messages = Vec::new();
    write_jsonl(&all_messages, &mut messages)?;
    out.file(COMMITS, commits);
    out.file(MESSAGES, messages);
    out.file(SUMMARY, csv_bytes(|b| summary.write_csv(b))?);
    out.notes.push(format!("{} commits, {} messages", all_commits.len(), all_messages.len()));
    Ok(out)
}

fn identities(cfg: &RunConfig) -> Result<StageOutput, PipelineError> {
    let mut out = StageOutput::default();
    let commits = load_commits(cfg)?;
    let messages = load_messages(cfg)?;
    let raw: Vec<(String, String)> = commits
        .iter()
        .map(|c| (c.author_name.clone(), c.author_email.clone()))
        .chain(messages.iter().map(|m| (m.sender_name.clone(), m.sender_email.clone())))
        .collect();
    let overrides = match &cfg.inputs.overrides {
        Some(p) => {
            let f = fs::File::open(p)
                .map_err(|e| PipelineError::BadInput(format!("overrides file {}: {e}", p.display())))?;
            AliasOverride::from_reader(f).map_err(|e| PipelineError::BadInput(format!("{}: {e}", p.display())))?
        }
        None => AliasOverride::default(),
    };
    let map = resolve_identities(&raw, &overrides)?;
    let distinct: BTreeSet<String> = raw.iter().map(|(_, e)| e.trim().to_lowercase()).collect();
    out.notes.push(format!("{} e-mail addresses resolved to {} identities", distinct.len(), map.len()));
    let mut buf = Vec::new();
    map.write_json(&mut buf)?;
    out.file(IDENTITIES, buf);
    Ok(out)
}

/// Identity ids of commit authors.
fn committer_ids(commits: &[CommitRecord], map: &IdentityMap) -> BTreeSet<String> {
    commits
        .iter()
        .filter_map(|c| map.lookup(&c.author_email))
        .map(|i| i.id.clone())
        .collect()
}

fn traits(cfg: &RunConfig) -> Result<StageOutput, PipelineError> {
    let mut out = StageOutput::default();
    let commits = load_commits(cfg)?;
    let messages = load_messages(cfg)?;
    let map = load_identities(cfg)?;
    let committers = committer_ids(&commits, &map);
    let corpora: Vec<_> = build_author_corpus(&messages, &map, cfg.thresholds.min_words)
        .into_iter()
        .filter(|c| committers.contains(&c.identity_id))
        .collect();

    let mut listing = String::from("identity_id,word_count,eligible\n");
    for c in &corpora {
        listing.push_str(&format!("{},{},{}\n", c.identity_id, c.word_count, c.eligible));
    }
    let eligible: Vec<_> = corpora.iter().filter(|c| c.eligible).collect();
    out.notes.push(format!(
        "{} of {} committers with list traffic reach {} words",
        eligible.len(),
        corpora.len(),
        cfg.thresholds.min_words
    ));

    let vectors: Vec<TraitVector<f64>> = match cfg.scorer.mode {
        ScorerMode::Lexicon => {
            let lexicon = match &cfg.scorer.lexicon_path {
                Some(p) => {
                    let text = fs::read_to_string(p)
                        .map_err(|e| PipelineError::BadInput(format!("lexicon {}: {e}", p.display())))?;
                    Lexicon::from_json(&text)?
                }
                None => Lexicon::bundled(),
            };
            eligible
                .iter()
                .map(|c| score_traits_lexicon(c, &lexicon))
                .collect::<Result<_, _>>()?
        }
        ScorerMode::Remote => {
            let endpoint = cfg.scorer.endpoint.as_deref().unwrap_or_default();
            let scorer = RemoteScorer::new(endpoint, Duration::from_secs(cfg.scorer.timeout_secs));
            scorer
                .score_many(&eligible, cfg.scorer.concurrency)
                .into_iter()
                .collect::<Result<_, _>>()?
        }
    };
    out.file(CORPORA, listing.into_bytes());
    out.file(TRAITS, csv_bytes(|b| write_traits_csv(&vectors, b))?);
    Ok(out)
}

/// Committer x file (or directory) touch matrix from the commit history.
fn touch_matrix(cfg: &RunConfig, commits: &[CommitRecord], map: &IdentityMap) -> TouchMatrix {
    let mut touches = Vec::new();
    for c in commits {
        let Some(id) = map.lookup(&c.author_email) else { continue };
        for f in &c.files {
            let col = match cfg.touch_granularity {
                TouchGranularity::File => f.clone(),
                TouchGranularity::Directory => match f.rfind('/') {
                    Some(i) => f[..i].to_string(),
                    None => ".".to_string(),
                },
            };
            touches.push((id.id.clone(), col));
        }
    }
    TouchMatrix::from_touches(touches)
}

fn sweep_files(
    out: &mut StageOutput,
    rel: &str,
    curve: &SSECurve<f64>,
) -> Result<(), PipelineError> {
    out.file(rel, csv_bytes(|b| curve.write_csv(b))?);
    match suggest_knee(curve) {
        Ok(k) => out.notes.push(format!("SSE knee suggests k = {k}")),
        Err(ClusterError::CurveTooShort(_)) => {}
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn cluster_technical(cfg: &RunConfig) -> Result<StageOutput, PipelineError> {
    let mut out = StageOutput::default();
    let commits = load_commits(cfg)?;
    let map = load_identities(cfg)?;
    let m = touch_matrix(cfg, &commits, &map);
    let untouched = committer_ids(&commits, &map).len() - m.n_rows();
    if untouched > 0 {
        out.warn(format!("{untouched} committers have no file touches and are left out"));
    }
    let mut a = jaccard_affinity::<f64>(&m);
    let params = KMeansParams::new(cfg.k_technical, cfg.seed).restarts(cfg.restarts);
    let labels = match spectral_cluster_with(&a, &params) {
        Err(ClusterError::IsolatedRows(ids)) => {
            out.warn(format!("{} committers share no files with anyone and are left out: {}", ids.len(), ids.join(", ")));
            let keep: Vec<usize> = (0..a.n()).filter(|&i| !ids.contains(&a.ids()[i])).collect();
            a = a.select(&keep);
            spectral_cluster_with(&a, &params)?
        }
        r => r?,
    };
    let asg = ClusterAssignment::from_labels(Algorithm::Spectral, cfg.k_technical, cfg.seed, cfg.restarts, a.ids(), &labels);
    out.notes.push(format!("technical cluster sizes {:?}", asg.sizes()));
    let mut buf = Vec::new();
    asg.write_json(&mut buf)?;
    out.file(TECH_CLUSTERS, buf);
    if let Some(SweepRange { k_min, k_max }) = cfg.sweep.technical {
        let curve = sse_sweep(SweepData::SpectralEmbedding(&a), k_min, k_max, cfg.seed, cfg.restarts)?;
        sweep_files(&mut out, TECH_SSE, &curve)?;
    }
    Ok(out)
}

fn cluster_personality(cfg: &RunConfig) -> Result<StageOutput, PipelineError> {
    let mut out = StageOutput::default();
    let vectors = load_traits(cfg)?;
    let ids: Vec<String> = vectors.iter().map(|v| v.identity_id.clone()).collect();
    let points: Vec<Vec<f64>> = vectors.into_iter().map(|v| v.values).collect();
    let params = KMeansParams::new(cfg.k_personality, cfg.seed).restarts(cfg.restarts);
    let fit = kmeans(&points, &params)?;
    let asg = ClusterAssignment::from_labels(Algorithm::Kmeans, cfg.k_personality, cfg.seed, cfg.restarts, &ids, &fit.labels);
    out.notes.push(format!("personality cluster sizes {:?}, SSE {:.6}", asg.sizes(), fit.sse));
    let mut buf = Vec::new();
    asg.write_json(&mut buf)?;
    out.file(PERS_CLUSTERS, buf);
    if let Some(SweepRange { k_min, k_max }) = cfg.sweep.personality {
        let curve = sse_sweep(SweepData::RawKmeans(&points), k_min, k_max, cfg.seed, cfg.restarts)?;
        sweep_files(&mut out, PERS_SSE, &curve)?;
    }
    Ok(out)
}

fn entropy_csv(table: &ClusterTraitTable<f64>, out: &mut StageOutput, what: &str) -> Result<Vec<u8>, PipelineError> {
    match trait_entropy_ranking(table) {
        Ok(r) => csv_bytes(|b| r.write_csv(b)),
        Err(_) => {
            out.warn(format!("no {what} cluster has trait data; entropy table left empty"));
            Ok(b"trait,entropy,rank\n".to_vec())
        }
    }
}

/// Participation over the technical clustering, restricted to clustered rows.
fn participation(cfg: &RunConfig, tech: &ClusterAssignment) -> Result<(TouchMatrix, ParticipationTable<f64>), PipelineError> {
    let commits = load_commits(cfg)?;
    let map = load_identities(cfg)?;
    let m = touch_matrix(cfg, &commits, &map);
    let keep: Vec<usize> = (0..m.n_rows()).filter(|&i| tech.label(&m.rows()[i]).is_some()).collect();
    let m = m.select_rows(&keep);
    let p = participation_table(&m, tech, &cfg.component_map, cfg.thresholds.participation, cfg.participation_mode)?;
    Ok((m, p))
}

fn analyze(cfg: &RunConfig) -> Result<StageOutput, PipelineError> {
    let mut out = StageOutput::default();
    let vectors = load_traits(cfg)?;
    let tech = load_assignment(cfg, TECH_CLUSTERS)?;
    let pers = load_assignment(cfg, PERS_CLUSTERS)?;

    let table = trait_centroids(&vectors, &tech);
    if !table.missing.is_empty() {
        out.notes.push(format!(
            "{} technically clustered committers have no trait vector",
            table.missing.len()
        ));
    }
    let empty = tech.empty_clusters();
    if !empty.is_empty() {
        out.warn(format!("technical clusters {empty:?} are empty"));
    }
    out.file(CENTROIDS, csv_bytes(|b| table.write_csv(b))?);
    let entropy = entropy_csv(&table, &mut out, "technical")?;
    out.file(ENTROPY, entropy);

    let ptable = trait_centroids(&vectors, &pers);
    out.file(PERS_CENTROIDS, csv_bytes(|b| ptable.write_csv(b))?);
    let pentropy = entropy_csv(&ptable, &mut out, "personality")?;
    out.file(PERS_ENTROPY, pentropy);

    let (m, p) = participation(cfg, &tech)?;
    out.file(PARTICIPATION, csv_bytes(|b| p.write_csv(b))?);
    let cross = committer_component_counts(&m, &tech, &cfg.component_map)?;
    out.file(CROSSTAB, csv_bytes(|b| cross.write_csv(b))?);
    Ok(out)
}

fn graph(cfg: &RunConfig) -> Result<StageOutput, PipelineError> {
    let mut out = StageOutput::default();
    let commits = load_commits(cfg)?;
    let messages = load_messages(cfg)?;
    let map = load_identities(cfg)?;
    let tech = load_assignment(cfg, TECH_CLUSTERS)?;
    let pers = load_assignment(cfg, PERS_CLUSTERS)?;
    let committers = committer_ids(&commits, &map);
    let committer_mail: Vec<EmailMessage> = messages
        .into_iter()
        .filter(|m| map.lookup(&m.sender_email).is_some_and(|i| committers.contains(&i.id)))
        .collect();
    let senders: BTreeSet<&str> = committer_mail
        .iter()
        .filter_map(|m| map.lookup(&m.sender_email))
        .map(|i| i.id.as_str())
        .collect();
    let silent = committers.len() - senders.len();
    let g = build_comm_graph(
        &committer_mail,
        &map,
        Some(&pers),
        Some(&tech),
        cfg.thresholds.min_messages,
        cfg.threshold_mode,
    );
    out.notes.push(format!("{silent} committers never posted to a list and are left out of the graph"));
    out.notes.push(format!(
        "{} of {} posting committers pass the message threshold",
        g.committers.len(),
        senders.len()
    ));
    out.file("graph/graph.graphml", export_graphml(&g).into_bytes());
    out.file("graph/graph.dot", export_dot(&g).into_bytes());
    Ok(out)
}

fn provenance(cfg: &RunConfig) -> String {
    let digest = cfg.analysis_digest();
    let mut s = format!("backend={} seed={} config={}", trait_source(cfg), cfg.seed, &digest[..12]);
    if cfg.scorer.mode == ScorerMode::Lexicon {
        s.push_str(" | lexicon scores are an offline word-list stand-in, not a validated personality model");
    }
    s
}

fn heatmap_rows(table: &ClusterTraitTable<f64>, keys: &[(&'static str, f64)]) -> Vec<HeatmapRow> {
    keys.iter()
        .map(|&(key, entropy)| {
            let t = TAXONOMY.iter().position(|d| d.key == key).expect("taxonomy key");
            HeatmapRow {
                key: key.to_string(),
                display_name: TAXONOMY[t].display_name.to_string(),
                entropy,
                values: table.cells[t].clone(),
            }
        })
        .collect()
}

fn report(cfg: &RunConfig) -> Result<StageOutput, PipelineError> {
    let mut out = StageOutput::default();
    let banner = provenance(cfg);
    let vectors = load_traits(cfg)?;
    let tech = load_assignment(cfg, TECH_CLUSTERS)?;
    let pers = load_assignment(cfg, PERS_CLUSTERS)?;

    let table = trait_centroids(&vectors, &tech);
    let tech_cols: Vec<String> = (0..tech.k).map(|c| format!("TC {c}")).collect();
    let rows = match trait_entropy_ranking(&table) {
        Ok(r) => {
            let (low, high) = top_bottom(&r, HEATMAP_HALF)?;
            let mut rows = heatmap_rows(&table, &low);
            rows.extend(heatmap_rows(&table, &high));
            rows
        }
        Err(_) => Vec::new(),
    };
    let title = "Personality centroids per technical cluster (10 lowest and 10 highest entropy)";
    out.file("report/heatmap.csv", report::heatmap_csv(&tech_cols, &rows).into_bytes());
    out.file("report/heatmap.svg", report::heatmap_svg(title, &tech_cols, &rows, &banner).into_bytes());

    let ptable = trait_centroids(&vectors, &pers);
    let pers_cols: Vec<String> = (0..pers.k).map(|c| format!("PC {c}")).collect();
    let prows = match trait_entropy_ranking(&ptable) {
        Ok(r) => heatmap_rows(&ptable, &top_bottom(&r, HEATMAP_HALF)?.0),
        Err(_) => Vec::new(),
    };
    let title = "Most discriminative traits per personality cluster (10 lowest entropy)";
    out.file("report/personality_heatmap.csv", report::heatmap_csv(&pers_cols, &prows).into_bytes());
    out.file(
        "report/personality_heatmap.svg",
        report::heatmap_svg(title, &pers_cols, &prows, &banner).into_bytes(),
    );

    for c in 0..tech.k {
        let title = format!("Technical cluster {c} ({} committers with traits)", table.cluster_sizes[c]);
        let axes: Vec<(String, f64)> = if table.cluster_sizes[c] == 0 {
            Vec::new()
        } else {
            cfg.radar_traits
                .iter()
                .map(|k| {
                    let t = TAXONOMY.iter().position(|d| d.key == k).expect("validated radar trait");
                    (k.clone(), table.cells[t][c].unwrap_or(0.0))
                })
                .collect()
        };
        let labelled: Vec<(String, f64)> = axes
            .iter()
            .map(|(k, v)| {
                let d = TAXONOMY.iter().find(|d| d.key == k).expect("validated radar trait");
                (d.display_name.to_string(), *v)
            })
            .collect();
        out.file(format!("report/radar_{c}.csv"), report::radar_csv(&axes).into_bytes());
        out.file(format!("report/radar_{c}.svg"), report::radar_svg(&title, &labelled, &banner).into_bytes());
    }

    let (_, p) = participation(cfg, &tech)?;
    out.file("report/participation_masked.csv", csv_bytes(|b| p.write_masked_csv(b))?);
    Ok(out)
}

fn execute(stage: Stage, cfg: &RunConfig) -> Result<StageOutput, PipelineError> {
    match stage {
        Stage::Ingest => ingest(cfg),
        Stage::Identities => identities(cfg),
        Stage::Traits => traits(cfg),
        Stage::ClusterTechnical => cluster_technical(cfg),
        Stage::ClusterPersonality => cluster_personality(cfg),
        Stage::Analyze => analyze(cfg),
        Stage::Graph => graph(cfg),
        Stage::Report => report(cfg),
    }
}

/// True when the recorded outputs still exist with their recorded digests.
fn outputs_intact(ws: &Path, rec: &StageRecord) -> bool {
    rec.outputs
        .iter()
        .all(|(rel, d)| digest_file(&ws.join(rel)).is_ok_and(|actual| &actual == d))
}

struct Session<'a> {
    cfg: &'a RunConfig,
    manifest: Manifest,
    times: BTreeMap<String, f64>,
    _lock: WorkspaceLock,
}

impl<'a> Session<'a> {
    fn open(cfg: &'a RunConfig) -> Result<Self, PipelineError> {
        cfg.validate()?;
        let ws = &cfg.workspace;
        let lock = WorkspaceLock::acquire(ws).map_err(|e| match e.kind() {
            io::ErrorKind::AlreadyExists => PipelineError::Locked(ws.join(super::LOCK_FILE).display().to_string()),
            _ => PipelineError::BadInput(format!("workspace {} is not writable: {e}", ws.display())),
        })?;
        let fresh = Manifest::new(cfg);
        let manifest = match Manifest::load(ws) {
            Some(old) => Manifest { stages: old.stages, ..fresh },
            None => fresh,
        };
        let times = fs::read_to_string(ws.join(TIMES_FILE))
            .ok()
            .and_then(|t| serde_json::from_str(&t).ok())
            .unwrap_or_default();
        Ok(Self { cfg, manifest, times, _lock: lock })
    }

    fn is_current(&self, stage: Stage) -> bool {
        let Some(rec) = self.manifest.stages.get(stage.name()) else { return false };
        rec.status == StageStatus::Ok
            && rec.config_digest == self.manifest.config_digest
            && input_digests(stage, self.cfg).is_ok_and(|d| d == rec.inputs)
            && outputs_intact(&self.cfg.workspace, rec)
    }

    fn run(&mut self, stage: Stage) -> Result<(), PipelineError> {
        let started = Instant::now();
        info!("stage {stage}: running");
        let result = input_digests(stage, self.cfg).and_then(|inputs| {
            let out = execute(stage, self.cfg)?;
            Ok((inputs, out))
        });
        let ws = &self.cfg.workspace;
        let previous = self.manifest.stages.get(stage.name()).cloned();
        let outcome = match result {
            Ok((inputs, out)) => {
                let mut outputs = BTreeMap::new();
                for (rel, bytes) in &out.files {
                    write_atomic(&ws.join(rel), bytes)?;
                    outputs.insert(rel.clone(), digest_bytes(bytes));
                }
                // outputs from an earlier run that this run no longer produces
                for rel in previous.iter().flat_map(|p| p.outputs.keys()) {
                    if !outputs.contains_key(rel) {
                        match fs::remove_file(ws.join(rel)) {
                            Err(e) if e.kind() != io::ErrorKind::NotFound => return Err(e.into()),
                            _ => {}
                        }
                    }
                }
                for n in &out.notes {
                    info!("stage {stage}: {n}");
                }
                self.manifest.stages.insert(
                    stage.name().to_string(),
                    StageRecord {
                        status: StageStatus::Ok,
                        config_digest: self.manifest.config_digest.clone(),
                        inputs,
                        outputs,
                        warnings: out.warnings,
                        notes: out.notes,
                        error: None,
                    },
                );
                Ok(())
            }
            Err(e) => {
                let e = e.in_stage(stage);
                self.manifest.stages.insert(
                    stage.name().to_string(),
                    StageRecord {
                        status: StageStatus::Failed,
                        config_digest: self.manifest.config_digest.clone(),
                        inputs: BTreeMap::new(),
                        // earlier outputs stay on disk and stay referenced
                        outputs: previous.map(|p| p.outputs).unwrap_or_default(),
                        warnings: Vec::new(),
                        notes: Vec::new(),
                        error: Some(e.to_string()),
                    },
                );
                Err(e)
            }
        };
        self.times.insert(stage.name().to_string(), started.elapsed().as_secs_f64());
        self.save()?;
        outcome
    }

    fn save(&self) -> Result<(), PipelineError> {
        let ws = &self.cfg.workspace;
        self.manifest.save(ws)?;
        let mut t = serde_json::to_vec_pretty(&self.times).map_err(io::Error::from)?;
        t.push(b'\n');
        write_atomic(&ws.join(TIMES_FILE), &t)?;
        Ok(())
    }
}

/// Runs every stage in order, skipping those whose inputs, configuration and
/// outputs are unchanged since they last succeeded. Stops at the first
/// failure, which is recorded in the manifest.
pub fn run_pipeline(cfg: &RunConfig) -> Result<RunSummary, PipelineError> {
    let mut session = Session::open(cfg)?;
    let mut summary = RunSummary::default();
    for stage in Stage::ALL {
        if session.is_current(stage) {
            info!("stage {stage}: up to date, skipped");
            summary.skipped.push(stage);
        } else {
            session.run(stage)?;
            summary.executed.push(stage);
        }
    }
    session.save()?;
    Ok(summary)
}

/// Runs one stage unconditionally.
pub fn run_stage(cfg: &RunConfig, stage: Stage) -> Result<(), PipelineError> {
    let mut session = Session::open(cfg)?;
    session.run(stage)
}
