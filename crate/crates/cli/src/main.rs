use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::error;
use sociominer_core::pipeline::{run_pipeline, run_stage, PipelineError, RunConfig, Stage, SweepRange};

/// Socio-technical analysis of a project's commits and mailing lists.
#[derive(Debug, Parser)]
#[command(name = "sociominer", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Technical,
    Personality,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// Run configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// SSE sweep range `a..b`, overriding the config.
    #[arg(long)]
    sweep: Option<SweepRange>,
    /// Clustering target; both when omitted.
    #[arg(long, value_enum)]
    target: Option<Target>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse git logs and mbox archives into JSONL.
    Ingest(Common),
    /// Resolve author and sender aliases.
    Identities(Common),
    /// Build per-committer corpora and score traits.
    Traits(Common),
    /// Technical and/or personality clustering.
    Cluster(Common),
    /// Centroids, entropy ranking and participation tables.
    Analyze(Common),
    /// Committer/list communication graph.
    Graph(Common),
    /// Heat maps, radar charts and masked tables.
    Report(Common),
    /// Every stage in order, skipping unchanged ones.
    Run(Common),
}

fn execute(cmd: Command) -> Result<(), PipelineError> {
    let (stages, args): (Vec<Stage>, Common) = match cmd {
        Command::Ingest(a) => (vec![Stage::Ingest], a),
        Command::Identities(a) => (vec![Stage::Identities], a),
        Command::Traits(a) => (vec![Stage::Traits], a),
        Command::Cluster(a) => {
            let s = match a.target {
                Some(Target::Technical) => vec![Stage::ClusterTechnical],
                Some(Target::Personality) => vec![Stage::ClusterPersonality],
                None => vec![Stage::ClusterTechnical, Stage::ClusterPersonality],
            };
            (s, a)
        }
        Command::Analyze(a) => (vec![Stage::Analyze], a),
        Command::Graph(a) => (vec![Stage::Graph], a),
        Command::Report(a) => (vec![Stage::Report], a),
        Command::Run(a) => (Vec::new(), a),
    };
    let mut cfg = RunConfig::load(&args.config)?;
    if let Some(range) = args.sweep {
        if args.target != Some(Target::Personality) {
            cfg.sweep.technical = Some(range);
        }
        if args.target != Some(Target::Technical) {
            cfg.sweep.personality = Some(range);
        }
    }
    if stages.is_empty() {
        let summary = run_pipeline(&cfg)?;
        let names = |v: &[Stage]| v.iter().map(|s| s.name()).collect::<Vec<_>>().join(", ");
        println!("executed: {}", names(&summary.executed));
        println!("skipped: {}", names(&summary.skipped));
    } else {
        for stage in stages {
            run_stage(&cfg, stage)?;
            println!("{stage}: ok");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            error!("{e}");
            eprintln!("sociominer: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
