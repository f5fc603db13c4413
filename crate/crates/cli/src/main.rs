//! `narrative`: command-line driver for the narrative framework pipeline.
//!
//! Stage subcommands (`ingest` through `evaluate`) rerun the pipeline from
//! the interchange corpus up to that stage. `run` goes all the way, or
//! replays a manifest. `analyze` works on an assembled `network.json`.

mod analyze;

use clap::{Args, Parser, Subcommand};
use narrative_core::config::{ConfigError, Preset, RunConfig};
use narrative_core::embedding::{hashed_embedding, DEFAULT_TEST_DIM};
use narrative_core::evaluation::{GoldEdge, GoldGraph, GoldNode};
use narrative_core::interchange::{save_corpus, PhraseTable};
use narrative_core::pipeline::{run_pipeline, sha256_hex, Manifest, PipelineError, Stage};
use narrative_core::significance::stem_verb;
use narrative_core::synth::{demo_framework, generate_synthetic_corpus, PlantedFramework};
use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Pipeline(e) => e.exit_code() as u8,
            CliError::Config(_) | CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
        }
    }
}

pub(crate) fn io_error(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

#[derive(Parser)]
#[command(
    name = "narrative",
    version,
    about = "Narrative framework discovery from extraction tuples"
)]
struct Cli {
    /// More log output (-v info, -vv debug). RUST_LOG overrides.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load and validate the corpus.
    Ingest(StageArgs),
    /// Rank entities by frequency.
    Rank(StageArgs),
    /// Group ranked entities into supernodes.
    Supernodes(StageArgs),
    /// Cluster supernode phrases into labeled subnodes.
    Subnodes(StageArgs),
    /// Score relationship verbs per actant context.
    Score(StageArgs),
    /// Build the narrative network and its exports.
    Assemble(StageArgs),
    /// Consensus community detection.
    Communities(StageArgs),
    /// Compare the network against a gold graph.
    Evaluate(StageArgs),
    /// Full run, optionally stopping early or replaying a manifest.
    Run(RunArgs),
    /// Analyses on an assembled network.
    Analyze(analyze::AnalyzeArgs),
    /// Generate a seeded corpus from a planted framework.
    Synth(SynthArgs),
    /// Print the resolved configuration as key = value lines.
    Config(StageArgs),
}

#[derive(Args, Clone, Default)]
struct StageArgs {
    /// Interchange JSONL corpus.
    input: Option<PathBuf>,
    /// Output directory for artifacts.
    #[arg(short, long, default_value = "out")]
    output: PathBuf,
    /// Configuration file of key = value lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Parameter preset: desk, pizzagate or bridgegate.
    #[arg(long)]
    preset: Option<String>,
    /// Embedding sidecar JSONL. Without it a hashed test embedding is used.
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Gold graph JSON for the evaluate stage.
    #[arg(long)]
    gold: Option<PathBuf>,
    #[arg(long)]
    min_frequency: Option<String>,
    #[arg(long)]
    k_max: Option<String>,
    #[arg(long)]
    k_clusters: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    n_label: Option<String>,
    #[arg(long)]
    prune_ratio: Option<String>,
    /// Seed for subnode clustering.
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    top_m: Option<String>,
    #[arg(long)]
    min_context_count: Option<String>,
    /// kl or tfidf-style.
    #[arg(long)]
    scoring: Option<String>,
    /// Number of community detection runs.
    #[arg(long)]
    tmax: Option<String>,
    #[arg(long)]
    pth1: Option<String>,
    #[arg(long)]
    pth2: Option<String>,
    #[arg(long)]
    community_seed: Option<String>,
    /// mean or an absolute frequency.
    #[arg(long)]
    freq_filter: Option<String>,
    #[arg(long)]
    tau: Option<String>,
    /// exact, stem or substring.
    #[arg(long)]
    match_mode: Option<String>,
    /// Any other key, as key=value. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl StageArgs {
    fn flags(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("min_frequency", &self.min_frequency),
            ("k_max", &self.k_max),
            ("k_clusters", &self.k_clusters),
            ("alpha", &self.alpha),
            ("n_label", &self.n_label),
            ("prune_ratio", &self.prune_ratio),
            ("seed", &self.seed),
            ("top_m", &self.top_m),
            ("min_context_count", &self.min_context_count),
            ("scoring", &self.scoring),
            ("t_max", &self.tmax),
            ("p_th1", &self.pth1),
            ("p_th2", &self.pth2),
            ("community_seed", &self.community_seed),
            ("freq_filter", &self.freq_filter),
            ("tau", &self.tau),
            ("match_mode", &self.match_mode),
        ]
    }

    /// Preset, then config file, then flags.
    fn resolve(&self, base: RunConfig) -> Result<RunConfig, CliError> {
        let mut c = base;
        if let Some(p) = &self.preset {
            let preset: Preset = p.parse().map_err(|e: <Preset as std::str::FromStr>::Err| {
                ConfigError::BadValue {
                    key: "preset".into(),
                    value: p.clone(),
                    reason: e.to_string(),
                }
            })?;
            c.apply_preset(preset);
        }
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            c.apply_text(&text)?;
        }
        for (key, value) in self.flags() {
            if let Some(v) = value {
                c.set(key, v)?;
            }
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got {kv:?}")))?;
            c.set(k.trim(), v)?;
        }
        if let Some(p) = &self.input {
            c.input = Some(p.clone());
        }
        if let Some(p) = &self.embeddings {
            c.embeddings = Some(p.clone());
        }
        if let Some(p) = &self.gold {
            c.gold = Some(p.clone());
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    stage_args: StageArgs,
    /// Last stage to run.
    #[arg(long, default_value = "evaluate")]
    stage: Stage,
    /// Replay the configuration recorded in a manifest. Flags still apply
    /// on top.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    /// Planted framework JSON. The built-in demo framework when omitted.
    #[arg(long)]
    framework: Option<PathBuf>,
    #[arg(long, default_value_t = 2000)]
    posts: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Corpus JSONL to write.
    #[arg(short, long)]
    output: PathBuf,
    /// Also write the planted actants and relations as a gold graph.
    #[arg(long)]
    gold: Option<PathBuf>,
    /// Also write an embedding sidecar covering every phrase.
    #[arg(long)]
    sidecar: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TEST_DIM)]
    dim: usize,
    /// Write the framework itself as JSON, handy as a template.
    #[arg(long)]
    dump_framework: Option<PathBuf>,
}

fn run_stage(args: &StageArgs, until: Stage) -> Result<(), CliError> {
    let cfg = args.resolve(RunConfig::default())?;
    finish(run_pipeline(&cfg, &args.output, until)?, &args.output)
}

fn finish(outcome: narrative_core::pipeline::RunOutcome, out: &Path) -> Result<(), CliError> {
    if let Some(s) = &outcome.stats {
        log::info!(
            "{} supernodes, {} subnodes, {} labeled relationships, avg degree {}",
            s.n_supernodes,
            s.n_subnodes,
            s.n_labeled_rel,
            s.avg_degree
        );
    }
    println!(
        "{} artifacts written to {}",
        outcome.artifacts.len(),
        out.display()
    );
    Ok(())
}

fn run(args: &RunArgs) -> Result<(), CliError> {
    let sa = &args.stage_args;
    let base = match &args.manifest {
        None => RunConfig::default(),
        Some(path) => {
            let m = Manifest::load(path).map_err(|e| CliError::Usage(e.to_string()))?;
            let c = m.run_config()?;
            if sa.input.is_none() {
                if let Some(input) = &c.input {
                    let bytes = std::fs::read(input).map_err(|e| io_error(input, e))?;
                    if sha256_hex(&bytes) != m.input_sha256 {
                        return Err(CliError::Data(format!(
                            "{} changed since the manifest was written",
                            input.display()
                        )));
                    }
                }
            }
            c
        }
    };
    let cfg = sa.resolve(base)?;
    finish(run_pipeline(&cfg, &sa.output, args.stage)?, &sa.output)
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    std::fs::write(path, s).map_err(|e| io_error(path, e))
}

fn synth(args: &SynthArgs) -> Result<(), CliError> {
    let framework: PlantedFramework = match &args.framework {
        None => demo_framework(),
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            serde_json::from_str(&text).map_err(|e| io_error(path, e))?
        }
    };
    let tuples = generate_synthetic_corpus(&framework, args.posts, args.seed)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    save_corpus(&args.output, &tuples).map_err(|e| CliError::Data(e.to_string()))?;
    if let Some(path) = &args.dump_framework {
        write_json(path, &framework)?;
    }
    if let Some(path) = &args.gold {
        let gold = GoldGraph {
            nodes: framework
                .actants
                .iter()
                .map(|a| GoldNode {
                    label: a.name.clone(),
                })
                .collect(),
            edges: framework
                .relations()
                .into_iter()
                .map(|r| GoldEdge {
                    src: r.source,
                    dst: r.target,
                    relationship: r.verb,
                })
                .collect(),
            provenance: format!("planted framework, seed {}", args.seed),
        };
        write_json(path, &gold)?;
    }
    if let Some(path) = &args.sidecar {
        let mut out = format!("{{\"schema_version\":\"1\",\"dim\":{}}}\n", args.dim);
        for entry in PhraseTable::from_tuples(&tuples).iter() {
            let p = &entry.phrase;
            let row = serde_json::json!({
                "phrase_id": p.id,
                "text": p.text,
                "vector": hashed_embedding(&p.text, args.dim).values(),
            });
            out.push_str(&row.to_string());
            out.push('\n');
        }
        // evaluation embeds verbs and gold relationships by text
        let mut verbs: BTreeSet<String> =
            framework.relations().into_iter().map(|r| r.verb).collect();
        for t in &tuples {
            for v in &t.rel_verbs {
                verbs.insert(v.clone());
                verbs.insert(stem_verb(v));
            }
        }
        for v in verbs {
            let row = serde_json::json!({
                "phrase_id": format!("verb:{v}"),
                "text": v,
                "vector": hashed_embedding(&v, args.dim).values(),
            });
            out.push_str(&row.to_string());
            out.push('\n');
        }
        std::fs::write(path, out).map_err(|e| io_error(path, e))?;
    }
    println!(
        "{} tuples written to {}",
        tuples.len(),
        args.output.display()
    );
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Ingest(a) => run_stage(&a, Stage::Ingest),
        Command::Rank(a) => run_stage(&a, Stage::Rank),
        Command::Supernodes(a) => run_stage(&a, Stage::Supernodes),
        Command::Subnodes(a) => run_stage(&a, Stage::Subnodes),
        Command::Score(a) => run_stage(&a, Stage::Score),
        Command::Assemble(a) => run_stage(&a, Stage::Assemble),
        Command::Communities(a) => run_stage(&a, Stage::Communities),
        Command::Evaluate(a) => run_stage(&a, Stage::Evaluate),
        Command::Run(a) => run(&a),
        Command::Analyze(a) => analyze::run(&a),
        Command::Synth(a) => synth(&a),
        Command::Config(a) => {
            let cfg = a.resolve(RunConfig::default())?;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(cfg.to_text().as_bytes())
                .map_err(|e| CliError::Data(e.to_string()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
