//! End-to-end orchestration: ingest, rank, supernodes, subnodes, verb
//! scoring, network assembly, communities and optional evaluation, with
//! every artifact hashed into a replayable manifest.

use crate::community::{
    community_tags, consensus_communities, frequency_filter, size_summary, CommunityAssignment,
    CommunityError, FilteredCommunities, SizeSummary,
};
use crate::config::{ConfigError, RunConfig};
use crate::embedding::{EmbeddingError, EmbeddingStore};
use crate::evaluation::{evaluate, report_table, EvalError, GoldGraph};
use crate::export::{self, NodeTags};
use crate::interchange::{
    load_corpus, post_word_frequency, CorpusStats, IngestError, LoadReport, PhraseTable,
};
use crate::network::{
    assemble, subnode_nodes, supernode_groups, supernode_nodes, ActantMap, NarrativeNetwork,
    NetworkStats,
};
use crate::ranking::{rank_entities, ranking_table};
use crate::significance::{build_contexts, score_contexts, ScoreError, ScoredContext};
use crate::subnode::{build_subnodes, subnode_table};
use crate::supernode::{build_supernodes, supernode_table};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

pub const MANIFEST_FILE: &str = "manifest.json";
const MANIFEST_VERSION: &str = "1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Ingest,
    Rank,
    Supernodes,
    Subnodes,
    Score,
    Assemble,
    Communities,
    Evaluate,
}

impl Stage {
    pub const ALL: [Stage; 8] = [
        Stage::Ingest,
        Stage::Rank,
        Stage::Supernodes,
        Stage::Subnodes,
        Stage::Score,
        Stage::Assemble,
        Stage::Communities,
        Stage::Evaluate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Rank => "rank",
            Stage::Supernodes => "supernodes",
            Stage::Subnodes => "subnodes",
            Stage::Score => "score",
            Stage::Assemble => "assemble",
            Stage::Communities => "communities",
            Stage::Evaluate => "evaluate",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown stage {s:?}"))
    }
}

#[derive(Debug, Error)]
pub enum StageError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Score(#[from] ScoreError),
    #[error(transparent)]
    Community(#[from] CommunityError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot read manifest: {0}")]
    Manifest(String),
}

#[derive(Debug, Error)]
#[error("stage {stage} failed: {source}")]
pub struct PipelineError {
    pub stage: Stage,
    #[source]
    pub source: StageError,
}

impl PipelineError {
    /// 2 for configuration problems, 3 for bad or missing data, 4 for
    /// violated internal invariants.
    pub fn exit_code(&self) -> i32 {
        match &self.source {
            StageError::Config(_) | StageError::Community(_) | StageError::Manifest(_) => 2,
            StageError::Eval(EvalError::Tau(_)) => 2,
            StageError::Score(ScoreError::Inconsistent { .. }) => 4,
            _ => 3,
        }
    }
}

fn at<E: Into<StageError>>(stage: Stage) -> impl Fn(E) -> PipelineError {
    move |e| PipelineError {
        stage,
        source: e.into(),
    }
}

/// Writes files into the output directory and remembers their hashes.
struct Artifacts {
    dir: PathBuf,
    hashes: BTreeMap<String, String>,
}

impl Artifacts {
    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), StageError> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|source| StageError::Write {
            path: path.display().to_string(),
            source,
        })?;
        self.hashes.insert(name.to_string(), sha256_hex(bytes));
        Ok(())
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), StageError> {
        let mut s = serde_json::to_string_pretty(value).expect("artifact serializes");
        s.push('\n');
        self.write(name, s.as_bytes())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub manifest_version: String,
    pub last_stage: String,
    pub config: BTreeMap<String, String>,
    pub input_sha256: String,
    pub artifacts: BTreeMap<String, String>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self, StageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| StageError::Manifest(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| StageError::Manifest(e.to_string()))
    }

    /// The run configuration recorded in the manifest.
    pub fn run_config(&self) -> Result<RunConfig, ConfigError> {
        let mut c = RunConfig::default();
        // preset first, so explicit values recorded after it win
        if let Some(p) = self.config.get("preset") {
            c.set("preset", p)?;
        }
        for (k, v) in &self.config {
            if k != "preset" {
                c.set(k, v)?;
            }
        }
        Ok(c)
    }
}

#[derive(Debug, Serialize)]
struct IngestArtifact<'a> {
    report: &'a LoadReport,
    stats: &'a CorpusStats,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommunityArtifact {
    pub assignment: CommunityAssignment,
    pub sizes: SizeSummary,
    pub filtered: FilteredCommunities,
    pub filtered_sizes: SizeSummary,
}

/// What a run produced, for callers that want to inspect results without
/// re-reading the artifacts.
#[derive(Debug, Clone, Default)]
pub struct RunOutcome {
    pub artifacts: BTreeMap<String, String>,
    pub network: Option<NarrativeNetwork>,
    pub supernode_network: Option<NarrativeNetwork>,
    pub supernode_contexts: Vec<ScoredContext>,
    pub stats: Option<NetworkStats>,
    pub communities: Option<CommunityAssignment>,
    pub manifest: Option<Manifest>,
}

fn stats_table(
    corpus: &CorpusStats,
    s: &NetworkStats,
    communities: Option<&CommunityArtifact>,
) -> String {
    let mut rows = vec![
        ("documents", corpus.n_docs.to_string()),
        ("sentences", corpus.n_sentences.to_string()),
        ("tuples", corpus.n_tuples.to_string()),
        ("supernodes", s.n_supernodes.to_string()),
        ("subnodes", s.n_subnodes.to_string()),
        ("relationship_extractions", s.n_rel_extractions.to_string()),
        ("labeled_relationships", s.n_labeled_rel.to_string()),
        ("avg_degree", s.avg_degree.to_string()),
    ];
    if let Some(c) = communities {
        rows.push(("communities", c.sizes.count.to_string()));
        rows.push(("communities_ge_20", c.sizes.at_least_20.to_string()));
        rows.push(("community_mean_size", format!("{:.2}", c.sizes.mean)));
        rows.push(("community_median_size", format!("{}", c.sizes.median)));
        rows.push((
            "communities_after_filter",
            c.filtered_sizes.count.to_string(),
        ));
    }
    let mut out = String::from("metric\tvalue\n");
    for (k, v) in rows {
        out.push_str(&format!("{k}\t{v}\n"));
    }
    out
}

fn write_network(
    art: &mut Artifacts,
    net: &NarrativeNetwork,
    tags: Option<&NodeTags>,
) -> Result<(), StageError> {
    art.write("network.json", export::to_json(net, tags).as_bytes())?;
    art.write("network.graphml", export::to_graphml(net, tags).as_bytes())?;
    art.write("network.gexf", export::to_gexf(net, tags).as_bytes())?;
    let csv_err = |e: csv::Error| StageError::Write {
        path: "csv".into(),
        source: std::io::Error::other(e.to_string()),
    };
    art.write(
        "nodes.csv",
        export::nodes_csv(net, tags).map_err(csv_err)?.as_bytes(),
    )?;
    art.write(
        "edges.csv",
        export::edges_csv(net).map_err(csv_err)?.as_bytes(),
    )?;
    Ok(())
}

/// Runs every stage up to and including `until`, writing artifacts into
/// `out_dir`. Artifacts of completed stages stay on disk when a later
/// stage fails.
pub fn run_pipeline(
    config: &RunConfig,
    out_dir: &Path,
    until: Stage,
) -> Result<RunOutcome, PipelineError> {
    config.validate().map_err(at(Stage::Ingest))?;
    let input = config.input.as_deref().ok_or_else(|| PipelineError {
        stage: Stage::Ingest,
        source: ConfigError::Constraint("no input corpus given".into()).into(),
    })?;
    std::fs::create_dir_all(out_dir)
        .map_err(|source| StageError::Write {
            path: out_dir.display().to_string(),
            source,
        })
        .map_err(at(Stage::Ingest))?;
    let mut art = Artifacts {
        dir: out_dir.to_path_buf(),
        hashes: BTreeMap::new(),
    };
    let mut outcome = RunOutcome::default();
    let input_bytes = std::fs::read(input)
        .map_err(|source| IngestError::Io {
            path: input.display().to_string(),
            source,
        })
        .map_err(at(Stage::Ingest))?;
    let input_sha256 = sha256_hex(&input_bytes);
    drop(input_bytes);

    let finish = |art: Artifacts,
                  mut outcome: RunOutcome,
                  last: Stage|
     -> Result<RunOutcome, PipelineError> {
        let manifest = Manifest {
            manifest_version: MANIFEST_VERSION.into(),
            last_stage: last.name().into(),
            config: config
                .pairs()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            input_sha256: input_sha256.clone(),
            artifacts: art.hashes.clone(),
        };
        let mut s = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        s.push('\n');
        let path = art.dir.join(MANIFEST_FILE);
        std::fs::write(&path, s)
            .map_err(|source| StageError::Write {
                path: path.display().to_string(),
                source,
            })
            .map_err(at(last))?;
        outcome.artifacts = art.hashes;
        outcome.manifest = Some(manifest);
        Ok(outcome)
    };

    // ingest
    let stage = Stage::Ingest;
    log::info!("ingesting {}", input.display());
    let corpus = load_corpus(input, &config.ingest).map_err(at(stage))?;
    log::info!(
        "{} tuples admitted, {} malformed, {} rejected, {} duplicates",
        corpus.tuples.len(),
        corpus.report.malformed.len(),
        corpus.report.rejected.len(),
        corpus.report.duplicates
    );
    art.json(
        "ingest.json",
        &IngestArtifact {
            report: &corpus.report,
            stats: &corpus.stats,
        },
    )
    .map_err(at(stage))?;
    if until == stage {
        return finish(art, outcome, stage);
    }

    // rank
    let stage = Stage::Rank;
    let ranking = rank_entities(&corpus.tuples, config.min_frequency);
    art.write("ranking.tsv", ranking_table(&ranking).as_bytes())
        .map_err(at(stage))?;
    art.json("ranking.json", &ranking).map_err(at(stage))?;
    if until == stage {
        return finish(art, outcome, stage);
    }

    // supernodes
    let stage = Stage::Supernodes;
    let phrases = PhraseTable::from_tuples(&corpus.tuples);
    let supernodes = build_supernodes(&ranking, &phrases, config.k_max);
    log::info!("{} supernodes", supernodes.len());
    art.json("supernodes.json", &supernodes)
        .map_err(at(stage))?;
    art.write("supernodes.tsv", supernode_table(&supernodes).as_bytes())
        .map_err(at(stage))?;
    if until == stage {
        return finish(art, outcome, stage);
    }

    // subnodes
    let stage = Stage::Subnodes;
    let store = match &config.embeddings {
        Some(p) => EmbeddingStore::load_sidecar(p).map_err(at(stage))?,
        None => EmbeddingStore::deterministic(config.embedding_dim),
    };
    let post_freq = post_word_frequency(&corpus.tuples);
    let subnodes = build_subnodes(&supernodes, &phrases, &store, &post_freq, &config.subnodes)
        .map_err(at(stage))?;
    log::info!("{} subnodes", subnodes.len());
    art.json("subnodes.json", &subnodes).map_err(at(stage))?;
    art.write(
        "subnodes.tsv",
        subnode_table(&supernodes, &subnodes).as_bytes(),
    )
    .map_err(at(stage))?;
    if until == stage {
        return finish(art, outcome, stage);
    }

    // score
    let stage = Stage::Score;
    let sub_map = ActantMap::from_subnodes(&subnodes);
    let sub_contexts = build_contexts(&corpus.tuples, |p| sub_map.actants(p).to_vec(), true);
    let sub_scored = score_contexts(
        &sub_contexts,
        &corpus.tuples,
        &corpus.stats,
        &config.scoring,
    )
    .map_err(at(stage))?;
    let super_map = ActantMap::from_supernodes(&supernodes);
    let super_contexts = build_contexts(&corpus.tuples, |p| super_map.actants(p).to_vec(), true);
    let super_scored = score_contexts(
        &super_contexts,
        &corpus.tuples,
        &corpus.stats,
        &config.scoring,
    )
    .map_err(at(stage))?;
    log::info!(
        "{} subnode contexts, {} supernode contexts",
        sub_scored.len(),
        super_scored.len()
    );
    art.json("contexts.json", &sub_scored).map_err(at(stage))?;
    art.json("contexts_supernode.json", &super_scored)
        .map_err(at(stage))?;
    if until == stage {
        outcome.supernode_contexts = super_scored;
        return finish(art, outcome, stage);
    }

    // assemble
    let stage = Stage::Assemble;
    let min_weight = config.scoring.min_context_count;
    let net = assemble(
        &corpus.tuples,
        subnode_nodes(&subnodes),
        supernode_groups(&supernodes, &subnodes),
        &sub_map,
        &sub_scored,
        min_weight,
    );
    let super_net = assemble(
        &corpus.tuples,
        supernode_nodes(&supernodes),
        Vec::new(),
        &super_map,
        &super_scored,
        min_weight,
    );
    let stats = net.stats();
    write_network(&mut art, &net, None).map_err(at(stage))?;
    art.write(
        "network_supernode.json",
        export::to_json(&super_net, None).as_bytes(),
    )
    .map_err(at(stage))?;
    art.write(
        "stats.tsv",
        stats_table(&corpus.stats, &stats, None).as_bytes(),
    )
    .map_err(at(stage))?;
    outcome.stats = Some(stats.clone());
    outcome.supernode_contexts = super_scored;
    outcome.supernode_network = Some(super_net);
    if until == stage {
        outcome.network = Some(net);
        return finish(art, outcome, stage);
    }

    // communities
    let stage = Stage::Communities;
    let assignment = consensus_communities(&net, &config.consensus).map_err(at(stage))?;
    let frequencies: BTreeMap<String, u64> = net
        .nodes
        .iter()
        .map(|n| (n.id.clone(), n.frequency))
        .collect();
    let filtered = frequency_filter(&assignment, &frequencies, config.freq_filter);
    let communities = CommunityArtifact {
        sizes: size_summary(&assignment.extended),
        filtered_sizes: size_summary(filtered.communities.iter().map(|(_, c)| c)),
        assignment,
        filtered,
    };
    log::info!("{} communities", communities.sizes.count);
    let tags = community_tags(communities.assignment.extended.iter().enumerate());
    art.json("communities.json", &communities)
        .map_err(at(stage))?;
    write_network(&mut art, &net, Some(&tags)).map_err(at(stage))?;
    art.write(
        "stats.tsv",
        stats_table(&corpus.stats, &stats, Some(&communities)).as_bytes(),
    )
    .map_err(at(stage))?;
    outcome.communities = Some(communities.assignment);
    if until == stage {
        outcome.network = Some(net);
        return finish(art, outcome, stage);
    }

    // evaluate
    let stage = Stage::Evaluate;
    if let Some(gold_path) = &config.gold {
        let gold = GoldGraph::load(gold_path).map_err(at(stage))?;
        let report = evaluate(
            &net,
            &gold,
            &store,
            config.tau,
            config.eval_freq_threshold,
            config.match_mode,
        )
        .map_err(at(stage))?;
        art.json("evaluation.json", &report).map_err(at(stage))?;
        art.write(
            "evaluation.txt",
            report_table(&report, config.eval_freq_threshold).as_bytes(),
        )
        .map_err(at(stage))?;
    }
    outcome.network = Some(net);
    finish(art, outcome, stage)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_names_roundtrip() {
        for s in Stage::ALL {
            assert_eq!(s.name().parse::<Stage>().unwrap(), s);
        }
        assert!("bogus".parse::<Stage>().is_err());
    }

    #[test]
    fn missing_input_is_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let err = run_pipeline(&RunConfig::default(), dir.path(), Stage::Evaluate).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let c = RunConfig {
            input: Some(dir.path().join("absent.jsonl")),
            ..RunConfig::default()
        };
        let err = run_pipeline(&c, dir.path(), Stage::Evaluate).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert_eq!(err.stage, Stage::Ingest);
    }

    #[test]
    fn manifest_config_roundtrip() {
        let mut c = RunConfig::with_preset(crate::config::Preset::Bridgegate);
        c.set("alpha", "0.6").unwrap();
        let m = Manifest {
            manifest_version: "1".into(),
            last_stage: "evaluate".into(),
            config: c
                .pairs()
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            input_sha256: String::new(),
            artifacts: BTreeMap::new(),
        };
        assert_eq!(m.run_config().unwrap(), c);
    }
}
