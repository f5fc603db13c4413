//! `narrative analyze`: keystone removal, centrality, ego and power
//! networks, components and first-mention series.

use crate::{io_error, CliError};
use clap::{Args, Subcommand, ValueEnum};
use narrative_core::centrality::{centrality, Measure};
use narrative_core::export;
use narrative_core::interchange::{load_corpus, IngestConfig};
use narrative_core::network::{
    components, ego_network, first_mention_series, keystone_decomposition, power_network,
    NarrativeNetwork, DEFAULT_POWER_VERBS,
};
use narrative_core::supernode::Supernode;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

#[derive(Args)]
pub struct AnalyzeArgs {
    /// Write the result here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: AnalyzeCommand,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Eigen,
    Pagerank,
    BetweennessEdges,
}

#[derive(Subcommand)]
enum AnalyzeCommand {
    /// Connected components after removing a supernode (and its subnodes).
    Keystone {
        network: PathBuf,
        #[arg(long)]
        supernode: String,
    },
    /// Connected components of the undirected network.
    Components { network: PathBuf },
    /// Node or edge centrality scores.
    Centrality {
        network: PathBuf,
        #[arg(long, value_enum, default_value = "pagerank")]
        measure: MeasureArg,
    },
    /// A node with its neighbors and the edges among them, as network JSON.
    Ego {
        network: PathBuf,
        #[arg(long)]
        node: String,
    },
    /// Edges among roster nodes whose verbs include a power verb.
    Power {
        network: PathBuf,
        /// Comma-separated node ids.
        #[arg(long, value_delimiter = ',', required = true)]
        roster: Vec<String>,
        /// Comma-separated verbs; a built-in list when omitted.
        #[arg(long, value_delimiter = ',')]
        verbs: Vec<String>,
    },
    /// Date each supernode is first mentioned, with the cumulative count.
    FirstMentions {
        /// Interchange corpus with timestamps.
        corpus: PathBuf,
        /// supernodes.json from a run.
        #[arg(long)]
        supernodes: PathBuf,
    },
}

fn load_network(path: &Path) -> Result<NarrativeNetwork, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| io_error(path, e))
}

#[derive(Serialize)]
struct ComponentReport {
    removed: Option<String>,
    count: usize,
    sizes: Vec<usize>,
    components: Vec<Vec<String>>,
}

impl ComponentReport {
    fn new(removed: Option<String>, components: Vec<Vec<String>>) -> Self {
        ComponentReport {
            removed,
            count: components.len(),
            sizes: components.iter().map(Vec::len).collect(),
            components,
        }
    }
}

#[derive(Serialize)]
struct MentionReport {
    series: narrative_core::network::MentionSeries,
    cumulative: Vec<(String, usize)>,
}

fn emit(output: Option<&Path>, text: String) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| io_error(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

pub fn run(args: &AnalyzeArgs) -> Result<(), CliError> {
    let unknown = |e: narrative_core::network::NetworkError| CliError::Usage(e.to_string());
    let text = match &args.command {
        AnalyzeCommand::Keystone { network, supernode } => {
            let net = load_network(network)?;
            let parts = keystone_decomposition(&net, supernode).map_err(unknown)?;
            pretty(&ComponentReport::new(Some(supernode.clone()), parts))
        }
        AnalyzeCommand::Components { network } => pretty(&ComponentReport::new(
            None,
            components(&load_network(network)?),
        )),
        AnalyzeCommand::Centrality { network, measure } => {
            let m = match measure {
                MeasureArg::Eigen => Measure::Eigen,
                MeasureArg::Pagerank => Measure::Pagerank,
                MeasureArg::BetweennessEdges => Measure::BetweennessEdges,
            };
            let mut scores: Vec<(String, f64)> =
                centrality(&load_network(network)?, m).into_iter().collect();
            scores.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            let mut out = String::from("id\tscore\n");
            for (id, s) in scores {
                out.push_str(&format!("{id}\t{s:.6}\n"));
            }
            out
        }
        AnalyzeCommand::Ego { network, node } => export::to_json(
            &ego_network(&load_network(network)?, node).map_err(unknown)?,
            None,
        ),
        AnalyzeCommand::Power {
            network,
            roster,
            verbs,
        } => {
            let roster: BTreeSet<String> = roster.iter().cloned().collect();
            let verbs: Vec<&str> = if verbs.is_empty() {
                DEFAULT_POWER_VERBS.to_vec()
            } else {
                verbs.iter().map(String::as_str).collect()
            };
            export::to_json(
                &power_network(&load_network(network)?, &roster, &verbs),
                None,
            )
        }
        AnalyzeCommand::FirstMentions { corpus, supernodes } => {
            let c = load_corpus(corpus, &IngestConfig::default())
                .map_err(|e| CliError::Data(e.to_string()))?;
            let text = std::fs::read_to_string(supernodes).map_err(|e| io_error(supernodes, e))?;
            let sn: Vec<Supernode> =
                serde_json::from_str(&text).map_err(|e| io_error(supernodes, e))?;
            let entities: BTreeMap<String, BTreeSet<String>> = sn
                .iter()
                .map(|s| (s.name(), s.member_phrases.clone()))
                .collect();
            let series = first_mention_series(&c.tuples, &entities);
            let cumulative = series
                .cumulative()
                .into_iter()
                .map(|(d, n)| (d.to_string(), n))
                .collect();
            pretty(&MentionReport { series, cumulative })
        }
    };
    emit(args.output.as_deref(), text)
}
