//! Overlapping communities by consensus over repeated Louvain runs.
//!
//! Each run uses its own seed to shuffle node and neighbor visiting order.
//! Pairs co-assigned in at least `p_th1` of the runs form disjoint cores;
//! cores then absorb every node co-assigned with a core member in at least
//! `p_th2` of the runs, so shared nodes may belong to several communities.

use crate::network::{NarrativeNetwork, UndirectedView};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CommunityError {
    #[error("thresholds must satisfy 0 < p_th2 < p_th1 <= 1 (got p_th1={p_th1}, p_th2={p_th2})")]
    Thresholds { p_th1: f64, p_th2: f64 },
    #[error("t_max must be at least 1")]
    NoRuns,
}

const MAX_LOCAL_PASSES: usize = 1000;

/// Weighted graph used inside Louvain; `self_loops[i]` is the internal
/// weight collapsed into node `i` by aggregation.
#[derive(Debug, Clone)]
struct Graph {
    adj: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
}

impl Graph {
    fn from_view(view: &UndirectedView) -> Self {
        Graph {
            adj: view
                .adjacency
                .iter()
                .map(|a| a.iter().map(|(&j, &w)| (j, w)).collect())
                .collect(),
            self_loops: vec![0.0; view.len()],
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    fn degree(&self, i: usize) -> f64 {
        self.adj[i].iter().map(|(_, w)| w).sum::<f64>() + 2.0 * self.self_loops[i]
    }
}

/// Modularity of a labeling of the undirected view.
pub fn modularity(view: &UndirectedView, labels: &[usize]) -> f64 {
    let g = Graph::from_view(view);
    let m2: f64 = (0..g.len()).map(|i| g.degree(i)).sum();
    if m2 == 0.0 {
        return 0.0;
    }
    let mut inside: BTreeMap<usize, f64> = BTreeMap::new();
    let mut total: BTreeMap<usize, f64> = BTreeMap::new();
    for i in 0..g.len() {
        *total.entry(labels[i]).or_default() += g.degree(i);
        for &(j, w) in &g.adj[i] {
            if labels[i] == labels[j] {
                *inside.entry(labels[i]).or_default() += w;
            }
        }
    }
    total
        .iter()
        .map(|(c, t)| inside.get(c).copied().unwrap_or(0.0) / m2 - (t / m2).powi(2))
        .sum()
}

/// One local-moving phase. Returns community labels (0-based, dense) and
/// whether any node moved.
fn local_moves(g: &Graph, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
    let n = g.len();
    let degree: Vec<f64> = (0..n).map(|i| g.degree(i)).collect();
    let m2: f64 = degree.iter().sum();
    let mut community: Vec<usize> = (0..n).collect();
    if m2 == 0.0 {
        return (community, false);
    }
    let mut total = degree.clone();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut neighbor_orders: Vec<Vec<(usize, f64)>> = g.adj.clone();
    for nb in &mut neighbor_orders {
        nb.shuffle(rng);
    }
    let mut moved_any = false;
    let mut weight_to = vec![0.0; n];
    for _ in 0..MAX_LOCAL_PASSES {
        let mut moved = false;
        for &i in &order {
            let own = community[i];
            total[own] -= degree[i];
            let mut candidates = Vec::new();
            for &(j, w) in &neighbor_orders[i] {
                let c = community[j];
                if weight_to[c] == 0.0 {
                    candidates.push(c);
                }
                weight_to[c] += w;
            }
            let gain = |c: usize, w_c: f64| w_c - total[c] * degree[i] / m2;
            let mut best = own;
            let mut best_gain = gain(own, weight_to[own]);
            for &c in &candidates {
                let g_c = gain(c, weight_to[c]);
                if g_c > best_gain {
                    best = c;
                    best_gain = g_c;
                }
            }
            for &c in &candidates {
                weight_to[c] = 0.0;
            }
            weight_to[own] = 0.0;
            community[i] = best;
            total[best] += degree[i];
            if best != own {
                moved = true;
                moved_any = true;
            }
        }
        if !moved {
            break;
        }
    }
    (relabel(&community), moved_any)
}

/// Dense labels in order of first appearance.
fn relabel(labels: &[usize]) -> Vec<usize> {
    let mut map = BTreeMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

fn aggregate(g: &Graph, labels: &[usize]) -> Graph {
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut weights: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); k];
    let mut self_loops = vec![0.0; k];
    for i in 0..g.len() {
        self_loops[labels[i]] += g.self_loops[i];
        for &(j, w) in &g.adj[i] {
            let (a, b) = (labels[i], labels[j]);
            if a == b {
                // each internal edge is seen from both ends
                self_loops[a] += w / 2.0;
            } else {
                *weights[a].entry(b).or_default() += w;
            }
        }
    }
    Graph {
        adj: weights
            .into_iter()
            .map(|m| m.into_iter().collect())
            .collect(),
        self_loops,
    }
}

/// Two-phase greedy modularity optimization (local moves, then
/// aggregation) seeded by `seed`. Labels are dense, in order of first
/// node appearance.
pub fn louvain(view: &UndirectedView, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::from_view(view);
    let mut labels: Vec<usize> = (0..view.len()).collect();
    loop {
        let (level, moved) = local_moves(&g, &mut rng);
        if !moved {
            break;
        }
        for l in labels.iter_mut() {
            *l = level[*l];
        }
        g = aggregate(&g, &level);
    }
    relabel(&labels)
}

/// Co-assignment counts over `t_max` runs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CooccurrenceMatrix {
    pub ids: Vec<String>,
    pub t_max: u32,
    pub counts: Vec<Vec<u32>>,
}

impl CooccurrenceMatrix {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Normalized entry `A(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.counts[i][j] as f64 / self.t_max as f64
    }

    pub fn accumulate(ids: Vec<String>, runs: &[Vec<usize>]) -> Self {
        let n = ids.len();
        let mut counts = vec![vec![0u32; n]; n];
        for labels in runs {
            for i in 0..n {
                for j in i..n {
                    if labels[i] == labels[j] {
                        counts[i][j] += 1;
                        if i != j {
                            counts[j][i] += 1;
                        }
                    }
                }
            }
        }
        CooccurrenceMatrix {
            ids,
            t_max: runs.len() as u32,
            counts,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeStatus {
    Core,
    Shared,
    /// Never co-assigned with any other node above `p_th2`.
    Discarded,
    /// Co-assigned above `p_th2` with some node, but with no core member.
    Unaffiliated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeMembership {
    pub id: String,
    pub status: NodeStatus,
    /// Indices of the extended communities containing the node.
    pub communities: Vec<usize>,
    /// Community index to the strongest co-assignment with its core.
    pub strengths: BTreeMap<usize, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsensusConfig {
    pub t_max: u32,
    pub p_th1: f64,
    pub p_th2: f64,
    pub base_seed: u64,
}

impl Default for ConsensusConfig {
    fn default() -> Self {
        ConsensusConfig {
            t_max: 100,
            p_th1: 0.7,
            p_th2: 0.4,
            base_seed: 42,
        }
    }
}

impl ConsensusConfig {
    pub fn validate(&self) -> Result<(), CommunityError> {
        if self.t_max == 0 {
            return Err(CommunityError::NoRuns);
        }
        let ok = self.p_th2 > 0.0 && self.p_th2 < self.p_th1 && self.p_th1 <= 1.0;
        if !ok {
            return Err(CommunityError::Thresholds {
                p_th1: self.p_th1,
                p_th2: self.p_th2,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityAssignment {
    pub config: ConsensusConfig,
    /// Disjoint, each with at least two nodes; ordered by size desc, then
    /// smallest id.
    pub cores: Vec<BTreeSet<String>>,
    /// Supersets of the cores, index-aligned; may overlap.
    pub extended: Vec<BTreeSet<String>>,
    pub nodes: Vec<NodeMembership>,
    pub cooccurrence: CooccurrenceMatrix,
}

impl CommunityAssignment {
    pub fn len(&self) -> usize {
        self.cores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cores.is_empty()
    }
}

pub fn consensus_communities(
    net: &NarrativeNetwork,
    config: &ConsensusConfig,
) -> Result<CommunityAssignment, CommunityError> {
    config.validate()?;
    let view = UndirectedView::new(net);
    let runs: Vec<Vec<usize>> = (0..config.t_max as u64)
        .into_par_iter()
        .map(|r| louvain(&view, config.base_seed.wrapping_add(r)))
        .collect();
    let matrix = CooccurrenceMatrix::accumulate(view.ids.clone(), &runs);
    Ok(assign_from_matrix(matrix, config))
}

/// Thresholding and extension on an accumulated matrix.
pub fn assign_from_matrix(
    matrix: CooccurrenceMatrix,
    config: &ConsensusConfig,
) -> CommunityAssignment {
    let n = matrix.len();
    let core_view = UndirectedView::from_edges(
        matrix.ids.clone(),
        (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .filter(|&(i, j)| matrix.get(i, j) >= config.p_th1)
            .map(|(i, j)| (matrix.ids[i].as_str(), matrix.ids[j].as_str(), 1.0))
            .collect::<Vec<_>>(),
    );
    let index: BTreeMap<&str, usize> = matrix
        .ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();
    let core_idx: Vec<Vec<usize>> = core_view
        .components(|_| true)
        .into_iter()
        .filter(|c| c.len() >= 2)
        .map(|c| c.iter().map(|id| index[id.as_str()]).collect())
        .collect();

    let mut extended_idx: Vec<BTreeSet<usize>> = Vec::new();
    let mut strengths: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
    for (c, core) in core_idx.iter().enumerate() {
        let mut ext: BTreeSet<usize> = core.iter().copied().collect();
        for (k, strength) in strengths.iter_mut().enumerate() {
            let best = core
                .iter()
                .filter(|&&i| i != k)
                .map(|&i| matrix.get(i, k))
                .fold(0.0, f64::max);
            if best >= config.p_th2 {
                ext.insert(k);
            }
            if ext.contains(&k) {
                strength.insert(c, best);
            }
        }
        extended_idx.push(ext);
    }

    let in_core: BTreeSet<usize> = core_idx.iter().flatten().copied().collect();
    let nodes = (0..n)
        .map(|k| {
            let communities: Vec<usize> = (0..extended_idx.len())
                .filter(|&c| extended_idx[c].contains(&k))
                .collect();
            let max_other = (0..n)
                .filter(|&j| j != k)
                .map(|j| matrix.get(k, j))
                .fold(0.0, f64::max);
            let status = if in_core.contains(&k) {
                NodeStatus::Core
            } else if !communities.is_empty() {
                NodeStatus::Shared
            } else if max_other <= config.p_th2 {
                NodeStatus::Discarded
            } else {
                NodeStatus::Unaffiliated
            };
            NodeMembership {
                id: matrix.ids[k].clone(),
                status,
                communities,
                strengths: std::mem::take(&mut strengths[k]),
            }
        })
        .collect();
    let to_ids = |s: &BTreeSet<usize>| {
        s.iter()
            .map(|&i| matrix.ids[i].clone())
            .collect::<BTreeSet<String>>()
    };
    CommunityAssignment {
        config: config.clone(),
        cores: core_idx
            .iter()
            .map(|c| to_ids(&c.iter().copied().collect()))
            .collect(),
        extended: extended_idx.iter().map(to_ids).collect(),
        nodes,
        cooccurrence: matrix,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode", content = "threshold")]
pub enum FrequencyFilter {
    /// Mean frequency over all nodes.
    Mean,
    Absolute(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilteredCommunities {
    pub threshold: f64,
    pub kept_nodes: BTreeSet<String>,
    /// `(index into the unfiltered assignment, surviving members)`;
    /// communities left with fewer than two nodes are dropped.
    pub communities: Vec<(usize, BTreeSet<String>)>,
}

/// Nodes with frequency at least the threshold survive.
pub fn frequency_filter(
    assignment: &CommunityAssignment,
    frequencies: &BTreeMap<String, u64>,
    mode: FrequencyFilter,
) -> FilteredCommunities {
    let threshold = match mode {
        FrequencyFilter::Mean if frequencies.is_empty() => 0.0,
        FrequencyFilter::Mean => {
            frequencies.values().sum::<u64>() as f64 / frequencies.len() as f64
        }
        FrequencyFilter::Absolute(t) => t as f64,
    };
    let kept_nodes: BTreeSet<String> = frequencies
        .iter()
        .filter(|(_, &f)| f as f64 >= threshold)
        .map(|(id, _)| id.clone())
        .collect();
    let communities = assignment
        .extended
        .iter()
        .enumerate()
        .map(|(i, c)| {
            (
                i,
                c.intersection(&kept_nodes)
                    .cloned()
                    .collect::<BTreeSet<_>>(),
            )
        })
        .filter(|(_, c)| c.len() >= 2)
        .collect();
    FilteredCommunities {
        threshold,
        kept_nodes,
        communities,
    }
}

pub fn community_name(index: usize) -> String {
    format!("C{}", index + 1)
}

/// Node id to `;`-joined community names.
pub fn community_tags<'a>(
    communities: impl IntoIterator<Item = (usize, &'a BTreeSet<String>)>,
) -> BTreeMap<String, String> {
    let mut tags: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for (i, members) in communities {
        for m in members {
            tags.entry(m.clone()).or_default().push(community_name(i));
        }
    }
    tags.into_iter().map(|(k, v)| (k, v.join(";"))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityGraphs {
    pub per_community: Vec<(String, NarrativeNetwork)>,
    /// Union of all community subgraphs.
    pub union: NarrativeNetwork,
    pub tags: BTreeMap<String, String>,
}

pub fn community_subgraphs<'a>(
    communities: impl IntoIterator<Item = (usize, &'a BTreeSet<String>)>,
    net: &NarrativeNetwork,
) -> CommunityGraphs {
    let communities: Vec<(usize, &BTreeSet<String>)> = communities.into_iter().collect();
    let per_community = communities
        .iter()
        .map(|(i, members)| (community_name(*i), net.induced(members)))
        .collect();
    let all: BTreeSet<String> = communities
        .iter()
        .flat_map(|(_, m)| m.iter().cloned())
        .collect();
    let mut union = net.induced(&all);
    // only edges inside at least one community belong to the union
    union.edges.retain(|e| {
        communities
            .iter()
            .any(|(_, m)| m.contains(&e.source) && m.contains(&e.target))
    });
    union.observed_pairs = union.edges.len();
    CommunityGraphs {
        per_community,
        union,
        tags: community_tags(communities),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub at_least_20: usize,
}

pub fn size_summary<'a>(
    communities: impl IntoIterator<Item = &'a BTreeSet<String>>,
) -> SizeSummary {
    let mut sizes: Vec<usize> = communities.into_iter().map(|c| c.len()).collect();
    sizes.sort_unstable();
    let count = sizes.len();
    let (mean, median) = if count == 0 {
        (0.0, 0.0)
    } else {
        let mean = sizes.iter().sum::<usize>() as f64 / count as f64;
        let median = if count % 2 == 1 {
            sizes[count / 2] as f64
        } else {
            (sizes[count / 2 - 1] + sizes[count / 2]) as f64 / 2.0
        };
        (mean, median)
    };
    SizeSummary {
        count,
        mean,
        median,
        at_least_20: sizes.iter().filter(|&&s| s >= 20).count(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::fixtures::graph;

    fn cliques_with_bridge(bridge: bool) -> NarrativeNetwork {
        let ids = ["a1", "a2", "a3", "a4", "b1", "b2", "b3", "b4", "m"];
        let mut pairs = Vec::new();
        for group in [&ids[..4], &ids[4..8]] {
            for i in 0..4 {
                for j in (i + 1)..4 {
                    pairs.push((group[i], group[j]));
                }
            }
        }
        if bridge {
            pairs.push(("a1", "m"));
            pairs.push(("m", "b1"));
            graph(&ids, &pairs)
        } else {
            pairs.push(("a1", "b1"));
            graph(&ids[..8], &pairs)
        }
    }

    fn best_two_partition(view: &UndirectedView) -> f64 {
        let n = view.len();
        (0..(1u32 << (n - 1)))
            .map(|mask| {
                let labels: Vec<usize> = (0..n).map(|i| ((mask >> i) & 1) as usize).collect();
                modularity(view, &labels)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn two_cliques_one_edge() {
        let net = cliques_with_bridge(false);
        let view = UndirectedView::new(&net);
        let best = best_two_partition(&view);
        for seed in 0..20 {
            let labels = louvain(&view, seed);
            assert!(labels[..4].iter().all(|&l| l == labels[0]));
            assert!(labels[4..].iter().all(|&l| l == labels[4]));
            assert_ne!(labels[0], labels[4]);
            assert!((modularity(&view, &labels) - best).abs() < 1e-12);
        }
    }

    #[test]
    fn complete_graph_single_community() {
        let ids = ["a", "b", "c", "d", "e"];
        let mut pairs = Vec::new();
        for i in 0..5 {
            for j in (i + 1)..5 {
                pairs.push((ids[i], ids[j]));
            }
        }
        let view = UndirectedView::new(&graph(&ids, &pairs));
        for seed in 0..10 {
            assert!(louvain(&view, seed).iter().all(|&l| l == 0));
        }
    }

    #[test]
    fn disconnected_parts_never_share() {
        let g = graph(
            &["a", "b", "c", "x", "y", "z"],
            &[("a", "b"), ("b", "c"), ("x", "y"), ("y", "z")],
        );
        let view = UndirectedView::new(&g);
        for seed in 0..20 {
            let l = louvain(&view, seed);
            assert!(l[..3].iter().all(|x| !l[3..].contains(x)));
        }
    }

    #[test]
    fn edgeless_graph() {
        let view = UndirectedView::new(&graph(&["a", "b"], &[]));
        assert_eq!(louvain(&view, 1), vec![0, 1]);
    }

    #[test]
    fn stable_cliques_give_binary_matrix() {
        let net = cliques_with_bridge(false);
        let cfg = ConsensusConfig::default();
        let a = consensus_communities(&net, &cfg).unwrap();
        let m = &a.cooccurrence;
        for i in 0..m.len() {
            for j in 0..m.len() {
                assert!(m.counts[i][j] == 0 || m.counts[i][j] == cfg.t_max);
            }
        }
        assert_eq!(a.cores.len(), 2);
        assert_eq!(a.cores, a.extended);
        assert!(a.nodes.iter().all(|n| n.status == NodeStatus::Core));
    }

    #[test]
    fn bridge_node_is_shared() {
        let net = cliques_with_bridge(true);
        let cfg = ConsensusConfig {
            t_max: 500,
            ..Default::default()
        };
        let a = consensus_communities(&net, &cfg).unwrap();
        assert_eq!(a.cores.len(), 2);
        let m = a.nodes.iter().find(|n| n.id == "m").unwrap();
        assert_eq!(m.status, NodeStatus::Shared);
        assert_eq!(m.communities, vec![0, 1]);
        for (c, e) in a.cores.iter().zip(&a.extended) {
            assert!(!c.contains("m"));
            assert!(e.contains("m"));
        }
    }

    #[test]
    fn bad_thresholds() {
        let net = cliques_with_bridge(false);
        for (p1, p2) in [(0.4, 0.4), (0.4, 0.7), (1.2, 0.4), (0.7, 0.0)] {
            let cfg = ConsensusConfig {
                p_th1: p1,
                p_th2: p2,
                ..Default::default()
            };
            assert!(matches!(
                consensus_communities(&net, &cfg),
                Err(CommunityError::Thresholds { .. })
            ));
        }
        let cfg = ConsensusConfig {
            t_max: 0,
            ..Default::default()
        };
        assert_eq!(
            consensus_communities(&net, &cfg),
            Err(CommunityError::NoRuns)
        );
    }

    #[test]
    fn discarded_versus_unaffiliated() {
        // x pairs with y half the time, z never pairs with anyone
        let ids: Vec<String> = ["a", "b", "x", "y", "z"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let runs = vec![vec![0, 0, 1, 1, 2], vec![0, 0, 1, 3, 2]];
        let a = assign_from_matrix(
            CooccurrenceMatrix::accumulate(ids, &runs),
            &ConsensusConfig::default(),
        );
        let status: Vec<NodeStatus> = a.nodes.iter().map(|n| n.status).collect();
        assert_eq!(
            status,
            vec![
                NodeStatus::Core,
                NodeStatus::Core,
                NodeStatus::Unaffiliated,
                NodeStatus::Unaffiliated,
                NodeStatus::Discarded
            ]
        );
    }

    #[test]
    fn mean_filter_arithmetic() {
        let a = assign_from_matrix(
            CooccurrenceMatrix::accumulate(
                vec!["p".into(), "q".into(), "r".into()],
                &[vec![0, 0, 0]],
            ),
            &ConsensusConfig::default(),
        );
        let freqs: BTreeMap<String, u64> = [("p", 300), ("q", 10), ("r", 10)]
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect();
        let f = frequency_filter(&a, &freqs, FrequencyFilter::Mean);
        assert!((f.threshold - 320.0 / 3.0).abs() < 1e-12);
        assert_eq!(f.kept_nodes, BTreeSet::from(["p".to_string()]));
        assert!(f.communities.is_empty());
        let uniform: BTreeMap<String, u64> = freqs.keys().map(|k| (k.clone(), 7)).collect();
        let f = frequency_filter(&a, &uniform, FrequencyFilter::Mean);
        assert_eq!(f.kept_nodes.len(), 3);
        assert_eq!(f.communities.len(), 1);
        let f = frequency_filter(&a, &freqs, FrequencyFilter::Absolute(10));
        assert_eq!(f.kept_nodes.len(), 3);
    }

    #[test]
    fn subgraphs_share_bridge() {
        let net = cliques_with_bridge(true);
        let cfg = ConsensusConfig {
            t_max: 200,
            ..Default::default()
        };
        let a = consensus_communities(&net, &cfg).unwrap();
        let g = community_subgraphs(a.extended.iter().enumerate(), &net);
        assert_eq!(g.per_community.len(), 2);
        for (_, sub) in &g.per_community {
            assert!(sub.node("m").is_some());
            assert_eq!(sub.nodes.len(), 5);
        }
        assert_eq!(g.tags["m"], "C1;C2");
        assert_eq!(g.union.nodes.len(), 9);

        let whole: BTreeSet<String> = net.nodes.iter().map(|n| n.id.clone()).collect();
        let g = community_subgraphs([(0, &whole)], &net);
        assert_eq!(g.union, net);
    }

    #[test]
    fn sizes() {
        let cs: Vec<BTreeSet<String>> = [3usize, 1, 25, 4]
            .iter()
            .map(|&n| (0..n).map(|i| i.to_string()).collect())
            .collect();
        let s = size_summary(&cs);
        assert_eq!(s.count, 4);
        assert_eq!(s.median, 3.5);
        assert_eq!(s.mean, 8.25);
        assert_eq!(s.at_least_20, 1);
    }
}
