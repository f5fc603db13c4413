//! The narrative multigraph: actant nodes, directed relationship edges
//! labeled by their most significant verbs, and the read-only analyses run
//! on it (summary statistics, keystone decomposition, ego and power
//! projections, first mentions).

use crate::interchange::ExtractionTuple;
use crate::significance::{stem_verb, ScoredContext, VerbScore};
use crate::subnode::Subnode;
use crate::supernode::Supernode;
use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NetworkError {
    #[error("unknown node {0:?}")]
    UnknownNode(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkNode {
    pub id: String,
    pub label: String,
    /// Parent supernode for subnode-level graphs.
    pub group: Option<String>,
    pub frequency: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkEdge {
    pub source: String,
    pub target: String,
    /// Admitted tuples with `source` in arg1 and `target` in arg2.
    pub weight: u64,
    /// Best verbs of the pair's context, highest score first.
    pub verbs: Vec<VerbScore>,
}

impl NetworkEdge {
    pub fn top_verb(&self) -> Option<&str> {
        self.verbs.first().map(|v| v.verb.as_str())
    }

    pub fn is_self_loop(&self) -> bool {
        self.source == self.target
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupernodeGroup {
    pub id: String,
    pub name: String,
    pub children: Vec<String>,
    pub frequency: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NarrativeNetwork {
    pub nodes: Vec<NetworkNode>,
    pub supernodes: Vec<SupernodeGroup>,
    pub edges: Vec<NetworkEdge>,
    /// Directed node pairs linked by at least one tuple, before the weight
    /// cut-off.
    pub observed_pairs: usize,
}

/// Phrase id to the actant nodes containing it.
#[derive(Debug, Clone, Default)]
pub struct ActantMap {
    by_phrase: HashMap<String, Vec<String>>,
}

impl ActantMap {
    pub fn from_subnodes(subnodes: &[Subnode]) -> Self {
        let mut by_phrase: HashMap<String, Vec<String>> = HashMap::new();
        for s in subnodes {
            for p in &s.member_phrases {
                by_phrase.entry(p.clone()).or_default().push(s.id.clone());
            }
        }
        ActantMap { by_phrase }
    }

    pub fn from_supernodes(supernodes: &[Supernode]) -> Self {
        let mut by_phrase: HashMap<String, Vec<String>> = HashMap::new();
        for s in supernodes {
            for p in &s.member_phrases {
                by_phrase.entry(p.clone()).or_default().push(s.id.clone());
            }
        }
        ActantMap { by_phrase }
    }

    pub fn actants(&self, phrase_id: &str) -> &[String] {
        self.by_phrase.get(phrase_id).map_or(&[], |v| v.as_slice())
    }
}

pub fn subnode_nodes(subnodes: &[Subnode]) -> Vec<NetworkNode> {
    subnodes
        .iter()
        .map(|s| NetworkNode {
            id: s.id.clone(),
            label: s.name(),
            group: Some(s.parent_supernode.clone()),
            frequency: s.frequency,
        })
        .collect()
}

pub fn supernode_nodes(supernodes: &[Supernode]) -> Vec<NetworkNode> {
    supernodes
        .iter()
        .map(|s| NetworkNode {
            id: s.id.clone(),
            label: s.name(),
            group: None,
            frequency: s.frequency,
        })
        .collect()
}

pub fn supernode_groups(supernodes: &[Supernode], subnodes: &[Subnode]) -> Vec<SupernodeGroup> {
    supernodes
        .iter()
        .map(|s| SupernodeGroup {
            id: s.id.clone(),
            name: s.name(),
            children: subnodes
                .iter()
                .filter(|c| c.parent_supernode == s.id)
                .map(|c| c.id.clone())
                .collect(),
            frequency: s.frequency,
        })
        .collect()
}

/// Directed edges between the given nodes. A pair becomes an edge when at
/// least `min_weight` tuples link it; its verbs come from the scored context
/// of the unordered pair.
pub fn assemble(
    tuples: &[ExtractionTuple],
    nodes: Vec<NetworkNode>,
    supernodes: Vec<SupernodeGroup>,
    map: &ActantMap,
    contexts: &[ScoredContext],
    min_weight: u64,
) -> NarrativeNetwork {
    let known: BTreeSet<&str> = nodes.iter().map(|n| n.id.as_str()).collect();
    let mut weights: BTreeMap<(String, String), u64> = BTreeMap::new();
    for t in tuples {
        for a in map.actants(&t.arg1.id) {
            for b in map.actants(&t.arg2.id) {
                if known.contains(a.as_str()) && known.contains(b.as_str()) {
                    *weights.entry((a.clone(), b.clone())).or_default() += 1;
                }
            }
        }
    }
    let verbs: HashMap<(&str, &str), &Vec<VerbScore>> = contexts
        .iter()
        .map(|c| ((c.actant_a.as_str(), c.actant_b.as_str()), &c.verbs))
        .collect();
    let observed_pairs = weights.len();
    let edges = weights
        .into_iter()
        .filter(|(_, w)| *w >= min_weight.max(1))
        .map(|((source, target), weight)| {
            let key = if source <= target {
                (source.as_str(), target.as_str())
            } else {
                (target.as_str(), source.as_str())
            };
            let verbs = verbs.get(&key).map(|v| (*v).clone()).unwrap_or_default();
            NetworkEdge {
                source,
                target,
                weight,
                verbs,
            }
        })
        .collect();
    NarrativeNetwork {
        nodes,
        supernodes,
        edges,
        observed_pairs,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkStats {
    pub n_supernodes: usize,
    pub n_subnodes: usize,
    pub n_rel_extractions: usize,
    pub n_labeled_rel: usize,
    /// `2 * |undirected edges| / |nodes|`, self-loops excluded.
    pub avg_degree_exact: f64,
    pub avg_degree: u64,
}

impl NarrativeNetwork {
    pub fn node(&self, id: &str) -> Option<&NetworkNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn stats(&self) -> NetworkStats {
        let view = UndirectedView::new(self);
        let exact = if self.nodes.is_empty() {
            0.0
        } else {
            2.0 * view.edge_count() as f64 / self.nodes.len() as f64
        };
        NetworkStats {
            n_supernodes: self.supernodes.len(),
            n_subnodes: self.nodes.len(),
            n_rel_extractions: self.observed_pairs,
            n_labeled_rel: self.edges.iter().filter(|e| !e.verbs.is_empty()).count(),
            avg_degree_exact: exact,
            avg_degree: exact.round() as u64,
        }
    }

    /// Subgraph induced by `keep`, edges and labels unchanged.
    pub fn induced(&self, keep: &BTreeSet<String>) -> NarrativeNetwork {
        let nodes: Vec<NetworkNode> = self
            .nodes
            .iter()
            .filter(|n| keep.contains(&n.id))
            .cloned()
            .collect();
        let edges: Vec<NetworkEdge> = self
            .edges
            .iter()
            .filter(|e| keep.contains(&e.source) && keep.contains(&e.target))
            .cloned()
            .collect();
        let supernodes = self
            .supernodes
            .iter()
            .filter_map(|g| {
                let children: Vec<String> = g
                    .children
                    .iter()
                    .filter(|c| keep.contains(*c))
                    .cloned()
                    .collect();
                (!children.is_empty() || keep.contains(&g.id)).then(|| SupernodeGroup {
                    children,
                    ..g.clone()
                })
            })
            .collect();
        let observed_pairs = edges.len();
        NarrativeNetwork {
            nodes,
            supernodes,
            edges,
            observed_pairs,
        }
    }

    /// Supernode-level graph: subnode edges summed per supernode pair, each
    /// labeled with its single highest-scoring verb.
    pub fn collapse_to_supernodes(&self) -> NarrativeNetwork {
        let parent: HashMap<&str, &str> = self
            .nodes
            .iter()
            .filter_map(|n| n.group.as_deref().map(|g| (n.id.as_str(), g)))
            .collect();
        let mut merged: BTreeMap<(String, String), (u64, Option<VerbScore>)> = BTreeMap::new();
        for e in &self.edges {
            let (Some(a), Some(b)) = (parent.get(e.source.as_str()), parent.get(e.target.as_str()))
            else {
                continue;
            };
            let entry = merged.entry((a.to_string(), b.to_string())).or_default();
            entry.0 += e.weight;
            for v in &e.verbs {
                let better = match &entry.1 {
                    None => true,
                    Some(cur) => v.score > cur.score || (v.score == cur.score && v.verb < cur.verb),
                };
                if better {
                    entry.1 = Some(v.clone());
                }
            }
        }
        let nodes = self
            .supernodes
            .iter()
            .map(|g| NetworkNode {
                id: g.id.clone(),
                label: g.name.clone(),
                group: None,
                frequency: g.frequency,
            })
            .collect();
        let edges: Vec<NetworkEdge> = merged
            .into_iter()
            .map(|((source, target), (weight, verb))| NetworkEdge {
                source,
                target,
                weight,
                verbs: verb.into_iter().collect(),
            })
            .collect();
        NarrativeNetwork {
            nodes,
            supernodes: Vec::new(),
            observed_pairs: edges.len(),
            edges,
        }
    }
}

/// Symmetric weighted adjacency over the nodes of a network, self-loops
/// dropped, both edge directions summed.
#[derive(Debug, Clone)]
pub struct UndirectedView {
    pub ids: Vec<String>,
    pub adjacency: Vec<BTreeMap<usize, f64>>,
}

impl UndirectedView {
    pub fn new(net: &NarrativeNetwork) -> Self {
        let ids: Vec<String> = net.nodes.iter().map(|n| n.id.clone()).collect();
        let edges = net
            .edges
            .iter()
            .map(|e| (e.source.as_str(), e.target.as_str(), e.weight as f64));
        Self::from_edges(ids, edges)
    }

    pub fn from_edges<'a, I>(ids: Vec<String>, edges: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a str, f64)>,
    {
        let index: HashMap<&str, usize> = ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect();
        let mut adjacency = vec![BTreeMap::new(); ids.len()];
        for (a, b, w) in edges {
            let (Some(&i), Some(&j)) = (index.get(a), index.get(b)) else {
                continue;
            };
            if i == j {
                continue;
            }
            *adjacency[i].entry(j).or_insert(0.0) += w;
            *adjacency[j].entry(i).or_insert(0.0) += w;
        }
        UndirectedView { ids, adjacency }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|a| a.len()).sum::<usize>() / 2
    }

    /// Connected components over nodes where `alive` holds, each sorted by
    /// id; components ordered by size desc, then first id.
    pub fn components(&self, alive: impl Fn(usize) -> bool) -> Vec<Vec<String>> {
        let mut seen = vec![false; self.len()];
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen[start] || !alive(start) {
                continue;
            }
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            let mut comp = Vec::new();
            while let Some(u) = queue.pop_front() {
                comp.push(self.ids[u].clone());
                for &v in self.adjacency[u].keys() {
                    if !seen[v] && alive(v) {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            comp.sort();
            out.push(comp);
        }
        out.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        out
    }
}

/// Components left after deleting a supernode: its own node in a
/// supernode-level graph, or all of its subnodes.
pub fn keystone_decomposition(
    net: &NarrativeNetwork,
    supernode: &str,
) -> Result<Vec<Vec<String>>, NetworkError> {
    let removed: Vec<bool> = net
        .nodes
        .iter()
        .map(|n| n.id == supernode || n.group.as_deref() == Some(supernode))
        .collect();
    if !removed.iter().any(|&r| r) {
        return Err(NetworkError::UnknownNode(supernode.to_string()));
    }
    Ok(UndirectedView::new(net).components(|i| !removed[i]))
}

pub fn components(net: &NarrativeNetwork) -> Vec<Vec<String>> {
    UndirectedView::new(net).components(|_| true)
}

/// The node, its direct neighbors in either direction, and every edge among
/// them.
pub fn ego_network(net: &NarrativeNetwork, id: &str) -> Result<NarrativeNetwork, NetworkError> {
    if net.node(id).is_none() {
        return Err(NetworkError::UnknownNode(id.to_string()));
    }
    let mut keep = BTreeSet::from([id.to_string()]);
    for e in &net.edges {
        if e.source == id {
            keep.insert(e.target.clone());
        } else if e.target == id {
            keep.insert(e.source.clone());
        }
    }
    Ok(net.induced(&keep))
}

/// Verbs treated as professional or personal ties.
pub const DEFAULT_POWER_VERBS: &[&str] = &[
    "is",
    "chair",
    "manage",
    "own",
    "work",
    "appoint",
    "hire",
    "marry",
    "brother",
    "sister",
    "employ",
    "lead",
    "direct",
    "head",
    "serve",
    "advise",
    "represent",
    "found",
];

/// Roster-induced subgraph keeping only edges whose top verb is in
/// `verbs` (compared after stemming).
pub fn power_network(
    net: &NarrativeNetwork,
    roster: &BTreeSet<String>,
    verbs: &[&str],
) -> NarrativeNetwork {
    let allowed: BTreeSet<String> = verbs.iter().map(|v| stem_verb(v)).collect();
    let mut sub = net.induced(roster);
    sub.edges
        .retain(|e| e.top_verb().is_some_and(|v| allowed.contains(v)));
    sub.observed_pairs = sub.edges.len();
    sub
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FirstMention {
    pub entity: String,
    pub date: NaiveDate,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MentionSeries {
    /// Chronological, ties by entity.
    pub series: Vec<FirstMention>,
    /// Tuples without a timestamp that mention a tracked entity.
    pub undated: usize,
}

impl MentionSeries {
    /// Number of entities introduced on or before each listed date.
    pub fn cumulative(&self) -> Vec<(NaiveDate, usize)> {
        let mut out: Vec<(NaiveDate, usize)> = Vec::new();
        for (i, m) in self.series.iter().enumerate() {
            match out.last_mut() {
                Some(last) if last.0 == m.date => last.1 = i + 1,
                _ => out.push((m.date, i + 1)),
            }
        }
        out
    }
}

/// Earliest dated tuple for each entity. `entities` maps an entity name to
/// its member phrase ids.
pub fn first_mention_series(
    tuples: &[ExtractionTuple],
    entities: &BTreeMap<String, BTreeSet<String>>,
) -> MentionSeries {
    let mut first: BTreeMap<&str, NaiveDate> = BTreeMap::new();
    let mut undated = 0;
    for t in tuples {
        for (name, members) in entities {
            if !members.contains(&t.arg1.id) && !members.contains(&t.arg2.id) {
                continue;
            }
            match t.timestamp {
                Some(d) => {
                    let e = first.entry(name.as_str()).or_insert(d);
                    if d < *e {
                        *e = d;
                    }
                }
                None => undated += 1,
            }
        }
    }
    if first.is_empty() {
        log::warn!("no timestamped tuples mention the tracked entities");
    }
    let mut series: Vec<FirstMention> = first
        .into_iter()
        .map(|(e, date)| FirstMention {
            entity: e.to_string(),
            date,
        })
        .collect();
    series.sort_by(|a, b| a.date.cmp(&b.date).then_with(|| a.entity.cmp(&b.entity)));
    MentionSeries { series, undated }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub fn node(id: &str, group: Option<&str>) -> NetworkNode {
        NetworkNode {
            id: id.into(),
            label: id.into(),
            group: group.map(String::from),
            frequency: 1,
        }
    }

    pub fn edge(a: &str, b: &str, verb: Option<&str>) -> NetworkEdge {
        NetworkEdge {
            source: a.into(),
            target: b.into(),
            weight: 2,
            verbs: verb
                .map(|v| VerbScore {
                    verb: v.into(),
                    count_in_context: 2,
                    count_in_corpus: 4,
                    p_pair: 0.5,
                    p_corpus: 0.1,
                    kl: 5f64.ln(),
                    score: 5f64.ln(),
                })
                .into_iter()
                .collect(),
        }
    }

    /// Undirected simple graph on ids with no grouping.
    pub fn graph(ids: &[&str], pairs: &[(&str, &str)]) -> NarrativeNetwork {
        NarrativeNetwork {
            nodes: ids.iter().map(|i| node(i, None)).collect(),
            supernodes: Vec::new(),
            edges: pairs
                .iter()
                .map(|(a, b)| edge(a, b, Some("link")))
                .collect(),
            observed_pairs: pairs.len(),
        }
    }
}
