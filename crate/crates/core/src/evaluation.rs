//! Comparison of a recovered network with a hand-built reference graph.
//!
//! Actants are matched by label words, relationships by the best cosine
//! between the reference phrase and the verbs recovered between the two
//! matched endpoints.

use crate::embedding::{cosine, EmbeddingError, EmbeddingStore};
use crate::network::NarrativeNetwork;
use crate::text;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

pub const DEFAULT_TAU: f64 = 0.85;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("cannot read gold graph {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed gold graph: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid gold graph: {0}")]
    Invalid(String),
    #[error("tau must lie in (0, 1], got {0}")]
    Tau(f64),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldNode {
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldEdge {
    pub src: String,
    pub dst: String,
    pub relationship: String,
}

/// Reference graph file: `{"nodes":[{"label":..}], "edges":[{"src":..,
/// "dst":.., "relationship":..}], "provenance":".."}`. Edge endpoints name
/// node labels.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldGraph {
    pub nodes: Vec<GoldNode>,
    pub edges: Vec<GoldEdge>,
    #[serde(default)]
    pub provenance: String,
}

impl GoldGraph {
    pub fn load(path: &Path) -> Result<Self, EvalError> {
        let text = std::fs::read_to_string(path).map_err(|source| EvalError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let g: GoldGraph = serde_json::from_str(&text)?;
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        let mut seen = BTreeSet::new();
        for n in &self.nodes {
            let key = text::normalize(&n.label);
            if key.is_empty() {
                return Err(EvalError::Invalid("empty node label".into()));
            }
            if !seen.insert(key) {
                return Err(EvalError::Invalid(format!(
                    "duplicate node label {:?}",
                    n.label
                )));
            }
        }
        for e in &self.edges {
            for end in [&e.src, &e.dst] {
                if !seen.contains(&text::normalize(end)) {
                    return Err(EvalError::Invalid(format!(
                        "edge endpoint {end:?} is not a node"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A reference graph copied from a recovered network: one node per distinct
/// node label, one edge per recovered verb.
pub fn gold_from_network(net: &NarrativeNetwork, provenance: &str) -> GoldGraph {
    let labels: BTreeMap<&str, String> = net
        .nodes
        .iter()
        .map(|n| (n.id.as_str(), text::normalize(&n.label)))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let nodes: BTreeSet<&String> = labels.values().collect();
    let mut edges = BTreeSet::new();
    for e in &net.edges {
        let (Some(a), Some(b)) = (labels.get(e.source.as_str()), labels.get(e.target.as_str()))
        else {
            continue;
        };
        for v in &e.verbs {
            edges.insert((a.clone(), b.clone(), v.verb.clone()));
        }
    }
    GoldGraph {
        nodes: nodes
            .into_iter()
            .map(|l| GoldNode { label: l.clone() })
            .collect(),
        edges: edges
            .into_iter()
            .map(|(src, dst, relationship)| GoldEdge {
                src,
                dst,
                relationship,
            })
            .collect(),
        provenance: provenance.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchMode {
    Exact,
    Stem,
    Substring,
}

impl MatchMode {
    fn words_match(self, gold: &str, found: &str) -> bool {
        match self {
            MatchMode::Exact => gold == found,
            MatchMode::Stem => text::stem(gold) == text::stem(found),
            MatchMode::Substring => found.contains(gold) || gold.contains(found),
        }
    }
}

/// The words a recovered node can be matched by: its label words and the
/// seeds of its supernode.
fn node_words(net: &NarrativeNetwork) -> Vec<BTreeSet<String>> {
    let seeds: BTreeMap<&str, Vec<String>> = net
        .supernodes
        .iter()
        .map(|g| {
            (
                g.id.as_str(),
                g.name.split('/').flat_map(text::tokens).collect(),
            )
        })
        .collect();
    net.nodes
        .iter()
        .map(|n| {
            let mut w: BTreeSet<String> = text::tokens(&n.label).into_iter().collect();
            if let Some(s) = n.group.as_deref().and_then(|g| seeds.get(g)) {
                w.extend(s.iter().cloned());
            }
            w
        })
        .collect()
}

/// Indices of the nodes a gold label refers to. Nodes whose whole label
/// equals the gold label win; otherwise every node carrying all of the
/// gold label's content words matches.
fn resolve(
    label: &str,
    net: &NarrativeNetwork,
    words: &[BTreeSet<String>],
    mode: MatchMode,
) -> Vec<usize> {
    let key = text::normalize(label);
    let exact: Vec<usize> = (0..net.nodes.len())
        .filter(|&i| text::normalize(&net.nodes[i].label) == key)
        .collect();
    if !exact.is_empty() {
        return exact;
    }
    let toks = text::tokens(label);
    let content: Vec<&String> = toks.iter().filter(|t| !text::is_stopword(t)).collect();
    let wanted: Vec<&String> = if content.is_empty() {
        toks.iter().collect()
    } else {
        content
    };
    if wanted.is_empty() {
        return Vec::new();
    }
    (0..net.nodes.len())
        .filter(|&i| {
            wanted
                .iter()
                .all(|g| words[i].iter().any(|w| mode.words_match(g, w)))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActantReport {
    pub gold_count: usize,
    pub discovered: usize,
    pub matched_at_threshold: usize,
    pub matched_anywhere: usize,
    pub missed: Vec<String>,
    /// Discovered nodes no gold actant refers to.
    pub extras: usize,
    /// Gold label to matching node ids.
    pub matches: BTreeMap<String, Vec<String>>,
}

impl ActantReport {
    pub fn match_rate(&self) -> f64 {
        if self.gold_count == 0 {
            1.0
        } else {
            self.matched_anywhere as f64 / self.gold_count as f64
        }
    }
}

pub fn match_actants(
    net: &NarrativeNetwork,
    gold: &GoldGraph,
    freq_threshold: u64,
    mode: MatchMode,
) -> ActantReport {
    let words = node_words(net);
    let mut matches = BTreeMap::new();
    let mut missed = Vec::new();
    let mut at_threshold = 0;
    let mut used = BTreeSet::new();
    for g in &gold.nodes {
        let found = resolve(&g.label, net, &words, mode);
        if found.is_empty() {
            missed.push(g.label.clone());
            continue;
        }
        if found
            .iter()
            .any(|&i| net.nodes[i].frequency >= freq_threshold)
        {
            at_threshold += 1;
        }
        used.extend(found.iter().copied());
        matches.insert(
            g.label.clone(),
            found.iter().map(|&i| net.nodes[i].id.clone()).collect(),
        );
    }
    ActantReport {
        gold_count: gold.nodes.len(),
        discovered: net.nodes.len(),
        matched_at_threshold: at_threshold,
        matched_anywhere: matches.len(),
        missed,
        extras: net.nodes.len() - used.len(),
        matches,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeMatch {
    pub src: String,
    pub dst: String,
    pub relationship: String,
    pub endpoints_found: bool,
    pub best_candidate: Option<String>,
    pub cosine: Option<f64>,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationshipReport {
    pub tau: f64,
    pub gold_edges: usize,
    pub matched: usize,
    pub recall: f64,
    pub mean_cosine: f64,
    /// Population standard deviation of matched cosines.
    pub std_cosine: f64,
    /// Gold edges with an endpoint that matched no recovered node; they
    /// count as misses.
    pub unmatched_endpoints: usize,
    pub details: Vec<EdgeMatch>,
}

pub fn match_relationships(
    net: &NarrativeNetwork,
    gold: &GoldGraph,
    store: &EmbeddingStore,
    tau: f64,
    mode: MatchMode,
) -> Result<RelationshipReport, EvalError> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(EvalError::Tau(tau));
    }
    let words = node_words(net);
    let mut details = Vec::new();
    let mut cosines = Vec::new();
    let mut unmatched_endpoints = 0;
    for g in &gold.edges {
        let src: BTreeSet<&str> = resolve(&g.src, net, &words, mode)
            .into_iter()
            .map(|i| net.nodes[i].id.as_str())
            .collect();
        let dst: BTreeSet<&str> = resolve(&g.dst, net, &words, mode)
            .into_iter()
            .map(|i| net.nodes[i].id.as_str())
            .collect();
        let endpoints_found = !src.is_empty() && !dst.is_empty();
        if !endpoints_found {
            unmatched_endpoints += 1;
        }
        let candidates: BTreeSet<&str> = net
            .edges
            .iter()
            .filter(|e| {
                (src.contains(e.source.as_str()) && dst.contains(e.target.as_str()))
                    || (dst.contains(e.source.as_str()) && src.contains(e.target.as_str()))
            })
            .flat_map(|e| e.verbs.iter().map(|v| v.verb.as_str()))
            .collect();
        let mut best: Option<(&str, f64)> = None;
        if !candidates.is_empty() {
            let gold_vec = store.embed_text(&g.relationship)?;
            // candidates iterate in lexicographic order, so strict `>` keeps
            // the smallest phrase among equal cosines
            for c in candidates {
                let s = cosine(&gold_vec, &store.embed_text(c)?)?;
                if best.is_none_or(|(_, b)| s > b) {
                    best = Some((c, s));
                }
            }
        }
        let matched = best.is_some_and(|(_, s)| s >= tau);
        if let (true, Some((_, s))) = (matched, best) {
            cosines.push(s);
        }
        details.push(EdgeMatch {
            src: g.src.clone(),
            dst: g.dst.clone(),
            relationship: g.relationship.clone(),
            endpoints_found,
            best_candidate: best.map(|(c, _)| c.to_string()),
            cosine: best.map(|(_, s)| s),
            matched,
        });
    }
    // sorted before summing so the result does not depend on edge order
    cosines.sort_by(f64::total_cmp);
    let matched = cosines.len();
    let (mean, std) = if matched == 0 {
        (0.0, 0.0)
    } else {
        let mean = cosines.iter().sum::<f64>() / matched as f64;
        let var = cosines.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / matched as f64;
        (mean, var.sqrt())
    };
    Ok(RelationshipReport {
        tau,
        gold_edges: gold.edges.len(),
        matched,
        recall: if gold.edges.is_empty() {
            0.0
        } else {
            matched as f64 / gold.edges.len() as f64
        },
        mean_cosine: mean,
        std_cosine: std,
        unmatched_endpoints,
        details,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub actants: ActantReport,
    pub relationships: RelationshipReport,
}

pub fn evaluate(
    net: &NarrativeNetwork,
    gold: &GoldGraph,
    store: &EmbeddingStore,
    tau: f64,
    freq_threshold: u64,
    mode: MatchMode,
) -> Result<MatchReport, EvalError> {
    Ok(MatchReport {
        actants: match_actants(net, gold, freq_threshold, mode),
        relationships: match_relationships(net, gold, store, tau, mode)?,
    })
}

/// Plain-text summary: one actant table and one relationship table.
pub fn report_table(r: &MatchReport, freq_threshold: u64) -> String {
    let a = &r.actants;
    let rel = &r.relationships;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "actants\tgold\tmatched (freq >= {freq_threshold})\tmatched (any)\tdiscovered\textra"
    );
    let _ = writeln!(
        out,
        "\t{}\t{}\t{}\t{}\t{}",
        a.gold_count, a.matched_at_threshold, a.matched_anywhere, a.discovered, a.extras
    );
    if !a.missed.is_empty() {
        let _ = writeln!(out, "missed\t{}", a.missed.join(", "));
    }
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "relationships\tgold edges\tmatched\trecall\tmean cosine\tstd cosine\tunmatched endpoints"
    );
    let _ = writeln!(
        out,
        "tau={}\t{}\t{}\t{:.3}\t{:.3}\t{:.4}\t{}",
        rel.tau,
        rel.gold_edges,
        rel.matched,
        rel.recall,
        rel.mean_cosine,
        rel.std_cosine,
        rel.unmatched_endpoints
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::fixtures::{edge, graph, node};
    use crate::network::SupernodeGroup;

    fn net() -> NarrativeNetwork {
        let mut g = graph(&["police", "pizzeria", "hillary"], &[]);
        g.edges.push(edge("police", "pizzeria", Some("arrest")));
        g.edges.push(edge("police", "pizzeria", Some("meet")));
        g.nodes[2].frequency = 100;
        g
    }

    fn gold(edges: &[(&str, &str, &str)]) -> GoldGraph {
        GoldGraph {
            nodes: ["police", "pizzeria", "hillary"]
                .iter()
                .map(|l| GoldNode {
                    label: l.to_string(),
                })
                .collect(),
            edges: edges
                .iter()
                .map(|(s, d, r)| GoldEdge {
                    src: s.to_string(),
                    dst: d.to_string(),
                    relationship: r.to_string(),
                })
                .collect(),
            provenance: String::new(),
        }
    }

    #[test]
    fn arrested_maps_to_arrest() {
        let store = EmbeddingStore::deterministic(64);
        let g = gold(&[("police", "pizzeria", "arrested")]);
        let r = match_relationships(&net(), &g, &store, DEFAULT_TAU, MatchMode::Stem).unwrap();
        // oracle: both candidates scored by hand
        let gv = store.embed_text("arrested").unwrap();
        let c1 = cosine(&gv, &store.embed_text("arrest").unwrap()).unwrap();
        let c2 = cosine(&gv, &store.embed_text("meet").unwrap()).unwrap();
        assert!(c1 > c2);
        assert_eq!(r.details[0].best_candidate.as_deref(), Some("arrest"));
        assert_eq!(r.details[0].cosine, Some(c1));
        assert_eq!(r.recall, 1.0);
    }

    #[test]
    fn missing_endpoint_counts_as_miss() {
        let store = EmbeddingStore::deterministic(64);
        let mut g = gold(&[
            ("police", "pizzeria", "arrest"),
            ("police", "ghost", "haunt"),
        ]);
        g.nodes.push(GoldNode {
            label: "ghost".into(),
        });
        let r = match_relationships(&net(), &g, &store, DEFAULT_TAU, MatchMode::Stem).unwrap();
        assert_eq!(r.recall, 0.5);
        assert_eq!(r.unmatched_endpoints, 1);
    }

    #[test]
    fn actant_report() {
        let mut g = gold(&[]);
        g.nodes.push(GoldNode {
            label: "ghost".into(),
        });
        let r = match_actants(&net(), &g, 50, MatchMode::Stem);
        assert_eq!(r.gold_count, 4);
        assert_eq!(r.matched_anywhere, 3);
        assert_eq!(r.matched_at_threshold, 1);
        assert_eq!(r.missed, vec!["ghost"]);
        assert_eq!(r.extras, 0);
    }

    #[test]
    fn seeds_and_modes() {
        let mut n = NarrativeNetwork {
            nodes: vec![node("S001.01", Some("S001"))],
            ..Default::default()
        };
        n.nodes[0].label = "comet pizza".into();
        n.supernodes.push(SupernodeGroup {
            id: "S001".into(),
            name: "pizza/comet/pong".into(),
            children: vec!["S001.01".into()],
            frequency: 1,
        });
        let g = GoldGraph {
            nodes: vec![GoldNode {
                label: "Ping Pong".into(),
            }],
            ..Default::default()
        };
        assert_eq!(
            match_actants(&n, &g, 0, MatchMode::Exact).matched_anywhere,
            0
        );
        let g = GoldGraph {
            nodes: vec![GoldNode {
                label: "pong".into(),
            }],
            ..Default::default()
        };
        assert_eq!(
            match_actants(&n, &g, 0, MatchMode::Exact).matched_anywhere,
            1
        );
        let g = GoldGraph {
            nodes: vec![GoldNode {
                label: "pizzas".into(),
            }],
            ..Default::default()
        };
        assert_eq!(
            match_actants(&n, &g, 0, MatchMode::Exact).matched_anywhere,
            0
        );
        assert_eq!(
            match_actants(&n, &g, 0, MatchMode::Stem).matched_anywhere,
            1
        );
        let g = GoldGraph {
            nodes: vec![GoldNode {
                label: "pizzeria".into(),
            }],
            ..Default::default()
        };
        assert_eq!(
            match_actants(&n, &g, 0, MatchMode::Substring).matched_anywhere,
            0
        );
        let g = GoldGraph {
            nodes: vec![GoldNode {
                label: "pizz".into(),
            }],
            ..Default::default()
        };
        assert_eq!(
            match_actants(&n, &g, 0, MatchMode::Substring).matched_anywhere,
            1
        );
    }

    #[test]
    fn self_evaluation_identity() {
        let store = EmbeddingStore::deterministic(64);
        let n = net();
        let g = gold_from_network(&n, "self");
        g.validate().unwrap();
        let r = evaluate(&n, &g, &store, DEFAULT_TAU, 0, MatchMode::Stem).unwrap();
        assert_eq!(r.actants.match_rate(), 1.0);
        assert_eq!(r.relationships.recall, 1.0);
        assert!((r.relationships.mean_cosine - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_gold() {
        let mut g = gold(&[("police", "nobody", "x")]);
        assert!(matches!(g.validate(), Err(EvalError::Invalid(_))));
        g.edges.clear();
        g.nodes.push(GoldNode {
            label: "Police".into(),
        });
        assert!(matches!(g.validate(), Err(EvalError::Invalid(_))));
    }

    #[test]
    fn tau_range() {
        let store = EmbeddingStore::deterministic(64);
        for tau in [0.0, 1.5, f64::NAN] {
            assert!(matches!(
                match_relationships(&net(), &gold(&[]), &store, tau, MatchMode::Stem),
                Err(EvalError::Tau(_))
            ));
        }
    }

    #[test]
    fn table_mentions_counts() {
        let store = EmbeddingStore::deterministic(64);
        let r = evaluate(
            &net(),
            &gold(&[("police", "pizzeria", "arrest")]),
            &store,
            0.85,
            50,
            MatchMode::Stem,
        )
        .unwrap();
        let t = report_table(&r, 50);
        assert!(t.contains("recall"));
        assert!(t.contains("1.000"));
    }
}
