//! Node and edge centrality on the undirected weighted view.

use crate::network::{NarrativeNetwork, UndirectedView};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};

pub const PAGERANK_DAMPING: f64 = 0.85;
pub const PAGERANK_TOLERANCE: f64 = 1e-9;
const MAX_POWER_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    Eigen,
    Pagerank,
    BetweennessEdges,
}

/// Scores keyed by node id, or by `"a--b"` (ids sorted) for edge measures.
pub fn centrality(net: &NarrativeNetwork, measure: Measure) -> BTreeMap<String, f64> {
    let view = UndirectedView::new(net);
    match measure {
        Measure::Eigen => keyed(&view, eigenvector(&view)),
        Measure::Pagerank => keyed(&view, pagerank(&view, PAGERANK_DAMPING, PAGERANK_TOLERANCE)),
        Measure::BetweennessEdges => edge_betweenness(&view)
            .into_iter()
            .map(|((a, b), s)| (format!("{}--{}", view.ids[a], view.ids[b]), s))
            .collect(),
    }
}

fn keyed(view: &UndirectedView, scores: Vec<f64>) -> BTreeMap<String, f64> {
    view.ids.iter().cloned().zip(scores).collect()
}

/// Weighted PageRank; dangling mass is spread uniformly. Sums to 1.
pub fn pagerank(view: &UndirectedView, damping: f64, tolerance: f64) -> Vec<f64> {
    let n = view.len();
    if n == 0 {
        return Vec::new();
    }
    let strength: Vec<f64> = view.adjacency.iter().map(|a| a.values().sum()).collect();
    let mut rank = vec![1.0 / n as f64; n];
    for _ in 0..MAX_POWER_ITERATIONS {
        let dangling: f64 = (0..n)
            .filter(|&i| strength[i] == 0.0)
            .map(|i| rank[i])
            .sum();
        let base = (1.0 - damping) / n as f64 + damping * dangling / n as f64;
        let mut next = vec![base; n];
        for (i, adj) in view.adjacency.iter().enumerate() {
            if strength[i] == 0.0 {
                continue;
            }
            for (&j, &w) in adj {
                next[j] += damping * rank[i] * w / strength[i];
            }
        }
        let delta: f64 = next.iter().zip(&rank).map(|(a, b)| (a - b).abs()).sum();
        rank = next;
        if delta < tolerance {
            break;
        }
    }
    let total: f64 = rank.iter().sum();
    rank.iter().map(|r| r / total).collect()
}

/// Leading eigenvector of the weighted adjacency (power iteration on
/// `A + I`, which has the same eigenvectors and avoids oscillation on
/// bipartite graphs). Unit L2 norm, non-negative.
pub fn eigenvector(view: &UndirectedView) -> Vec<f64> {
    let n = view.len();
    if n == 0 {
        return Vec::new();
    }
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..MAX_POWER_ITERATIONS {
        let mut next = x.clone();
        for (i, adj) in view.adjacency.iter().enumerate() {
            for (&j, &w) in adj {
                next[i] += w * x[j];
            }
        }
        let norm = next.iter().map(|v| v * v).sum::<f64>().sqrt();
        next.iter_mut().for_each(|v| *v /= norm);
        let delta: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if delta < PAGERANK_TOLERANCE {
            break;
        }
    }
    x
}

/// Edge betweenness over unweighted shortest paths (Brandes), each
/// unordered source/target pair counted once. Keys are `(i, j)` with
/// `i < j`.
pub fn edge_betweenness(view: &UndirectedView) -> BTreeMap<(usize, usize), f64> {
    let n = view.len();
    let mut scores: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (i, adj) in view.adjacency.iter().enumerate() {
        for &j in adj.keys() {
            if i < j {
                scores.insert((i, j), 0.0);
            }
        }
    }
    for s in 0..n {
        let mut stack = Vec::new();
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut sigma = vec![0.0; n];
        let mut dist = vec![-1i64; n];
        sigma[s] = 1.0;
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in view.adjacency[v].keys() {
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        let mut delta = vec![0.0; n];
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                let c = sigma[v] / sigma[w] * (1.0 + delta[w]);
                *scores.get_mut(&(v.min(w), v.max(w))).expect("edge exists") += c;
                delta[v] += c;
            }
        }
    }
    scores.values_mut().for_each(|v| *v /= 2.0);
    scores
}
