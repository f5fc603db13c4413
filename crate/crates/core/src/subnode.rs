//! Subnodes: embedding clusters inside a supernode, pruned by relative
//! size, labeled with TF*IDF words and merged when labels coincide.

use crate::embedding::{EmbeddingError, EmbeddingStore, EmbeddingVector};
use crate::interchange::PhraseTable;
use crate::kmeans::kmeans;
use crate::supernode::Supernode;
use crate::text;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubnodeConfig {
    pub k_clusters: usize,
    pub prune_ratio: f64,
    pub n_label: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl Default for SubnodeConfig {
    fn default() -> Self {
        SubnodeConfig {
            k_clusters: 20,
            prune_ratio: 0.25,
            n_label: 5,
            alpha: 0.5,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Subnode {
    pub id: String,
    pub parent_supernode: String,
    pub label: Vec<String>,
    pub member_phrases: Vec<String>,
    pub frequency: u64,
    pub centroid: EmbeddingVector,
}

impl Subnode {
    pub fn name(&self) -> String {
        self.label.join(" ")
    }
}

/// A k-means cluster before labeling. `phrase_ids` and `vectors` are
/// aligned.
#[derive(Debug, Clone, PartialEq)]
pub struct RawCluster {
    pub phrase_ids: Vec<String>,
    pub vectors: Vec<EmbeddingVector>,
}

impl RawCluster {
    pub fn len(&self) -> usize {
        self.phrase_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrase_ids.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabelScore {
    pub word: String,
    pub tf: u64,
    pub idf: f64,
    pub score: f64,
}

/// Partitions the supernode's member phrases by k-means over their
/// embeddings. With no more distinct embeddings than `k_clusters`, every
/// distinct embedding becomes its own cluster.
pub fn cluster_supernode(
    supernode: &Supernode,
    phrases: &PhraseTable,
    store: &EmbeddingStore,
    k_clusters: usize,
    seed: u64,
) -> Result<Vec<RawCluster>, EmbeddingError> {
    assert!(k_clusters >= 1, "k_clusters must be at least 1");
    let ids: Vec<&String> = supernode.member_phrases.iter().collect();
    let texts: Vec<&str> = ids
        .iter()
        .map(|id| phrases.get(id).map_or("", |e| e.phrase.text.as_str()))
        .collect();
    let vectors = store.get_many(ids.iter().map(|s| s.as_str()).zip(texts.iter().copied()))?;

    // group exact duplicates; first occurrence fixes the order
    let mut distinct: Vec<usize> = Vec::new();
    let mut group_of: Vec<usize> = Vec::with_capacity(vectors.len());
    let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
    for (i, v) in vectors.iter().enumerate() {
        let key: Vec<u64> = v.values().iter().map(|x| x.to_bits()).collect();
        let g = *seen.entry(key).or_insert_with(|| {
            distinct.push(i);
            distinct.len() - 1
        });
        group_of.push(g);
    }

    let assignments: Vec<usize> = if distinct.len() <= k_clusters {
        group_of
    } else {
        let points: Vec<&[f64]> = vectors.iter().map(|v| v.values()).collect();
        kmeans(&points, k_clusters, seed).assignments
    };

    let mut order: Vec<usize> = Vec::new();
    let mut clusters: BTreeMap<usize, RawCluster> = BTreeMap::new();
    for (i, &a) in assignments.iter().enumerate() {
        let c = clusters.entry(a).or_insert_with(|| {
            order.push(a);
            RawCluster {
                phrase_ids: Vec::new(),
                vectors: Vec::new(),
            }
        });
        c.phrase_ids.push(ids[i].clone());
        c.vectors.push(vectors[i].clone());
    }
    Ok(order
        .into_iter()
        .map(|a| clusters.remove(&a).expect("cluster present"))
        .collect())
}

/// Drops clusters whose size relative to the mean cluster size is below
/// `ratio_threshold`. The largest cluster always survives.
pub fn prune_small_clusters(clusters: Vec<RawCluster>, ratio_threshold: f64) -> Vec<RawCluster> {
    if clusters.is_empty() {
        return clusters;
    }
    let mean = clusters.iter().map(|c| c.len()).sum::<usize>() as f64 / clusters.len() as f64;
    let keep: Vec<bool> = clusters
        .iter()
        .map(|c| c.len() as f64 / mean >= ratio_threshold)
        .collect();
    if keep.iter().any(|&k| k) {
        clusters
            .into_iter()
            .zip(keep)
            .filter_map(|(c, k)| k.then_some(c))
            .collect()
    } else {
        let largest = clusters
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.len().cmp(&b.1.len()).then_with(|| b.0.cmp(&a.0)))
            .map(|(i, _)| i)
            .expect("non-empty");
        clusters.into_iter().nth(largest).into_iter().collect()
    }
}

/// TF*IDF word scores for the phrases of one cluster, best first. TF counts
/// word occurrences over phrase mentions; IDF is one over the number of
/// posts containing the word. Stopwords are skipped unless nothing else
/// remains.
pub fn score_words(
    phrase_ids: &[String],
    phrases: &PhraseTable,
    post_freq: &BTreeMap<String, u64>,
) -> Vec<LabelScore> {
    let mut tf: BTreeMap<String, u64> = BTreeMap::new();
    let mut stop_tf: BTreeMap<String, u64> = BTreeMap::new();
    for id in phrase_ids {
        let Some(entry) = phrases.get(id) else {
            continue;
        };
        for w in text::tokens(&entry.phrase.text) {
            let target = if text::is_stopword(&w) {
                &mut stop_tf
            } else {
                &mut tf
            };
            *target.entry(w).or_default() += entry.mentions.max(1);
        }
    }
    if tf.is_empty() {
        tf = stop_tf;
    }
    let mut scores: Vec<LabelScore> = tf
        .into_iter()
        .map(|(word, tf)| {
            let posts = post_freq.get(&word).copied().unwrap_or(1).max(1);
            let idf = 1.0 / posts as f64;
            LabelScore {
                score: tf as f64 * idf,
                word,
                tf,
                idf,
            }
        })
        .collect();
    scores.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.word.cmp(&b.word))
    });
    scores
}

/// Takes the best word, then each following word only while its score
/// exceeds `alpha` times its predecessor's, up to `n_label` words.
pub fn alpha_chain(scores: &[LabelScore], n_label: usize, alpha: f64) -> Vec<String> {
    let mut label = Vec::new();
    let mut prev: Option<f64> = None;
    for s in scores {
        if label.len() >= n_label {
            break;
        }
        if let Some(p) = prev {
            if s.score <= alpha * p {
                break;
            }
        }
        label.push(s.word.clone());
        prev = Some(s.score);
    }
    label
}

pub fn label_cluster(
    cluster: &RawCluster,
    phrases: &PhraseTable,
    post_freq: &BTreeMap<String, u64>,
    n_label: usize,
    alpha: f64,
) -> Vec<String> {
    alpha_chain(
        &score_words(&cluster.phrase_ids, phrases, post_freq),
        n_label,
        alpha,
    )
}

/// Unions clusters with equal (order-sensitive) labels into subnodes.
pub fn merge_labeled_clusters(
    supernode_id: &str,
    labeled: Vec<(RawCluster, Vec<String>)>,
    phrases: &PhraseTable,
) -> Vec<Subnode> {
    let mut order: Vec<Vec<String>> = Vec::new();
    let mut groups: HashMap<Vec<String>, RawCluster> = HashMap::new();
    for (cluster, label) in labeled {
        match groups.get_mut(&label) {
            Some(g) => {
                g.phrase_ids.extend(cluster.phrase_ids);
                g.vectors.extend(cluster.vectors);
            }
            None => {
                order.push(label.clone());
                groups.insert(label, cluster);
            }
        }
    }
    order
        .into_iter()
        .enumerate()
        .map(|(i, label)| {
            let g = groups.remove(&label).expect("group present");
            let dim = g.vectors.first().map_or(0, |v| v.dim());
            let mut mean = vec![0.0; dim];
            for v in &g.vectors {
                for (m, x) in mean.iter_mut().zip(v.values()) {
                    *m += x;
                }
            }
            let centroid = EmbeddingVector::normalized(mean)
                .or_else(|| g.vectors.first().cloned())
                .expect("cluster has at least one vector");
            let frequency = g.phrase_ids.iter().map(|id| phrases.mentions(id)).sum();
            let mut member_phrases = g.phrase_ids;
            member_phrases.sort();
            Subnode {
                id: format!("{supernode_id}.{:02}", i + 1),
                parent_supernode: supernode_id.to_string(),
                label,
                member_phrases,
                frequency,
                centroid,
            }
        })
        .collect()
}

/// Full subnode construction for one supernode.
pub fn build_subnodes_for(
    supernode: &Supernode,
    phrases: &PhraseTable,
    store: &EmbeddingStore,
    post_freq: &BTreeMap<String, u64>,
    config: &SubnodeConfig,
) -> Result<Vec<Subnode>, EmbeddingError> {
    if supernode.member_phrases.is_empty() {
        return Ok(Vec::new());
    }
    let clusters = cluster_supernode(supernode, phrases, store, config.k_clusters, config.seed)?;
    let survivors = prune_small_clusters(clusters, config.prune_ratio);
    let labeled = survivors
        .into_iter()
        .map(|c| {
            let label = label_cluster(&c, phrases, post_freq, config.n_label, config.alpha);
            (c, label)
        })
        .collect();
    Ok(merge_labeled_clusters(&supernode.id, labeled, phrases))
}

/// Subnodes of every supernode, in supernode order. Supernodes are
/// processed in parallel.
pub fn build_subnodes(
    supernodes: &[Supernode],
    phrases: &PhraseTable,
    store: &EmbeddingStore,
    post_freq: &BTreeMap<String, u64>,
    config: &SubnodeConfig,
) -> Result<Vec<Subnode>, EmbeddingError> {
    let per: Vec<Result<Vec<Subnode>, EmbeddingError>> = supernodes
        .par_iter()
        .map(|s| build_subnodes_for(s, phrases, store, post_freq, config))
        .collect();
    let mut out = Vec::new();
    let mut missing = Vec::new();
    for r in per {
        match r {
            Ok(v) => out.extend(v),
            Err(EmbeddingError::Missing(ids)) => missing.extend(ids),
            Err(e) => return Err(e),
        }
    }
    if !missing.is_empty() {
        missing.sort();
        missing.dedup();
        return Err(EmbeddingError::Missing(missing));
    }
    Ok(out)
}

/// Context-specific actant weight: subnode frequency normalized within its
/// supernode.
pub fn actant_weights(subnodes: &[Subnode]) -> BTreeMap<String, f64> {
    let mut totals: HashMap<&str, u64> = HashMap::new();
    for s in subnodes {
        *totals.entry(s.parent_supernode.as_str()).or_default() += s.frequency;
    }
    subnodes
        .iter()
        .map(|s| {
            let total = totals[s.parent_supernode.as_str()];
            let w = if total == 0 {
                0.0
            } else {
                s.frequency as f64 / total as f64
            };
            (s.id.clone(), w)
        })
        .collect()
}

/// `supernode<TAB>subnode<TAB>label<TAB>frequency` listing.
pub fn subnode_table(supernodes: &[Supernode], subnodes: &[Subnode]) -> String {
    let names: HashMap<&str, String> = supernodes
        .iter()
        .map(|s| (s.id.as_str(), s.name()))
        .collect();
    let mut out = String::from("supernode\tsubnode\tlabel\tmembers\tfrequency\n");
    for s in subnodes {
        out.push_str(&format!(
            "[{}]\t{}\t{}\t{}\t{}\n",
            names
                .get(s.parent_supernode.as_str())
                .map_or("", |n| n.as_str()),
            s.id,
            s.name(),
            s.member_phrases.len(),
            s.frequency
        ));
    }
    out
}
