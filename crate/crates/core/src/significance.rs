//! Contextual significance of verbs.
//!
//! A context is the set of sentences in which two actants co-occur. A verb
//! matters for that context when its in-context probability
//! `N_v(C) / N(C)` is much larger than its corpus probability `N_v / N`;
//! verbs are ranked by `ln(p_pair / p_corpus)`.

use crate::interchange::{CorpusStats, ExtractionTuple, SentenceKey};
use crate::text;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ScoreError {
    #[error("corpus has no verbs")]
    EmptyCorpus,
    #[error(
        "verb {verb:?} counted {in_context} times in context but {in_corpus} times in the corpus"
    )]
    Inconsistent {
        verb: String,
        in_context: u64,
        in_corpus: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoringFunction {
    /// `ln(p_pair / p_corpus)`
    Kl,
    /// `p_pair * -ln(p_corpus)`
    TfidfStyle,
}

impl ScoringFunction {
    pub fn apply(self, p_pair: f64, p_corpus: f64) -> f64 {
        match self {
            ScoringFunction::Kl => (p_pair / p_corpus).ln(),
            ScoringFunction::TfidfStyle => p_pair * -p_corpus.ln(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoringConfig {
    pub top_m: usize,
    /// Verbs seen fewer times than this in a context are dropped.
    pub min_context_count: u64,
    /// Contexts with fewer sentences are not scored.
    pub min_context_sentences: usize,
    pub function: ScoringFunction,
}

impl Default for ScoringConfig {
    fn default() -> Self {
        ScoringConfig {
            top_m: 3,
            min_context_count: 2,
            min_context_sentences: 1,
            function: ScoringFunction::Kl,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerbScore {
    pub verb: String,
    pub count_in_context: u64,
    pub count_in_corpus: u64,
    pub p_pair: f64,
    pub p_corpus: f64,
    pub kl: f64,
    /// Value of the configured scoring function; equals `kl` by default.
    pub score: f64,
}

/// Unordered actant pair (`actant_a <= actant_b`) and the sentences where
/// both occur. `actant_a == actant_b` is a self-loop context.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextKey {
    pub actant_a: String,
    pub actant_b: String,
    pub sentence_ids: BTreeSet<SentenceKey>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredContext {
    pub actant_a: String,
    pub actant_b: String,
    pub n_sentences: usize,
    /// `N(C)`, before the minimum-count filter.
    pub n_context_verbs: u64,
    pub verbs: Vec<VerbScore>,
}

pub fn stem_verb(v: &str) -> String {
    text::stem(v.trim())
}

/// Tuples grouped by sentence.
#[derive(Debug, Default)]
pub struct SentenceIndex<'a> {
    by_sentence: HashMap<SentenceKey, Vec<&'a ExtractionTuple>>,
}

impl<'a> SentenceIndex<'a> {
    pub fn new(tuples: &'a [ExtractionTuple]) -> Self {
        let mut by_sentence: HashMap<SentenceKey, Vec<&ExtractionTuple>> = HashMap::new();
        for t in tuples {
            by_sentence.entry(t.sentence_key()).or_default().push(t);
        }
        SentenceIndex { by_sentence }
    }

    pub fn tuples(&self, key: &SentenceKey) -> &[&'a ExtractionTuple] {
        self.by_sentence.get(key).map_or(&[], |v| v.as_slice())
    }

    /// `N_v(C)` for every stemmed verb of the context's sentences.
    pub fn verb_counts(&self, ctx: &ContextKey) -> BTreeMap<String, u64> {
        let mut counts = BTreeMap::new();
        for key in &ctx.sentence_ids {
            for t in self.tuples(key) {
                for v in &t.rel_verbs {
                    *counts.entry(stem_verb(v)).or_default() += 1;
                }
            }
        }
        counts
    }
}

/// Scores already-counted context verbs against the corpus table and
/// returns the best `top_m`.
pub fn score_counts(
    context_counts: &BTreeMap<String, u64>,
    stats: &CorpusStats,
    config: &ScoringConfig,
) -> Result<Vec<VerbScore>, ScoreError> {
    if stats.verb_grand_total == 0 {
        return Err(ScoreError::EmptyCorpus);
    }
    let n_context: u64 = context_counts.values().sum();
    if n_context == 0 {
        return Ok(Vec::new());
    }
    let n_corpus = stats.verb_grand_total as f64;
    let mut out = Vec::new();
    for (verb, &count) in context_counts {
        let in_corpus = stats.verb_totals.get(verb).copied().unwrap_or(0);
        if in_corpus < count {
            return Err(ScoreError::Inconsistent {
                verb: verb.clone(),
                in_context: count,
                in_corpus,
            });
        }
        if count < config.min_context_count {
            continue;
        }
        let p_pair = count as f64 / n_context as f64;
        let p_corpus = in_corpus as f64 / n_corpus;
        // one correctly rounded division, so equal ratios give equal scores
        let ratio = (count as u128 * stats.verb_grand_total as u128) as f64
            / (n_context as u128 * in_corpus as u128) as f64;
        let kl = ratio.ln();
        out.push(VerbScore {
            verb: verb.clone(),
            count_in_context: count,
            count_in_corpus: in_corpus,
            p_pair,
            p_corpus,
            kl,
            score: match config.function {
                ScoringFunction::Kl => kl,
                f => f.apply(p_pair, p_corpus),
            },
        });
    }
    out.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| b.count_in_context.cmp(&a.count_in_context))
            .then_with(|| a.verb.cmp(&b.verb))
    });
    out.truncate(config.top_m);
    Ok(out)
}

pub fn score_context(
    ctx: &ContextKey,
    index: &SentenceIndex<'_>,
    stats: &CorpusStats,
    config: &ScoringConfig,
) -> Result<Vec<VerbScore>, ScoreError> {
    score_counts(&index.verb_counts(ctx), stats, config)
}

/// Collects the contexts of all actant pairs. `actants_of` maps a phrase id
/// to the actants it belongs to. A self-loop context is recorded for a
/// sentence when one tuple has both arguments in the same actant.
pub fn build_contexts<F>(
    tuples: &[ExtractionTuple],
    actants_of: F,
    allow_self_loops: bool,
) -> Vec<ContextKey>
where
    F: Fn(&str) -> Vec<String>,
{
    let mut per_sentence: BTreeMap<SentenceKey, (BTreeSet<String>, BTreeSet<String>)> =
        BTreeMap::new();
    let mut cache: HashMap<&str, Vec<String>> = HashMap::new();
    for t in tuples {
        let a1 = cache
            .entry(t.arg1.id.as_str())
            .or_insert_with(|| actants_of(&t.arg1.id))
            .clone();
        let a2 = cache
            .entry(t.arg2.id.as_str())
            .or_insert_with(|| actants_of(&t.arg2.id))
            .clone();
        let entry = per_sentence.entry(t.sentence_key()).or_default();
        for a in &a1 {
            if allow_self_loops && a2.contains(a) {
                entry.1.insert(a.clone());
            }
        }
        entry.0.extend(a1);
        entry.0.extend(a2);
    }
    let mut contexts: BTreeMap<(String, String), BTreeSet<SentenceKey>> = BTreeMap::new();
    for (key, (mentioned, loops)) in per_sentence {
        let mentioned: Vec<&String> = mentioned.iter().collect();
        for i in 0..mentioned.len() {
            for j in (i + 1)..mentioned.len() {
                contexts
                    .entry((mentioned[i].clone(), mentioned[j].clone()))
                    .or_default()
                    .insert(key.clone());
            }
        }
        for a in loops {
            contexts
                .entry((a.clone(), a))
                .or_default()
                .insert(key.clone());
        }
    }
    contexts
        .into_iter()
        .map(|((actant_a, actant_b), sentence_ids)| ContextKey {
            actant_a,
            actant_b,
            sentence_ids,
        })
        .collect()
}

/// Scores every context in parallel; output keeps the input order.
pub fn score_contexts(
    contexts: &[ContextKey],
    tuples: &[ExtractionTuple],
    stats: &CorpusStats,
    config: &ScoringConfig,
) -> Result<Vec<ScoredContext>, ScoreError> {
    let index = SentenceIndex::new(tuples);
    contexts
        .par_iter()
        .filter(|c| c.sentence_ids.len() >= config.min_context_sentences.max(1))
        .map(|c| {
            let counts = index.verb_counts(c);
            Ok(ScoredContext {
                actant_a: c.actant_a.clone(),
                actant_b: c.actant_b.clone(),
                n_sentences: c.sentence_ids.len(),
                n_context_verbs: counts.values().sum(),
                verbs: score_counts(&counts, stats, config)?,
            })
        })
        .collect()
}
