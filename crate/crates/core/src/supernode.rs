//! Greedy supernode construction.
//!
//! A supernode is a small set of seed terms that tend to co-occur inside the
//! same argument phrases; it groups every phrase containing any of its seeds.
//! Seeds are grown from the ranked entity list: start from the best remaining
//! entity, repeatedly add the most frequent listed entity found in the phrases
//! matched so far, and close the supernode once that entity was already used
//! by an earlier supernode or the seed bound is reached.

use crate::interchange::{PhraseRef, PhraseTable};
use crate::ranking::RankedEntity;
use crate::text;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};

pub const DEFAULT_K_MAX: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Supernode {
    pub id: String,
    /// In order of addition.
    pub seeds: Vec<String>,
    pub member_phrases: BTreeSet<String>,
    pub frequency: u64,
}

impl Supernode {
    pub fn name(&self) -> String {
        self.seeds.join("/")
    }
}

pub fn supernode_id(index: usize) -> String {
    format!("S{:03}", index + 1)
}

/// Entity indices (into `terms`) contained in each token sequence, with
/// word-boundary matching.
struct TermMatcher {
    terms: Vec<Vec<String>>,
    by_first: HashMap<String, Vec<usize>>,
}

impl TermMatcher {
    fn new<'a>(terms: impl IntoIterator<Item = &'a str>) -> Self {
        let terms: Vec<Vec<String>> = terms.into_iter().map(text::tokens).collect();
        let mut by_first: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, t) in terms.iter().enumerate() {
            if let Some(first) = t.first() {
                by_first.entry(first.clone()).or_default().push(i);
            }
        }
        TermMatcher { terms, by_first }
    }

    fn matches(&self, tokens: &[String]) -> Vec<usize> {
        let mut found = BTreeSet::new();
        for start in 0..tokens.len() {
            if let Some(cands) = self.by_first.get(&tokens[start]) {
                for &c in cands {
                    let term = &self.terms[c];
                    if tokens[start..].len() >= term.len()
                        && tokens[start..start + term.len()] == term[..]
                    {
                        found.insert(c);
                    }
                }
            }
        }
        found.into_iter().collect()
    }
}

pub fn build_supernodes(
    ranking: &[RankedEntity],
    phrases: &PhraseTable,
    k_max: usize,
) -> Vec<Supernode> {
    assert!(k_max >= 1, "k_max must be at least 1");
    if ranking.is_empty() {
        return Vec::new();
    }
    // ranking order is the priority order; index 0 is the top entity
    let matcher = TermMatcher::new(ranking.iter().map(|e| e.term.as_str()));
    let entries: Vec<_> = phrases.iter().collect();
    let phrase_terms: Vec<Vec<usize>> = entries
        .iter()
        .map(|e| matcher.matches(&text::tokens(&e.phrase.text)))
        .collect();
    let mut term_phrases: Vec<Vec<usize>> = vec![Vec::new(); ranking.len()];
    for (p, terms) in phrase_terms.iter().enumerate() {
        for &t in terms {
            term_phrases[t].push(p);
        }
    }

    let mut current: BTreeSet<usize> = (0..ranking.len()).collect();
    let mut out = Vec::new();

    while let Some(first) = current.pop_first() {
        let mut seeds = vec![first];
        let mut in_seeds = vec![false; ranking.len()];
        in_seeds[first] = true;
        let mut matched: BTreeSet<usize> = term_phrases[first].iter().copied().collect();

        while seeds.len() < k_max {
            let mut freq: HashMap<usize, u64> = HashMap::new();
            for &p in &matched {
                let mentions = entries[p].mentions;
                for &t in &phrase_terms[p] {
                    if !in_seeds[t] {
                        *freq.entry(t).or_default() += mentions;
                    }
                }
            }
            // most frequent; ties go to the better-ranked entity
            let best = freq
                .into_iter()
                .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)));
            let Some((next, _)) = best else { break };
            if !current.remove(&next) {
                break;
            }
            seeds.push(next);
            in_seeds[next] = true;
            matched.extend(term_phrases[next].iter().copied());
        }

        let member_phrases: BTreeSet<String> = matched
            .iter()
            .map(|&p| entries[p].phrase.id.clone())
            .collect();
        let frequency = matched.iter().map(|&p| entries[p].mentions).sum();
        out.push(Supernode {
            id: supernode_id(out.len()),
            seeds: seeds.iter().map(|&s| ranking[s].term.clone()).collect(),
            member_phrases,
            frequency,
        });
    }
    out
}

/// Supernodes whose seeds occur in the phrase text. More than one id means
/// the phrase is multi-context.
pub fn assign_phrase(phrase: &PhraseRef, supernodes: &[Supernode]) -> Vec<String> {
    let toks = text::tokens(&phrase.text);
    supernodes
        .iter()
        .filter(|s| {
            s.seeds
                .iter()
                .any(|seed| text::contains_words(&toks, &text::tokens(seed)))
        })
        .map(|s| s.id.clone())
        .collect()
}

/// `seeds<TAB>member count<TAB>frequency` listing.
pub fn supernode_table(supernodes: &[Supernode]) -> String {
    let mut out = String::from("id\tseeds\tmembers\tfrequency\n");
    for s in supernodes {
        out.push_str(&format!(
            "{}\t[{}]\t{}\t{}\n",
            s.id,
            s.seeds.join(", "),
            s.member_phrases.len(),
            s.frequency
        ));
    }
    out
}
