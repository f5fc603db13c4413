//! Entity/concept ranking that seeds supernode construction.
//!
//! Every argument occurrence contributes its normalized headword to the
//! headword list, and additionally to the NER list when the phrase carries
//! an entity tag. The two counts are summed.

use crate::interchange::ExtractionTuple;
use crate::text;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankedEntity {
    pub term: String,
    pub ner_count: u64,
    pub headword_count: u64,
    pub combined_score: u64,
    pub rank: usize,
}

/// Frequency cut-offs for the entity list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrequencyPreset {
    Desk,
    Pizzagate,
    Bridgegate,
}

impl FrequencyPreset {
    pub fn min_frequency(self) -> u64 {
        match self {
            FrequencyPreset::Desk => 5,
            FrequencyPreset::Pizzagate => 50,
            FrequencyPreset::Bridgegate => 150,
        }
    }
}

pub fn rank_entities(tuples: &[ExtractionTuple], min_frequency: u64) -> Vec<RankedEntity> {
    let mut counts: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    for t in tuples {
        for p in [&t.arg1, &t.arg2] {
            let term = text::normalize(&p.head);
            if term.is_empty() {
                continue;
            }
            let entry = counts.entry(term).or_default();
            entry.1 += 1;
            if p.ner_type.is_some() {
                entry.0 += 1;
            }
        }
    }
    let mut ranked: Vec<RankedEntity> = counts
        .into_iter()
        .map(|(term, (ner_count, headword_count))| RankedEntity {
            term,
            ner_count,
            headword_count,
            combined_score: ner_count + headword_count,
            rank: 0,
        })
        .filter(|e| e.combined_score >= min_frequency)
        .collect();
    ranked.sort_by(|a, b| {
        b.combined_score
            .cmp(&a.combined_score)
            .then_with(|| a.term.cmp(&b.term))
    });
    for (i, e) in ranked.iter_mut().enumerate() {
        e.rank = i + 1;
    }
    ranked
}

/// Two-column `term<TAB>score` listing.
pub fn ranking_table(ranking: &[RankedEntity]) -> String {
    let mut out = String::from("term\tcombined_score\n");
    for e in ranking {
        out.push_str(&format!("{}\t{}\n", e.term, e.combined_score));
    }
    out
}
