//! Synthetic corpora sampled from a planted narrative framework.
//!
//! Each post picks a context, then for each sentence draws an actant from
//! the context's actant distribution, one of the context edges touching it
//! (weighted by the partner's probability), and a relationship from that
//! edge's distribution. Background sentences built from filler phrases and
//! common verbs give the corpus realistic verb frequencies.

use crate::interchange::{ExtractionTuple, NerType, Pattern, PhraseRef};
use crate::text;
use chrono::{Days, NaiveDate};
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("framework has no contexts")]
    NoContexts,
    #[error("context {0:?} has no edges")]
    EmptyContext(String),
    #[error("invalid framework: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedActant {
    /// Canonical single-word name; also the phrase head.
    pub name: String,
    /// Surface phrases, each containing `name`.
    pub variants: Vec<String>,
    #[serde(default)]
    pub ner: Option<NerType>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedEdge {
    pub source: usize,
    pub target: usize,
    /// `(verb lemma, probability)`.
    pub relations: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedContext {
    pub name: String,
    pub prior: f64,
    /// `(actant index, p_C(A))`.
    pub actants: Vec<(usize, f64)>,
    pub edges: Vec<PlantedEdge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Background {
    pub verbs: Vec<String>,
    pub phrases: Vec<String>,
    /// Chance of a background sentence after each planted sentence.
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedFramework {
    pub actants: Vec<PlantedActant>,
    pub contexts: Vec<PlantedContext>,
    /// `(sentences per post, probability)`.
    pub post_lengths: Vec<(usize, f64)>,
    pub background: Background,
    pub start_date: NaiveDate,
    pub days: u64,
}

/// A `(context, edge, verb)` triple with its within-edge probability.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedRelation {
    pub context: usize,
    pub source: String,
    pub target: String,
    pub verb: String,
    pub probability: f64,
}

fn check_distribution(
    what: &str,
    weights: impl IntoIterator<Item = f64>,
) -> Result<(), SynthError> {
    let mut total = 0.0;
    let mut n = 0;
    for w in weights {
        if !(w >= 0.0 && w.is_finite()) {
            return Err(SynthError::Invalid(format!(
                "{what}: negative or non-finite weight"
            )));
        }
        total += w;
        n += 1;
    }
    if n == 0 || (total - 1.0).abs() > 1e-9 {
        return Err(SynthError::Invalid(format!(
            "{what}: weights sum to {total}, expected 1"
        )));
    }
    Ok(())
}

impl PlantedFramework {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.contexts.is_empty() {
            return Err(SynthError::NoContexts);
        }
        for a in &self.actants {
            if a.variants.is_empty() {
                return Err(SynthError::Invalid(format!(
                    "actant {:?} has no variants",
                    a.name
                )));
            }
            let name = text::tokens(&a.name);
            if let Some(v) = a
                .variants
                .iter()
                .find(|v| !text::contains_words(&text::tokens(v), &name))
            {
                return Err(SynthError::Invalid(format!(
                    "variant {v:?} does not contain {:?}",
                    a.name
                )));
            }
        }
        check_distribution("context priors", self.contexts.iter().map(|c| c.prior))?;
        check_distribution("post lengths", self.post_lengths.iter().map(|p| p.1))?;
        if self.post_lengths.iter().any(|p| p.0 == 0) {
            return Err(SynthError::Invalid("post length 0".into()));
        }
        if self.background.rate > 0.0
            && (self.background.verbs.is_empty() || self.background.phrases.is_empty())
        {
            return Err(SynthError::Invalid(
                "background needs verbs and phrases".into(),
            ));
        }
        for c in &self.contexts {
            if c.edges.is_empty() {
                return Err(SynthError::EmptyContext(c.name.clone()));
            }
            check_distribution(
                &format!("actants of {}", c.name),
                c.actants.iter().map(|a| a.1),
            )?;
            let in_context = |i: usize| c.actants.iter().any(|a| a.0 == i);
            for e in &c.edges {
                if e.source >= self.actants.len() || e.target >= self.actants.len() {
                    return Err(SynthError::Invalid(format!(
                        "edge index out of range in {}",
                        c.name
                    )));
                }
                if !in_context(e.source) || !in_context(e.target) {
                    return Err(SynthError::Invalid(format!(
                        "edge endpoint outside context {}",
                        c.name
                    )));
                }
                check_distribution(
                    &format!("relations of {}", c.name),
                    e.relations.iter().map(|r| r.1),
                )?;
            }
            for &(a, w) in &c.actants {
                if w > 0.0 && !c.edges.iter().any(|e| e.source == a || e.target == a) {
                    return Err(SynthError::Invalid(format!(
                        "actant {} has weight in {} but no edge",
                        a, c.name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn relations(&self) -> Vec<PlantedRelation> {
        let mut out = Vec::new();
        for (ci, c) in self.contexts.iter().enumerate() {
            for e in &c.edges {
                for (verb, p) in &e.relations {
                    out.push(PlantedRelation {
                        context: ci,
                        source: self.actants[e.source].name.clone(),
                        target: self.actants[e.target].name.clone(),
                        verb: verb.clone(),
                        probability: *p,
                    });
                }
            }
        }
        out
    }
}

/// Regular English inflections of a lemma.
pub fn inflections(lemma: &str) -> [String; 4] {
    let (third, past, ing) = if let Some(stem) = lemma.strip_suffix('e') {
        (
            format!("{lemma}s"),
            format!("{lemma}d"),
            format!("{stem}ing"),
        )
    } else if lemma.ends_with('s')
        || lemma.ends_with("sh")
        || lemma.ends_with("ch")
        || lemma.ends_with('x')
    {
        (
            format!("{lemma}es"),
            format!("{lemma}ed"),
            format!("{lemma}ing"),
        )
    } else {
        (
            format!("{lemma}s"),
            format!("{lemma}ed"),
            format!("{lemma}ing"),
        )
    };
    [lemma.to_string(), third, past, ing]
}

fn phrase_id(text: &str) -> String {
    format!("ph:{}", text::normalize(text).replace(' ', "_"))
}

fn make_tuple(
    arg1: PhraseRef,
    verb: &str,
    arg2: PhraseRef,
    post: &str,
    sentence_id: u64,
    date: NaiveDate,
) -> ExtractionTuple {
    let l1 = arg1.token_count() as u32;
    let l2 = arg2.token_count() as u32;
    let total = l1 + 1 + l2;
    ExtractionTuple {
        arg1,
        rel_text: verb.to_string(),
        rel_verbs: vec![verb.to_string()],
        arg2,
        pattern: Pattern::Svo,
        doc_id: post.to_string(),
        post_id: post.to_string(),
        sentence_id,
        timestamp: Some(date),
        token_span: (0, total),
        sentence_tokens: Some(total + 1),
        arg1_span: Some((0, l1)),
        arg2_span: Some((l1 + 1, total)),
    }
}

fn actant_phrase(a: &PlantedActant, rng: &mut ChaCha8Rng) -> PhraseRef {
    let text = &a.variants[rng.gen_range(0..a.variants.len() as u64) as usize];
    let p = PhraseRef::new(phrase_id(text), text.clone(), a.name.clone());
    match a.ner {
        Some(n) => p.with_ner(n),
        None => p,
    }
}

fn filler_phrase(text: &str) -> PhraseRef {
    let head = text::tokens(text).last().cloned().unwrap_or_default();
    PhraseRef::new(phrase_id(text), text, head)
}

fn pick(rng: &mut ChaCha8Rng, len: usize) -> usize {
    rng.gen_range(0..len as u64) as usize
}

pub fn generate_synthetic_corpus(
    pf: &PlantedFramework,
    n_posts: usize,
    seed: u64,
) -> Result<Vec<ExtractionTuple>, SynthError> {
    pf.validate()?;
    if n_posts == 0 {
        return Err(SynthError::Invalid("n_posts must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights =
        |w: Vec<f64>| WeightedIndex::new(w).map_err(|e| SynthError::Invalid(e.to_string()));
    let context_dist = weights(pf.contexts.iter().map(|c| c.prior).collect())?;
    let length_dist = weights(pf.post_lengths.iter().map(|p| p.1).collect())?;
    let actant_dists = pf
        .contexts
        .iter()
        .map(|c| weights(c.actants.iter().map(|a| a.1).collect()))
        .collect::<Result<Vec<_>, _>>()?;
    let relation_dists = pf
        .contexts
        .iter()
        .map(|c| {
            c.edges
                .iter()
                .map(|e| weights(e.relations.iter().map(|r| r.1).collect()))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut out = Vec::new();
    for post in 0..n_posts {
        let post_id = format!("post{post:06}");
        let date = pf.start_date + Days::new(post as u64 * pf.days.max(1) / n_posts as u64);
        let ci = context_dist.sample(&mut rng);
        let c = &pf.contexts[ci];
        let n_sentences = pf.post_lengths[length_dist.sample(&mut rng)].0;
        let mut sentence = 0u64;
        for _ in 0..n_sentences {
            let first = c.actants[actant_dists[ci].sample(&mut rng)].0;
            let incident: Vec<usize> = (0..c.edges.len())
                .filter(|&e| c.edges[e].source == first || c.edges[e].target == first)
                .collect();
            let partner_weight = |e: &PlantedEdge| {
                let other = if e.source == first {
                    e.target
                } else {
                    e.source
                };
                c.actants
                    .iter()
                    .find(|a| a.0 == other)
                    .map_or(0.0, |a| a.1)
                    .max(1e-12)
            };
            let edge_dist = weights(
                incident
                    .iter()
                    .map(|&e| partner_weight(&c.edges[e]))
                    .collect(),
            )?;
            let ei = incident[edge_dist.sample(&mut rng)];
            let edge = &c.edges[ei];
            let lemma = &edge.relations[relation_dists[ci][ei].sample(&mut rng)].0;
            let forms = inflections(lemma);
            let verb = &forms[pick(&mut rng, forms.len())];
            let a1 = actant_phrase(&pf.actants[edge.source], &mut rng);
            let a2 = actant_phrase(&pf.actants[edge.target], &mut rng);
            out.push(make_tuple(a1, verb, a2, &post_id, sentence, date));
            sentence += 1;

            if rng.gen::<f64>() < pf.background.rate {
                let b = &pf.background;
                let x = filler_phrase(&b.phrases[pick(&mut rng, b.phrases.len())]);
                let y = filler_phrase(&b.phrases[pick(&mut rng, b.phrases.len())]);
                let v = &b.verbs[pick(&mut rng, b.verbs.len())];
                out.push(make_tuple(x, v, y, &post_id, sentence, date));
                sentence += 1;
            }
        }
    }
    Ok(out)
}

fn actant(name: &str, variants: &[&str], ner: Option<NerType>) -> PlantedActant {
    PlantedActant {
        name: name.into(),
        variants: variants.iter().map(|v| v.to_string()).collect(),
        ner,
    }
}

fn edge(source: usize, target: usize, relations: &[(&str, f64)]) -> PlantedEdge {
    PlantedEdge {
        source,
        target,
        relations: relations.iter().map(|(v, p)| (v.to_string(), *p)).collect(),
    }
}

/// Three contexts over twelve actants and twenty relationship verbs,
/// loosely shaped like a conspiracy framework: a restaurant domain, a
/// political domain and a leaked-documents domain.
pub fn demo_framework() -> PlantedFramework {
    use NerType::*;
    let actants = vec![
        actant(
            "pizzeria",
            &["pizzeria", "the pizzeria", "the local pizzeria"],
            Some(Organization),
        ),
        actant("owner", &["owner", "the owner", "restaurant owner"], None),
        actant(
            "basement",
            &["basement", "the basement", "secret basement"],
            Some(Location),
        ),
        actant(
            "children",
            &["children", "the children", "missing children"],
            None,
        ),
        actant(
            "senator",
            &["senator", "the senator", "state senator"],
            Some(Person),
        ),
        actant(
            "campaign",
            &["campaign", "the campaign", "presidential campaign"],
            Some(Organization),
        ),
        actant("donors", &["donors", "the donors", "wealthy donors"], None),
        actant(
            "lobbyist",
            &["lobbyist", "the lobbyist", "a lobbyist"],
            Some(Person),
        ),
        actant("emails", &["emails", "the emails", "leaked emails"], None),
        actant(
            "hackers",
            &["hackers", "the hackers", "foreign hackers"],
            Some(Organization),
        ),
        actant(
            "journalists",
            &["journalists", "the journalists", "independent journalists"],
            None,
        ),
        actant(
            "website",
            &["website", "the website", "leak website"],
            Some(Organization),
        ),
    ];
    let restaurant = PlantedContext {
        name: "restaurant".into(),
        prior: 0.4,
        actants: vec![(0, 0.3), (1, 0.25), (2, 0.25), (3, 0.2)],
        edges: vec![
            edge(1, 0, &[("own", 0.6), ("manage", 0.4)]),
            edge(0, 2, &[("hide", 1.0)]),
            edge(1, 3, &[("abduct", 0.6), ("abuse", 0.4)]),
            edge(3, 2, &[("escape", 0.6), ("enter", 0.4)]),
        ],
    };
    let politics = PlantedContext {
        name: "politics".into(),
        prior: 0.3,
        actants: vec![(4, 0.3), (5, 0.3), (6, 0.2), (7, 0.2)],
        edges: vec![
            edge(4, 5, &[("lead", 0.7), ("chair", 0.3)]),
            edge(6, 5, &[("fund", 1.0)]),
            edge(7, 4, &[("bribe", 0.5), ("advise", 0.5)]),
            edge(6, 7, &[("hire", 1.0)]),
        ],
    };
    let leaks = PlantedContext {
        name: "leaks".into(),
        prior: 0.3,
        actants: vec![(8, 0.3), (9, 0.2), (10, 0.2), (11, 0.2), (4, 0.1)],
        edges: vec![
            edge(9, 8, &[("steal", 0.6), ("hack", 0.4)]),
            edge(11, 8, &[("publish", 1.0)]),
            edge(10, 8, &[("decode", 0.5), ("expose", 0.5)]),
            edge(10, 11, &[("search", 1.0)]),
            edge(8, 4, &[("mention", 1.0)]),
        ],
    };
    PlantedFramework {
        actants,
        contexts: vec![restaurant, politics, leaks],
        post_lengths: vec![(1, 0.3), (2, 0.4), (3, 0.3)],
        background: Background {
            verbs: ["is", "are", "has", "say", "think", "know", "get", "make"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            phrases: [
                "people",
                "this story",
                "the truth",
                "everyone",
                "the world",
                "the media",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect(),
            rate: 0.5,
        },
        start_date: NaiveDate::from_ymd_opt(2016, 11, 1).expect("valid date"),
        days: 60,
    }
}
