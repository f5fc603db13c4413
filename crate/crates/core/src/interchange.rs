//! Interchange data model: extraction tuples as produced by the upstream
//! NLP adapter, their on-disk line format, and the admission rules that
//! drop noisy extractions before aggregation.

use crate::text;
use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use thiserror::Error;

pub const SCHEMA_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(
        "line {line}: schema_version {found:?} is not supported (expected {SCHEMA_VERSION:?})"
    )]
    SchemaVersion { line: usize, found: String },
    #[error("hyper-edge needs at least 3 role slots, got {0}")]
    TooFewRoles(usize),
    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

/// The fixed NER tag set. Unknown producer tags map to `Misc`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "String", into = "String")]
pub enum NerType {
    Person,
    Organization,
    Location,
    Event,
    Product,
    WorkOfArt,
    Law,
    Misc,
}

impl NerType {
    pub fn as_str(self) -> &'static str {
        match self {
            NerType::Person => "person",
            NerType::Organization => "organization",
            NerType::Location => "location",
            NerType::Event => "event",
            NerType::Product => "product",
            NerType::WorkOfArt => "work-of-art",
            NerType::Law => "law",
            NerType::Misc => "misc",
        }
    }
}

impl From<String> for NerType {
    fn from(s: String) -> Self {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "person" | "per" => NerType::Person,
            "organization" | "org" => NerType::Organization,
            "location" | "loc" | "gpe" => NerType::Location,
            "event" => NerType::Event,
            "product" => NerType::Product,
            "work-of-art" => NerType::WorkOfArt,
            "law" => NerType::Law,
            _ => NerType::Misc,
        }
    }
}

impl From<NerType> for String {
    fn from(t: NerType) -> Self {
        t.as_str().to_string()
    }
}

/// A noun phrase argument. `id` is corpus-unique and keys the embedding
/// sidecar.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhraseRef {
    pub id: String,
    pub text: String,
    pub head: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ner_type: Option<NerType>,
    /// Set by the producer when coreference replaced a pronoun with this text.
    #[serde(default)]
    pub resolved_from_pronoun: bool,
}

impl PhraseRef {
    pub fn new(id: impl Into<String>, text: impl Into<String>, head: impl Into<String>) -> Self {
        PhraseRef {
            id: id.into(),
            text: text.into(),
            head: head.into(),
            ner_type: None,
            resolved_from_pronoun: false,
        }
    }

    pub fn with_ner(mut self, ner: NerType) -> Self {
        self.ner_type = Some(ner);
        self
    }

    pub fn token_count(&self) -> usize {
        self.text.split_whitespace().count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pattern {
    #[serde(rename = "SVO")]
    Svo,
    #[serde(rename = "SVP")]
    Svp,
    #[serde(rename = "SRL-A0VA1")]
    SrlA0VA1,
    #[serde(rename = "SRL-A0VA2")]
    SrlA0VA2,
    #[serde(rename = "other")]
    Other,
}

/// Half-open word offsets `[start, end)` within a sentence.
pub type TokenSpan = (u32, u32);

/// One `(arg1, rel, arg2)` relationship instance with its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExtractionTuple {
    pub arg1: PhraseRef,
    pub rel_text: String,
    pub rel_verbs: Vec<String>,
    pub arg2: PhraseRef,
    pub pattern: Pattern,
    pub doc_id: String,
    pub post_id: String,
    pub sentence_id: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<NaiveDate>,
    pub token_span: TokenSpan,
    /// Sentence length in words, when the producer knows it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentence_tokens: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arg1_span: Option<TokenSpan>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arg2_span: Option<TokenSpan>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SentenceKey {
    pub doc_id: String,
    pub sentence_id: u64,
}

impl ExtractionTuple {
    pub fn sentence_key(&self) -> SentenceKey {
        SentenceKey {
            doc_id: self.doc_id.clone(),
            sentence_id: self.sentence_id,
        }
    }

    /// Checks the type invariants. Returns a description of the first
    /// violation.
    pub fn validate(&self) -> Result<(), String> {
        for (slot, p) in [("arg1", &self.arg1), ("arg2", &self.arg2)] {
            if p.id.is_empty() {
                return Err(format!("{slot}: empty phrase id"));
            }
            if p.text.trim().is_empty() {
                return Err(format!("{slot}: empty phrase text"));
            }
            if p.head.trim().is_empty() {
                return Err(format!("{slot}: empty headword"));
            }
        }
        if self.rel_verbs.is_empty() && self.pattern != Pattern::Other {
            return Err("rel_verbs may only be empty for pattern 'other'".into());
        }
        if self.rel_verbs.iter().any(|v| v.trim().is_empty()) {
            return Err("empty verb in rel_verbs".into());
        }
        if self.token_span.0 > self.token_span.1 {
            return Err(format!(
                "token_span start {} > end {}",
                self.token_span.0, self.token_span.1
            ));
        }
        for span in [self.arg1_span, self.arg2_span].into_iter().flatten() {
            if span.0 > span.1 {
                return Err(format!("argument span start {} > end {}", span.0, span.1));
            }
        }
        Ok(())
    }

    /// Words between the two argument spans. Falls back to the width of the
    /// full match when the producer did not supply argument spans.
    pub fn argument_gap(&self) -> u32 {
        match (self.arg1_span, self.arg2_span) {
            (Some(a), Some(b)) => {
                let (first, second) = if a.0 <= b.0 { (a, b) } else { (b, a) };
                second.0.saturating_sub(first.1)
            }
            _ => self.token_span.1 - self.token_span.0,
        }
    }

    pub fn sentence_length(&self) -> u32 {
        self.sentence_tokens.unwrap_or(self.token_span.1)
    }

    /// Lowercases headwords so downstream counting sees one form.
    fn normalize_in_place(&mut self) {
        for p in [&mut self.arg1, &mut self.arg2] {
            p.head = p.head.trim().to_lowercase();
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IngestConfig {
    pub max_sentence_tokens: u32,
    pub max_arg_gap: u32,
    pub max_resolved_phrase_tokens: usize,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            max_sentence_tokens: 60,
            max_arg_gap: 25,
            max_resolved_phrase_tokens: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum RejectReason {
    LongSentence { sentence_tokens: u32, gap: u32 },
    LongResolvedPhrase { slot: u8, tokens: usize },
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RejectReason::LongSentence {
                sentence_tokens,
                gap,
            } => write!(
                f,
                "long sentence ({sentence_tokens} tokens) with arguments {gap} tokens apart"
            ),
            RejectReason::LongResolvedPhrase { slot, tokens } => write!(
                f,
                "arg{slot} was resolved from a pronoun into a {tokens}-token phrase"
            ),
        }
    }
}

/// De-noising admission rules. Total and deterministic.
pub fn admit_tuple(t: &ExtractionTuple, config: &IngestConfig) -> Result<(), RejectReason> {
    let sentence_tokens = t.sentence_length();
    let gap = t.argument_gap();
    if sentence_tokens > config.max_sentence_tokens && gap > config.max_arg_gap {
        return Err(RejectReason::LongSentence {
            sentence_tokens,
            gap,
        });
    }
    for (slot, p) in [(1u8, &t.arg1), (2u8, &t.arg2)] {
        let tokens = p.token_count();
        if p.resolved_from_pronoun && tokens > config.max_resolved_phrase_tokens {
            return Err(RejectReason::LongResolvedPhrase { slot, tokens });
        }
    }
    Ok(())
}

/// Corpus-wide counts. Verb keys are stems, so `verb_totals` is the `N_v`
/// table used by significance scoring.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n_docs: u64,
    pub n_sentences: u64,
    pub n_tuples: u64,
    pub verb_totals: BTreeMap<String, u64>,
    pub verb_grand_total: u64,
}

impl CorpusStats {
    pub fn from_tuples(tuples: &[ExtractionTuple]) -> Self {
        let mut docs = HashSet::new();
        let mut sentences = HashSet::new();
        let mut verb_totals: BTreeMap<String, u64> = BTreeMap::new();
        for t in tuples {
            docs.insert(t.doc_id.as_str());
            sentences.insert((t.doc_id.as_str(), t.sentence_id));
            for v in &t.rel_verbs {
                *verb_totals.entry(text::stem(v)).or_default() += 1;
            }
        }
        let verb_grand_total = verb_totals.values().sum();
        CorpusStats {
            n_docs: docs.len() as u64,
            n_sentences: sentences.len() as u64,
            n_tuples: tuples.len() as u64,
            verb_totals,
            verb_grand_total,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecordError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct LoadReport {
    pub lines_read: usize,
    pub malformed: Vec<RecordError>,
    pub rejected: Vec<(usize, RejectReason)>,
    pub duplicates: usize,
}

#[derive(Debug, Clone)]
pub struct LoadedCorpus {
    pub tuples: Vec<ExtractionTuple>,
    pub stats: CorpusStats,
    pub report: LoadReport,
}

#[derive(Serialize)]
struct RecordOut<'a> {
    schema_version: &'a str,
    #[serde(flatten)]
    tuple: &'a ExtractionTuple,
}

/// Loads a line-delimited interchange file. Malformed records are collected
/// in the report and skipped; a schema-version mismatch aborts the load.
pub fn load_corpus(path: &Path, config: &IngestConfig) -> Result<LoadedCorpus, IngestError> {
    let file = std::fs::File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    read_corpus(BufReader::new(file), config).map_err(|e| match e {
        IngestError::Io { source, .. } => IngestError::Io {
            path: path.display().to_string(),
            source,
        },
        other => other,
    })
}

pub fn read_corpus<R: BufRead>(
    reader: R,
    config: &IngestConfig,
) -> Result<LoadedCorpus, IngestError> {
    let mut report = LoadReport::default();
    let mut tuples = Vec::new();
    let mut seen: HashSet<ExtractionTuple> = HashSet::new();
    let mut phrase_texts: HashMap<String, String> = HashMap::new();

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|source| IngestError::Io {
            path: String::new(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        report.lines_read += 1;
        let value: serde_json::Value = match serde_json::from_str(&line) {
            Ok(v) => v,
            Err(e) => {
                report.malformed.push(RecordError {
                    line: lineno,
                    message: format!("invalid JSON: {e}"),
                });
                continue;
            }
        };
        match value.get("schema_version") {
            Some(serde_json::Value::String(v)) if v == SCHEMA_VERSION => {}
            Some(other) => {
                let found = other
                    .as_str()
                    .map(str::to_string)
                    .unwrap_or_else(|| other.to_string());
                return Err(IngestError::SchemaVersion {
                    line: lineno,
                    found,
                });
            }
            None => {
                report.malformed.push(RecordError {
                    line: lineno,
                    message: "missing schema_version".into(),
                });
                continue;
            }
        }
        let mut tuple: ExtractionTuple = match serde_json::from_value(value) {
            Ok(t) => t,
            Err(e) => {
                report.malformed.push(RecordError {
                    line: lineno,
                    message: e.to_string(),
                });
                continue;
            }
        };
        if let Err(message) = tuple.validate() {
            report.malformed.push(RecordError {
                line: lineno,
                message,
            });
            continue;
        }
        tuple.normalize_in_place();

        let mut conflict = None;
        for p in [&tuple.arg1, &tuple.arg2] {
            if let Some(prev) = phrase_texts.get(&p.id) {
                if prev != &p.text {
                    conflict = Some(format!(
                        "phrase id {:?} reused for {:?} (first seen as {:?})",
                        p.id, p.text, prev
                    ));
                }
            }
        }
        if let Some(message) = conflict {
            report.malformed.push(RecordError {
                line: lineno,
                message,
            });
            continue;
        }

        if let Err(reason) = admit_tuple(&tuple, config) {
            report.rejected.push((lineno, reason));
            continue;
        }
        if !seen.insert(tuple.clone()) {
            report.duplicates += 1;
            continue;
        }
        for p in [&tuple.arg1, &tuple.arg2] {
            phrase_texts
                .entry(p.id.clone())
                .or_insert_with(|| p.text.clone());
        }
        tuples.push(tuple);
    }

    let stats = CorpusStats::from_tuples(&tuples);
    Ok(LoadedCorpus {
        tuples,
        stats,
        report,
    })
}

pub fn write_corpus<W: Write>(writer: W, tuples: &[ExtractionTuple]) -> Result<(), IngestError> {
    let mut out = BufWriter::new(writer);
    for tuple in tuples {
        serde_json::to_writer(
            &mut out,
            &RecordOut {
                schema_version: SCHEMA_VERSION,
                tuple,
            },
        )?;
        out.write_all(b"\n").map_err(|source| IngestError::Io {
            path: String::new(),
            source,
        })?;
    }
    out.flush().map_err(|source| IngestError::Io {
        path: String::new(),
        source,
    })
}

pub fn save_corpus(path: &Path, tuples: &[ExtractionTuple]) -> Result<(), IngestError> {
    let file = std::fs::File::create(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    write_corpus(file, tuples)
}

/// One semantic-role slot of a predicate with more than two arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct RoleArg {
    pub role: String,
    pub phrase: PhraseRef,
    pub span: Option<TokenSpan>,
}

/// A multi-actant predicate instance.
#[derive(Debug, Clone)]
pub struct HyperEdge {
    pub predicate: String,
    pub args: Vec<RoleArg>,
    /// Relation text per `(role_a, role_b)` pair. Pairs without an entry
    /// get `"<predicate> <role_a>-<role_b>"` and the predicate as verb.
    pub pair_relations: BTreeMap<(String, String), String>,
    pub doc_id: String,
    pub post_id: String,
    pub sentence_id: u64,
    pub timestamp: Option<NaiveDate>,
    pub token_span: TokenSpan,
    pub sentence_tokens: Option<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairwiseEdge {
    pub tuple: ExtractionTuple,
    /// Both endpoints are the same phrase.
    pub degenerate: bool,
}

/// Splits an n-ary predicate into its n(n-1)/2 coupled pairwise tuples, in
/// slot order `(0,1), (0,2), ..., (n-2,n-1)`.
pub fn hyperedge_decompose(edge: &HyperEdge) -> Result<Vec<PairwiseEdge>, IngestError> {
    let n = edge.args.len();
    if n < 3 {
        return Err(IngestError::TooFewRoles(n));
    }
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (&edge.args[i], &edge.args[j]);
            let key = (a.role.clone(), b.role.clone());
            let (rel_text, verb) = match edge.pair_relations.get(&key) {
                Some(rel) => {
                    let verb = rel.split_whitespace().next().unwrap_or(&edge.predicate);
                    (rel.clone(), verb.to_string())
                }
                None => (
                    format!("{} {}-{}", edge.predicate, a.role, b.role),
                    edge.predicate.clone(),
                ),
            };
            let pattern = match (a.role.as_str(), b.role.as_str()) {
                ("A0", "A1") => Pattern::SrlA0VA1,
                ("A0", "A2") => Pattern::SrlA0VA2,
                _ => Pattern::Other,
            };
            out.push(PairwiseEdge {
                degenerate: a.phrase.id == b.phrase.id,
                tuple: ExtractionTuple {
                    arg1: a.phrase.clone(),
                    rel_text,
                    rel_verbs: vec![verb],
                    arg2: b.phrase.clone(),
                    pattern,
                    doc_id: edge.doc_id.clone(),
                    post_id: edge.post_id.clone(),
                    sentence_id: edge.sentence_id,
                    timestamp: edge.timestamp,
                    token_span: edge.token_span,
                    sentence_tokens: edge.sentence_tokens,
                    arg1_span: a.span,
                    arg2_span: b.span,
                },
            });
        }
    }
    Ok(out)
}

/// A distinct argument phrase and how often it is mentioned.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhraseEntry {
    pub phrase: PhraseRef,
    pub mentions: u64,
    pub posts: BTreeSet<String>,
}

/// All argument phrases of a corpus keyed by id.
#[derive(Debug, Clone, Default)]
pub struct PhraseTable {
    entries: BTreeMap<String, PhraseEntry>,
}

impl PhraseTable {
    pub fn from_tuples(tuples: &[ExtractionTuple]) -> Self {
        let mut entries: BTreeMap<String, PhraseEntry> = BTreeMap::new();
        for t in tuples {
            for p in [&t.arg1, &t.arg2] {
                let e = entries.entry(p.id.clone()).or_insert_with(|| PhraseEntry {
                    phrase: p.clone(),
                    mentions: 0,
                    posts: BTreeSet::new(),
                });
                e.mentions += 1;
                e.posts.insert(t.post_id.clone());
            }
        }
        PhraseTable { entries }
    }

    pub fn get(&self, id: &str) -> Option<&PhraseEntry> {
        self.entries.get(id)
    }

    pub fn mentions(&self, id: &str) -> u64 {
        self.entries.get(id).map_or(0, |e| e.mentions)
    }

    pub fn iter(&self) -> impl Iterator<Item = &PhraseEntry> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Number of posts in which each normalized word occurs, over argument and
/// relation texts.
pub fn post_word_frequency(tuples: &[ExtractionTuple]) -> BTreeMap<String, u64> {
    let mut per_word: HashMap<String, HashSet<&str>> = HashMap::new();
    for t in tuples {
        for s in [&t.arg1.text, &t.rel_text, &t.arg2.text] {
            for w in text::tokens(s) {
                per_word.entry(w).or_default().insert(t.post_id.as_str());
            }
        }
    }
    per_word
        .into_iter()
        .map(|(w, posts)| (w, posts.len() as u64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tuple(a: &str, rel: &str, b: &str) -> ExtractionTuple {
        ExtractionTuple {
            arg1: PhraseRef::new(format!("id:{a}"), a, a.rsplit(' ').next().unwrap()),
            rel_text: rel.into(),
            rel_verbs: vec![rel.split(' ').next().unwrap().into()],
            arg2: PhraseRef::new(format!("id:{b}"), b, b.rsplit(' ').next().unwrap()),
            pattern: Pattern::Svo,
            doc_id: "d1".into(),
            post_id: "p1".into(),
            sentence_id: 0,
            timestamp: None,
            token_span: (0, 12),
            sentence_tokens: Some(12),
            arg1_span: Some((0, 2)),
            arg2_span: Some((5, 8)),
        }
    }

    #[test]
    fn short_sentence_is_admitted() {
        let t = tuple("the spark", "was", "cache of emails");
        assert_eq!(t.argument_gap(), 3);
        assert!(admit_tuple(&t, &IngestConfig::default()).is_ok());
    }

    #[test]
    fn long_sentence_with_distant_arguments_is_rejected() {
        let mut t = tuple("the spark", "was", "cache of emails");
        t.sentence_tokens = Some(80);
        t.token_span = (0, 60);
        t.arg1_span = Some((0, 2));
        t.arg2_span = Some((42, 45));
        assert_eq!(t.argument_gap(), 40);
        assert_eq!(
            admit_tuple(&t, &IngestConfig::default()),
            Err(RejectReason::LongSentence {
                sentence_tokens: 80,
                gap: 40
            })
        );
        // long sentence alone is fine
        t.arg2_span = Some((3, 5));
        assert!(admit_tuple(&t, &IngestConfig::default()).is_ok());
    }

    #[test]
    fn long_pronoun_resolution_is_rejected() {
        let mut t = tuple("x", "met", "y");
        t.arg1.text = "the former chair of the campaign who ran the whole thing".into();
        t.arg1.resolved_from_pronoun = true;
        assert_eq!(t.arg1.token_count(), 11);
        assert_eq!(
            admit_tuple(&t, &IngestConfig::default()),
            Err(RejectReason::LongResolvedPhrase {
                slot: 1,
                tokens: 11
            })
        );
        t.arg1.resolved_from_pronoun = false;
        assert!(admit_tuple(&t, &IngestConfig::default()).is_ok());
    }

    #[test]
    fn argument_gap_is_order_free() {
        let mut t = tuple("a", "b", "c");
        t.arg1_span = Some((10, 12));
        t.arg2_span = Some((0, 3));
        assert_eq!(t.argument_gap(), 7);
        t.arg1_span = None;
        assert_eq!(t.argument_gap(), 12);
    }

    #[test]
    fn validate_rejects_empty_verbs_unless_other() {
        let mut t = tuple("a", "b", "c");
        t.rel_verbs.clear();
        assert!(t.validate().is_err());
        t.pattern = Pattern::Other;
        assert!(t.validate().is_ok());
        t.token_span = (5, 1);
        assert!(t.validate().is_err());
    }

    #[test]
    fn unknown_ner_maps_to_misc() {
        let p: PhraseRef =
            serde_json::from_str(r#"{"id":"1","text":"x","head":"x","ner_type":"NORP"}"#).unwrap();
        assert_eq!(p.ner_type, Some(NerType::Misc));
        let p: PhraseRef =
            serde_json::from_str(r#"{"id":"1","text":"x","head":"x","ner_type":"PERSON"}"#)
                .unwrap();
        assert_eq!(p.ner_type, Some(NerType::Person));
    }

    fn slot(role: &str, id: &str, text: &str) -> RoleArg {
        RoleArg {
            role: role.into(),
            phrase: PhraseRef::new(id, text, text.rsplit(' ').next().unwrap()),
            span: None,
        }
    }

    fn hyper(args: Vec<RoleArg>) -> HyperEdge {
        HyperEdge {
            predicate: "use".into(),
            args,
            pair_relations: BTreeMap::new(),
            doc_id: "d".into(),
            post_id: "p".into(),
            sentence_id: 4,
            timestamp: None,
            token_span: (0, 14),
            sentence_tokens: Some(14),
        }
    }

    #[test]
    fn hyperedge_three_slots_give_three_coupled_pairs() {
        let mut e = hyper(vec![
            slot("X", "podesta", "Podesta"),
            slot("Y", "comet", "Comet Pizza"),
            slot("Z", "ring", "ring for trafficking in children"),
        ]);
        e.pair_relations
            .insert(("X".into(), "Y".into()), "used".into());
        e.pair_relations
            .insert(("X".into(), "Z".into()), "hid".into());
        e.pair_relations
            .insert(("Y".into(), "Z".into()), "hosted".into());
        let pairs = hyperedge_decompose(&e).unwrap();
        let got: Vec<_> = pairs
            .iter()
            .map(|p| {
                (
                    p.tuple.arg1.text.as_str(),
                    p.tuple.rel_text.as_str(),
                    p.tuple.arg2.text.as_str(),
                )
            })
            .collect();
        assert_eq!(
            got,
            vec![
                ("Podesta", "used", "Comet Pizza"),
                ("Podesta", "hid", "ring for trafficking in children"),
                ("Comet Pizza", "hosted", "ring for trafficking in children"),
            ]
        );
        assert!(pairs
            .iter()
            .all(|p| !p.degenerate && p.tuple.sentence_id == 4));
    }

    #[test]
    fn hyperedge_identical_slots_are_degenerate() {
        let e = hyper(vec![
            slot("A0", "x", "x"),
            slot("A1", "x", "x"),
            slot("A2", "x", "x"),
        ]);
        let pairs = hyperedge_decompose(&e).unwrap();
        assert_eq!(pairs.len(), 3);
        assert!(pairs.iter().all(|p| p.degenerate));
        assert_eq!(pairs[0].tuple.pattern, Pattern::SrlA0VA1);
        assert_eq!(pairs[1].tuple.pattern, Pattern::SrlA0VA2);
        assert_eq!(pairs[0].tuple.rel_text, "use A0-A1");
    }

    #[test]
    fn hyperedge_needs_three_slots() {
        let e = hyper(vec![slot("A0", "x", "x"), slot("A1", "y", "y")]);
        assert!(matches!(
            hyperedge_decompose(&e),
            Err(IngestError::TooFewRoles(2))
        ));
    }
}
