//! Run configuration: every tunable of the pipeline, readable from plain
//! `key = value` text and overridable key by key.

use crate::community::{ConsensusConfig, FrequencyFilter};
use crate::evaluation::{MatchMode, DEFAULT_TAU};
use crate::interchange::IngestConfig;
use crate::significance::{ScoringConfig, ScoringFunction};
use crate::subnode::SubnodeConfig;
use crate::supernode::DEFAULT_K_MAX;
use std::path::PathBuf;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("bad value {value:?} for {key}: {reason}")]
    BadValue {
        key: String,
        value: String,
        reason: String,
    },
    #[error("{0}")]
    Constraint(String),
    #[error("cannot read config {path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Desk,
    Pizzagate,
    Bridgegate,
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "desk" => Ok(Preset::Desk),
            "pizzagate" => Ok(Preset::Pizzagate),
            "bridgegate" => Ok(Preset::Bridgegate),
            _ => Err("expected desk, pizzagate or bridgegate".into()),
        }
    }
}

impl Preset {
    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Desk => "desk",
            Preset::Pizzagate => "pizzagate",
            Preset::Bridgegate => "bridgegate",
        }
    }

    /// `(alpha, n_label, min_frequency)`.
    pub fn values(self) -> (f64, usize, u64) {
        match self {
            Preset::Desk => (0.5, 5, 5),
            Preset::Pizzagate => (0.5, 5, 50),
            Preset::Bridgegate => (0.7, 2, 150),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub gold: Option<PathBuf>,
    pub preset: Preset,
    pub min_frequency: u64,
    pub ingest: IngestConfig,
    pub k_max: usize,
    pub subnodes: SubnodeConfig,
    pub embedding_dim: usize,
    pub scoring: ScoringConfig,
    pub consensus: ConsensusConfig,
    pub freq_filter: FrequencyFilter,
    pub tau: f64,
    pub match_mode: MatchMode,
    pub eval_freq_threshold: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let (alpha, n_label, min_frequency) = Preset::Desk.values();
        RunConfig {
            input: None,
            embeddings: None,
            gold: None,
            preset: Preset::Desk,
            min_frequency,
            ingest: IngestConfig::default(),
            k_max: DEFAULT_K_MAX,
            subnodes: SubnodeConfig {
                alpha,
                n_label,
                ..SubnodeConfig::default()
            },
            embedding_dim: crate::embedding::DEFAULT_TEST_DIM,
            scoring: ScoringConfig::default(),
            consensus: ConsensusConfig::default(),
            freq_filter: FrequencyFilter::Mean,
            tau: DEFAULT_TAU,
            match_mode: MatchMode::Stem,
            eval_freq_threshold: 0,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    value.parse::<T>().map_err(|e| ConfigError::BadValue {
        key: key.to_string(),
        value: value.to_string(),
        reason: e.to_string(),
    })
}

fn optional_path(value: &str) -> Option<PathBuf> {
    (!value.is_empty()).then(|| PathBuf::from(value))
}

fn path_text(p: &Option<PathBuf>) -> String {
    p.as_ref()
        .map(|p| p.display().to_string())
        .unwrap_or_default()
}

impl RunConfig {
    pub fn with_preset(preset: Preset) -> Self {
        let mut c = RunConfig::default();
        c.apply_preset(preset);
        c
    }

    pub fn apply_preset(&mut self, preset: Preset) {
        let (alpha, n_label, min_frequency) = preset.values();
        self.preset = preset;
        self.subnodes.alpha = alpha;
        self.subnodes.n_label = n_label;
        self.min_frequency = min_frequency;
    }

    /// Sets one key. `preset` resets the values it governs.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "input" => self.input = optional_path(v),
            "embeddings" => self.embeddings = optional_path(v),
            "gold" => self.gold = optional_path(v),
            "preset" => {
                let p: Preset = parse(key, v)?;
                self.apply_preset(p);
            }
            "min_frequency" => self.min_frequency = parse(key, v)?,
            "max_sentence_tokens" => self.ingest.max_sentence_tokens = parse(key, v)?,
            "max_arg_gap" => self.ingest.max_arg_gap = parse(key, v)?,
            "max_resolved_phrase_tokens" => self.ingest.max_resolved_phrase_tokens = parse(key, v)?,
            "k_max" => self.k_max = parse(key, v)?,
            "k_clusters" => self.subnodes.k_clusters = parse(key, v)?,
            "prune_ratio" => self.subnodes.prune_ratio = parse(key, v)?,
            "n_label" => self.subnodes.n_label = parse(key, v)?,
            "alpha" => self.subnodes.alpha = parse(key, v)?,
            "seed" => self.subnodes.seed = parse(key, v)?,
            "embedding_dim" => self.embedding_dim = parse(key, v)?,
            "top_m" => self.scoring.top_m = parse(key, v)?,
            "min_context_count" => self.scoring.min_context_count = parse(key, v)?,
            "min_context_sentences" => self.scoring.min_context_sentences = parse(key, v)?,
            "scoring" => {
                self.scoring.function = match v {
                    "kl" => ScoringFunction::Kl,
                    "tfidf-style" => ScoringFunction::TfidfStyle,
                    _ => {
                        return Err(ConfigError::BadValue {
                            key: key.into(),
                            value: v.into(),
                            reason: "expected kl or tfidf-style".into(),
                        })
                    }
                }
            }
            "t_max" => self.consensus.t_max = parse(key, v)?,
            "p_th1" => self.consensus.p_th1 = parse(key, v)?,
            "p_th2" => self.consensus.p_th2 = parse(key, v)?,
            "community_seed" => self.consensus.base_seed = parse(key, v)?,
            "freq_filter" => {
                self.freq_filter = if v == "mean" {
                    FrequencyFilter::Mean
                } else {
                    FrequencyFilter::Absolute(parse(key, v)?)
                }
            }
            "tau" => self.tau = parse(key, v)?,
            "match_mode" => {
                self.match_mode = match v {
                    "exact" => MatchMode::Exact,
                    "stem" => MatchMode::Stem,
                    "substring" => MatchMode::Substring,
                    _ => {
                        return Err(ConfigError::BadValue {
                            key: key.into(),
                            value: v.into(),
                            reason: "expected exact, stem or substring".into(),
                        })
                    }
                }
            }
            "eval_freq_threshold" => self.eval_freq_threshold = parse(key, v)?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Applies `key = value` lines. Blank lines and `#` comments are
    /// skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or(ConfigError::Syntax { line: i + 1 })?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn parse_text(text: &str) -> Result<Self, ConfigError> {
        let mut c = RunConfig::default();
        c.apply_text(text)?;
        Ok(c)
    }

    /// Every key with its current value, in a fixed order. `preset` comes
    /// first so that re-applying the pairs reproduces the config.
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        vec![
            ("preset", self.preset.as_str().to_string()),
            ("input", path_text(&self.input)),
            ("embeddings", path_text(&self.embeddings)),
            ("gold", path_text(&self.gold)),
            ("min_frequency", self.min_frequency.to_string()),
            (
                "max_sentence_tokens",
                self.ingest.max_sentence_tokens.to_string(),
            ),
            ("max_arg_gap", self.ingest.max_arg_gap.to_string()),
            (
                "max_resolved_phrase_tokens",
                self.ingest.max_resolved_phrase_tokens.to_string(),
            ),
            ("k_max", self.k_max.to_string()),
            ("k_clusters", self.subnodes.k_clusters.to_string()),
            ("prune_ratio", self.subnodes.prune_ratio.to_string()),
            ("n_label", self.subnodes.n_label.to_string()),
            ("alpha", self.subnodes.alpha.to_string()),
            ("seed", self.subnodes.seed.to_string()),
            ("embedding_dim", self.embedding_dim.to_string()),
            ("top_m", self.scoring.top_m.to_string()),
            (
                "min_context_count",
                self.scoring.min_context_count.to_string(),
            ),
            (
                "min_context_sentences",
                self.scoring.min_context_sentences.to_string(),
            ),
            (
                "scoring",
                match self.scoring.function {
                    ScoringFunction::Kl => "kl",
                    ScoringFunction::TfidfStyle => "tfidf-style",
                }
                .to_string(),
            ),
            ("t_max", self.consensus.t_max.to_string()),
            ("p_th1", self.consensus.p_th1.to_string()),
            ("p_th2", self.consensus.p_th2.to_string()),
            ("community_seed", self.consensus.base_seed.to_string()),
            (
                "freq_filter",
                match self.freq_filter {
                    FrequencyFilter::Mean => "mean".to_string(),
                    FrequencyFilter::Absolute(t) => t.to_string(),
                },
            ),
            ("tau", self.tau.to_string()),
            (
                "match_mode",
                match self.match_mode {
                    MatchMode::Exact => "exact",
                    MatchMode::Stem => "stem",
                    MatchMode::Substring => "substring",
                }
                .to_string(),
            ),
            ("eval_freq_threshold", self.eval_freq_threshold.to_string()),
        ]
    }

    pub fn to_text(&self) -> String {
        self.pairs()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    /// Cross-field checks.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |m: &str| Err(ConfigError::Constraint(m.to_string()));
        if !(self.subnodes.alpha > 0.0 && self.subnodes.alpha < 1.0) {
            return fail("alpha must lie in (0, 1)");
        }
        if self.subnodes.n_label == 0 {
            return fail("n_label must be at least 1");
        }
        if self.subnodes.k_clusters == 0 || self.k_max == 0 {
            return fail("k_clusters and k_max must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.subnodes.prune_ratio) {
            return fail("prune_ratio must lie in [0, 1]");
        }
        if self.embedding_dim < 4 {
            return fail("embedding_dim must be at least 4");
        }
        if self.scoring.top_m == 0 {
            return fail("top_m must be at least 1");
        }
        if !(self.consensus.p_th2 > 0.0
            && self.consensus.p_th2 < self.consensus.p_th1
            && self.consensus.p_th1 <= 1.0)
        {
            return fail("thresholds must satisfy 0 < p_th2 < p_th1 <= 1");
        }
        if self.consensus.t_max == 0 {
            return fail("t_max must be at least 1");
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return fail("tau must lie in (0, 1]");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let p = RunConfig::with_preset(Preset::Pizzagate);
        assert_eq!(
            (p.subnodes.alpha, p.subnodes.n_label, p.min_frequency),
            (0.5, 5, 50)
        );
        let b = RunConfig::with_preset(Preset::Bridgegate);
        assert_eq!(
            (b.subnodes.alpha, b.subnodes.n_label, b.min_frequency),
            (0.7, 2, 150)
        );
    }

    #[test]
    fn text_roundtrip() {
        let mut c = RunConfig::with_preset(Preset::Bridgegate);
        c.set("alpha", "0.65").unwrap();
        c.set("freq_filter", "265").unwrap();
        c.set("input", "corpus.jsonl").unwrap();
        c.set("scoring", "tfidf-style").unwrap();
        let back = RunConfig::parse_text(&c.to_text()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn comments_and_errors() {
        let c = RunConfig::parse_text("# comment\n\nk_max = 4\n").unwrap();
        assert_eq!(c.k_max, 4);
        assert_eq!(
            RunConfig::parse_text("k_max 4"),
            Err(ConfigError::Syntax { line: 1 })
        );
        assert_eq!(
            RunConfig::parse_text("colour = red"),
            Err(ConfigError::UnknownKey("colour".into()))
        );
        assert!(matches!(
            RunConfig::parse_text("k_max = many"),
            Err(ConfigError::BadValue { .. })
        ));
    }

    #[test]
    fn constraints() {
        let mut c = RunConfig::default();
        c.validate().unwrap();
        c.set("p_th2", "0.8").unwrap();
        assert!(matches!(c.validate(), Err(ConfigError::Constraint(_))));
        let mut c = RunConfig::default();
        c.set("alpha", "1.0").unwrap();
        assert!(c.validate().is_err());
    }
}
