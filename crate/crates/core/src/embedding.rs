//! Phrase embeddings: unit-norm vectors loaded from the adapter's sidecar
//! file, or a deterministic hashed bag-of-stems embedding for fixtures.

use crate::text;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, BufReader};
use std::path::Path;
use thiserror::Error;

pub const DEFAULT_TEST_DIM: usize = 64;
const BUMPS_PER_TOKEN: usize = 4;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("missing embeddings for phrase ids: {}", .0.join(", "))]
    Missing(Vec<String>),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("zero vector for phrase {0:?} cannot be normalized")]
    ZeroVector(String),
    #[error("sidecar line {line}: {message}")]
    Sidecar { line: usize, message: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A unit-norm vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    /// Normalizes `values` to unit length. Returns `None` for the zero vector.
    pub fn normalized(mut values: Vec<f64>) -> Option<Self> {
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return None;
        }
        values.iter_mut().for_each(|v| *v /= norm);
        Some(EmbeddingVector(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Cosine similarity of two unit vectors, clamped to `[-1, 1]`.
pub fn cosine(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<f64, EmbeddingError> {
    if a.dim() != b.dim() {
        return Err(EmbeddingError::DimMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let dot: f64 = a.0.iter().zip(&b.0).map(|(x, y)| x * y).sum();
    Ok(dot.clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provider {
    SidecarFile,
    DeterministicTest,
}

#[derive(Debug, Clone)]
pub struct EmbeddingStore {
    dim: usize,
    provider: Provider,
    vectors: BTreeMap<String, EmbeddingVector>,
    by_text: HashMap<String, String>,
}

#[derive(Deserialize)]
struct SidecarHeader {
    schema_version: String,
    dim: usize,
}

#[derive(Deserialize)]
struct SidecarRow {
    phrase_id: String,
    #[serde(default)]
    text: Option<String>,
    vector: Vec<f64>,
}

impl EmbeddingStore {
    /// The hashed bag-of-stems provider. Any phrase text can be embedded.
    pub fn deterministic(dim: usize) -> Self {
        assert!(dim >= BUMPS_PER_TOKEN, "test embedding dim too small");
        EmbeddingStore {
            dim,
            provider: Provider::DeterministicTest,
            vectors: BTreeMap::new(),
            by_text: HashMap::new(),
        }
    }

    /// Builds a sidecar-backed store from `(phrase_id, optional text, raw
    /// vector)` rows. Vectors are renormalized.
    pub fn from_rows<I>(dim: usize, rows: I) -> Result<Self, EmbeddingError>
    where
        I: IntoIterator<Item = (String, Option<String>, Vec<f64>)>,
    {
        let mut store = EmbeddingStore {
            dim,
            provider: Provider::SidecarFile,
            vectors: BTreeMap::new(),
            by_text: HashMap::new(),
        };
        for (id, text, raw) in rows {
            store.insert(id, text, raw)?;
        }
        Ok(store)
    }

    fn insert(
        &mut self,
        id: String,
        text: Option<String>,
        raw: Vec<f64>,
    ) -> Result<(), EmbeddingError> {
        if raw.len() != self.dim {
            return Err(EmbeddingError::DimMismatch {
                expected: self.dim,
                found: raw.len(),
            });
        }
        let v = EmbeddingVector::normalized(raw)
            .ok_or_else(|| EmbeddingError::ZeroVector(id.clone()))?;
        if let Some(t) = text {
            self.by_text.insert(text::normalize(&t), id.clone());
        }
        self.vectors.insert(id, v);
        Ok(())
    }

    /// Reads a sidecar file: a header line `{"schema_version":"1","dim":N}`
    /// followed by `{"phrase_id":..,"text":..,"vector":[..]}` rows.
    pub fn load_sidecar(path: &Path) -> Result<Self, EmbeddingError> {
        let io_err = |source| EmbeddingError::Io {
            path: path.display().to_string(),
            source,
        };
        let file = std::fs::File::open(path).map_err(io_err)?;
        let mut lines = BufReader::new(file).lines().enumerate();
        let header: SidecarHeader = loop {
            match lines.next() {
                None => {
                    return Err(EmbeddingError::Sidecar {
                        line: 0,
                        message: "empty sidecar, header expected".into(),
                    })
                }
                Some((i, line)) => {
                    let line = line.map_err(io_err)?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    break serde_json::from_str(&line).map_err(|e| EmbeddingError::Sidecar {
                        line: i + 1,
                        message: format!("bad header: {e}"),
                    })?;
                }
            }
        };
        if header.schema_version != crate::interchange::SCHEMA_VERSION {
            return Err(EmbeddingError::Sidecar {
                line: 1,
                message: format!("unsupported schema_version {:?}", header.schema_version),
            });
        }
        let mut store = EmbeddingStore::from_rows(header.dim, std::iter::empty())?;
        for (i, line) in lines {
            let line = line.map_err(io_err)?;
            if line.trim().is_empty() {
                continue;
            }
            let row: SidecarRow =
                serde_json::from_str(&line).map_err(|e| EmbeddingError::Sidecar {
                    line: i + 1,
                    message: e.to_string(),
                })?;
            store.insert(row.phrase_id, row.text, row.vector)?;
        }
        Ok(store)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn provider(&self) -> Provider {
        self.provider
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Embedding of an argument phrase, by id for sidecar stores and by text
    /// for the test provider.
    pub fn get(
        &self,
        phrase_id: &str,
        phrase_text: &str,
    ) -> Result<EmbeddingVector, EmbeddingError> {
        match self.provider {
            Provider::DeterministicTest => Ok(hashed_embedding(phrase_text, self.dim)),
            Provider::SidecarFile => self
                .vectors
                .get(phrase_id)
                .cloned()
                .ok_or_else(|| EmbeddingError::Missing(vec![phrase_id.to_string()])),
        }
    }

    /// Embedding of free text such as a relationship phrase. Sidecar stores
    /// look the text up among rows that carried a `text` field.
    pub fn embed_text(&self, phrase_text: &str) -> Result<EmbeddingVector, EmbeddingError> {
        match self.provider {
            Provider::DeterministicTest => Ok(hashed_embedding(phrase_text, self.dim)),
            Provider::SidecarFile => self
                .by_text
                .get(&text::normalize(phrase_text))
                .and_then(|id| self.vectors.get(id))
                .cloned()
                .ok_or_else(|| EmbeddingError::Missing(vec![phrase_text.to_string()])),
        }
    }

    /// Fetches many phrases, reporting every missing id at once.
    pub fn get_many<'a, I>(&self, phrases: I) -> Result<Vec<EmbeddingVector>, EmbeddingError>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut out = Vec::new();
        let mut missing = Vec::new();
        for (id, text) in phrases {
            match self.get(id, text) {
                Ok(v) => out.push(v),
                Err(EmbeddingError::Missing(ids)) => missing.extend(ids),
                Err(e) => return Err(e),
            }
        }
        if missing.is_empty() {
            Ok(out)
        } else {
            Err(EmbeddingError::Missing(missing))
        }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Sum of per-token sparse signed bumps over the stemmed lowercase token
/// multiset, normalized. Word order does not matter; shared words pull
/// phrases together.
pub fn hashed_embedding(phrase_text: &str, dim: usize) -> EmbeddingVector {
    let mut values = vec![0.0; dim];
    let mut toks: Vec<String> = text::tokens(phrase_text)
        .iter()
        .map(|t| text::stem(t))
        .collect();
    if toks.is_empty() {
        toks.push(phrase_text.to_string());
    }
    for tok in &toks {
        let mut state = fnv1a(tok.as_bytes());
        for _ in 0..BUMPS_PER_TOKEN {
            let r = splitmix(&mut state);
            let idx = (r % dim as u64) as usize;
            let sign = if (r >> 63) == 1 { -1.0 } else { 1.0 };
            values[idx] += sign;
        }
    }
    EmbeddingVector::normalized(values.clone()).unwrap_or_else(|| {
        // bumps cancelled out exactly; fall back to a single positive bump
        let mut v = vec![0.0; dim];
        v[(fnv1a(phrase_text.as_bytes()) % dim as u64) as usize] = 1.0;
        EmbeddingVector(v)
    })
}
