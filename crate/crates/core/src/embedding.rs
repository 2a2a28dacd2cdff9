//! Word-embedding lookup and vector arithmetic.
//!
//! Embedding file format (UTF-8):
//!
//! ```text
//! dim 3
//! trump 0.1 -0.2 0.3
//! pelosi 0.0 0.5 -0.1
//! ```

use std::collections::HashMap;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::segment;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("cannot read embedding file: {0}")]
    Io(#[from] std::io::Error),
    #[error("embedding file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("embedding provider failed: {0}")]
    Provider(String),
}

/// Vector lookup for single tokens. Implementations must be thread-safe.
pub trait EmbeddingProvider: Send + Sync {
    fn dimension(&self) -> usize;

    /// `Ok(None)` means the token is out of vocabulary.
    fn lookup(&self, token: &str) -> Result<Option<Vec<f64>>, EmbeddingError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum OovPolicy {
    /// Unknown tokens are skipped.
    Skip,
    /// Unknown tokens get a hash-seeded vector.
    Hashed { seed: u64 },
}

/// Embeddings read from a file.
#[derive(Debug, Clone)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
    oov: OovPolicy,
}

impl EmbeddingTable {
    pub fn parse(src: &str, oov: OovPolicy) -> Result<Self, EmbeddingError> {
        let mut lines = src
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(EmbeddingError::Parse {
            line: 1,
            message: "missing `dim N` header".into(),
        })?;
        let dim = header
            .strip_prefix("dim ")
            .and_then(|n| n.trim().parse::<usize>().ok())
            .filter(|&d| d > 0)
            .ok_or(EmbeddingError::Parse {
                line: 1,
                message: format!("bad header `{header}`"),
            })?;
        let mut vectors = HashMap::new();
        for (n, line) in lines {
            let mut parts = line.split_whitespace();
            let token = parts.next().expect("non-empty line");
            let values = parts
                .map(str::parse::<f64>)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| EmbeddingError::Parse {
                    line: n + 1,
                    message: e.to_string(),
                })?;
            if values.len() != dim {
                return Err(EmbeddingError::Parse {
                    line: n + 1,
                    message: format!("expected {dim} values, found {}", values.len()),
                });
            }
            vectors.insert(token.to_string(), values);
        }
        Ok(EmbeddingTable { dim, vectors, oov })
    }

    pub fn load(path: impl AsRef<Path>, oov: OovPolicy) -> Result<Self, EmbeddingError> {
        Self::parse(&std::fs::read_to_string(path)?, oov)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

impl EmbeddingProvider for EmbeddingTable {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn lookup(&self, token: &str) -> Result<Option<Vec<f64>>, EmbeddingError> {
        if let Some(v) = self
            .vectors
            .get(token)
            .or_else(|| self.vectors.get(&token.to_lowercase()))
        {
            return Ok(Some(v.clone()));
        }
        Ok(match self.oov {
            OovPolicy::Skip => None,
            OovPolicy::Hashed { seed } => Some(hashed_unit_vector(token, self.dim, seed)),
        })
    }
}

/// Deterministic pseudo-random unit vectors keyed by the lowercased token.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashEmbedding {
    pub dim: usize,
    pub seed: u64,
}

impl HashEmbedding {
    pub const DEFAULT_SEED: u64 = 0x5eed_b1a5;

    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim > 0, "embedding dimension must be positive");
        HashEmbedding { dim, seed }
    }
}

impl Default for HashEmbedding {
    fn default() -> Self {
        HashEmbedding::new(64, Self::DEFAULT_SEED)
    }
}

impl EmbeddingProvider for HashEmbedding {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn lookup(&self, token: &str) -> Result<Option<Vec<f64>>, EmbeddingError> {
        Ok(Some(hashed_unit_vector(token, self.dim, self.seed)))
    }
}

/// FNV-1a; stable across platforms and releases.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

pub fn hashed_unit_vector(token: &str, dim: usize, seed: u64) -> Vec<f64> {
    let key = token.to_lowercase();
    let mut rng = ChaCha8Rng::seed_from_u64(fnv1a(key.as_bytes()) ^ seed);
    let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

/// Mean of the vectors of all in-vocabulary tokens, or `None` if none are.
pub fn mean_of_tokens<'a>(
    provider: &dyn EmbeddingProvider,
    tokens: impl IntoIterator<Item = &'a str>,
) -> Result<Option<Vec<f64>>, EmbeddingError> {
    let dim = provider.dimension();
    let mut sum = vec![0.0; dim];
    let mut n = 0usize;
    for tok in tokens {
        if let Some(v) = provider.lookup(tok)? {
            if v.len() != dim {
                return Err(EmbeddingError::Provider(format!(
                    "vector for `{tok}` has dimension {}, expected {dim}",
                    v.len()
                )));
            }
            sum.iter_mut().zip(&v).for_each(|(s, x)| *s += x);
            n += 1;
        }
    }
    Ok((n > 0).then(|| sum.into_iter().map(|s| s / n as f64).collect()))
}

/// Mean vector of the word tokens of a phrase.
pub fn phrase_vector(
    provider: &dyn EmbeddingProvider,
    phrase: &str,
) -> Result<Option<Vec<f64>>, EmbeddingError> {
    let (tokens, _) = segment(phrase);
    let words: Vec<String> = tokens
        .iter()
        .filter(|t| t.is_word())
        .map(|t| t.surface.to_lowercase())
        .collect();
    mean_of_tokens(provider, words.iter().map(String::as_str))
}

/// Mean of a list of equally sized vectors.
pub fn mean(vectors: &[Vec<f64>]) -> Option<Vec<f64>> {
    let first = vectors.first()?;
    let mut sum = vec![0.0; first.len()];
    for v in vectors {
        sum.iter_mut().zip(v).for_each(|(s, x)| *s += x);
    }
    Some(sum.into_iter().map(|s| s / vectors.len() as f64).collect())
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    if a == b && a.iter().any(|x| *x != 0.0) {
        return 1.0;
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (dot / (na * nb)).clamp(-1.0, 1.0)
}

/// Cosine affinely mapped from [-1, 1] to [0, 1].
pub fn unit_cosine(a: &[f64], b: &[f64]) -> f64 {
    (cosine(a, b) + 1.0) / 2.0
}

/// A similarity score together with an out-of-vocabulary marker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Similarity {
    pub score: f64,
    pub oov: bool,
}

impl Similarity {
    pub fn oov() -> Self {
        Similarity {
            score: 0.0,
            oov: true,
        }
    }
}
