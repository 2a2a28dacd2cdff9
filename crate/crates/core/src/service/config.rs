use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::annotate::{AnnotationProvider, BuiltinProvider, RemoteProvider};
use crate::cdcr::SieveConfig;
use crate::embedding::{
    EmbeddingError, EmbeddingProvider, EmbeddingTable, HashEmbedding, OovPolicy,
};
use crate::grouping::{
    PositionWeight, DEFAULT_KMEANS_SEED, DEFAULT_MFA_THRESHOLD, DEFAULT_PERSON_LIMIT,
};
use crate::tsc::{
    Lexicon, LexiconClassifier, LexiconError, RemoteClassifier, SentimentClassifier, WithFallback,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid config: {0}")]
    Parse(String),
    #[error("invalid config value: {0}")]
    Invalid(String),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    Builtin,
    Remote,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnotationConfig {
    pub provider: ProviderKind,
    pub endpoint: Option<String>,
    pub timeout_ms: u64,
    /// Sentences back that a pronoun may reach for its antecedent.
    pub pronoun_window: usize,
}

impl Default for AnnotationConfig {
    fn default() -> Self {
        AnnotationConfig {
            provider: ProviderKind::Builtin,
            endpoint: None,
            timeout_ms: 10_000,
            pronoun_window: BuiltinProvider::default().pronoun_window,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingKind {
    Hashed,
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingConfig {
    pub kind: EmbeddingKind,
    pub dim: usize,
    pub seed: u64,
    pub path: Option<PathBuf>,
    /// Out-of-vocabulary handling for file embeddings.
    pub oov: OovPolicy,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            kind: EmbeddingKind::Hashed,
            dim: 64,
            seed: HashEmbedding::DEFAULT_SEED,
            path: None,
            oov: OovPolicy::Skip,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SentimentConfig {
    pub classifier: ProviderKind,
    pub endpoint: Option<String>,
    pub timeout_ms: u64,
    /// Answer with the lexicon classifier when the remote one fails.
    pub fallback_to_builtin: bool,
    pub lexicon_path: Option<PathBuf>,
}

impl Default for SentimentConfig {
    fn default() -> Self {
        SentimentConfig {
            classifier: ProviderKind::Builtin,
            endpoint: None,
            timeout_ms: 10_000,
            fallback_to_builtin: true,
            lexicon_path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GroupingConfig {
    pub position_weight: PositionWeight,
    pub mfa_threshold: f64,
    pub k: usize,
    pub kmeans_seed: u64,
    pub person_limit: usize,
}

impl Default for GroupingConfig {
    fn default() -> Self {
        GroupingConfig {
            position_weight: PositionWeight::default(),
            mfa_threshold: DEFAULT_MFA_THRESHOLD,
            k: 3,
            kmeans_seed: DEFAULT_KMEANS_SEED,
            person_limit: DEFAULT_PERSON_LIMIT,
        }
    }
}

/// Every tunable of the analysis pipeline. Read from TOML.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    pub annotation: AnnotationConfig,
    pub embeddings: EmbeddingConfig,
    pub sieves: SieveConfig,
    pub sentiment: SentimentConfig,
    pub grouping: GroupingConfig,
}

impl EngineConfig {
    pub fn from_toml(src: &str) -> Result<Self, ConfigError> {
        let cfg: EngineConfig =
            toml::from_str(src).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        self.sieves.validate().map_err(ConfigError::Invalid)?;
        self.grouping
            .position_weight
            .validate()
            .map_err(ConfigError::Invalid)?;
        if !(self.grouping.mfa_threshold >= 0.0 && self.grouping.mfa_threshold.is_finite()) {
            return invalid(format!(
                "grouping.mfa_threshold = {} must be >= 0",
                self.grouping.mfa_threshold
            ));
        }
        if !(1..=3).contains(&self.grouping.k) || self.grouping.person_limit == 0 {
            return invalid("grouping.k must be 1..=3 and grouping.person_limit positive".into());
        }
        if self.embeddings.dim == 0 {
            return invalid("embeddings.dim must be positive".into());
        }
        if self.embeddings.kind == EmbeddingKind::File && self.embeddings.path.is_none() {
            return invalid("embeddings.path is required for file embeddings".into());
        }
        if self.annotation.provider == ProviderKind::Remote && self.annotation.endpoint.is_none() {
            return invalid("annotation.endpoint is required for the remote provider".into());
        }
        if self.sentiment.classifier == ProviderKind::Remote && self.sentiment.endpoint.is_none() {
            return invalid("sentiment.endpoint is required for the remote classifier".into());
        }
        Ok(())
    }

    /// SHA-256 over the config's canonical JSON form, hex encoded.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(&serde_json::to_value(self).expect("config serialises"))
            .expect("config serialises");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

/// Providers built from an [`EngineConfig`].
pub struct Engine {
    pub config: EngineConfig,
    pub annotator: Box<dyn AnnotationProvider>,
    pub embeddings: Box<dyn EmbeddingProvider>,
    pub classifier: Box<dyn SentimentClassifier>,
}

impl Engine {
    pub fn new(config: EngineConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let annotator: Box<dyn AnnotationProvider> = match config.annotation.provider {
            ProviderKind::Builtin => Box::new(BuiltinProvider {
                pronoun_window: config.annotation.pronoun_window,
            }),
            ProviderKind::Remote => Box::new(RemoteProvider::new(
                config.annotation.endpoint.clone().unwrap_or_default(),
                Duration::from_millis(config.annotation.timeout_ms),
            )),
        };
        let embeddings: Box<dyn EmbeddingProvider> = match config.embeddings.kind {
            EmbeddingKind::Hashed => Box::new(HashEmbedding::new(
                config.embeddings.dim,
                config.embeddings.seed,
            )),
            EmbeddingKind::File => Box::new(EmbeddingTable::load(
                config.embeddings.path.as_ref().expect("validated"),
                config.embeddings.oov,
            )?),
        };
        let lexicon = match &config.sentiment.lexicon_path {
            Some(p) => Lexicon::load(p)?,
            None => Lexicon::builtin(),
        };
        let builtin = LexiconClassifier::new(lexicon);
        let classifier: Box<dyn SentimentClassifier> = match config.sentiment.classifier {
            ProviderKind::Builtin => Box::new(builtin),
            ProviderKind::Remote => {
                let remote = RemoteClassifier::new(
                    config.sentiment.endpoint.clone().unwrap_or_default(),
                    Duration::from_millis(config.sentiment.timeout_ms),
                );
                if config.sentiment.fallback_to_builtin {
                    Box::new(WithFallback {
                        primary: remote,
                        fallback: builtin,
                    })
                } else {
                    Box::new(remote)
                }
            }
        };
        Ok(Engine {
            config,
            annotator,
            embeddings,
            classifier,
        })
    }
}
