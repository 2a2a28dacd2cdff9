//! Pipeline orchestration, stored analyses, and the payloads served to the UI.

mod analysis;
mod config;
mod store;
mod views;

pub use analysis::{
    analyze_topic, analyze_topic_at, LabeledMention, TopicAnalysis, NO_MFA, SCHEMA_VERSION,
};
pub use config::{
    AnnotationConfig, ConfigError, EmbeddingConfig, EmbeddingKind, Engine, EngineConfig,
    GroupingConfig, ProviderKind, SentimentConfig,
};
pub use store::{export_json, parse_analysis, validate_id, TopicStore, TopicSummary};
pub use views::{
    get_article_view, get_overview, resolve_overlaps, ArticleViewPayload, ContextBarEntry,
    Explanations, Headline, HighlightSpan, OverviewGroup, OverviewPayload,
};

use thiserror::Error;

use crate::grouping::GroupingMethod;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("not found: {0}")]
    NotFound(String),
    #[error("invalid request: {0}")]
    Invalid(String),
    #[error("the profile skips the overview")]
    NoOverview,
    #[error("{0:?} grouping is unavailable for this topic")]
    GroupingUnavailable(GroupingMethod),
    #[error("{stage} failed{}: {message}", article_id.as_deref().map(|a| format!(" on article {a}")).unwrap_or_default())]
    Stage {
        stage: &'static str,
        article_id: Option<String>,
        message: String,
    },
    #[error("storage: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Config(#[from] ConfigError),
}
