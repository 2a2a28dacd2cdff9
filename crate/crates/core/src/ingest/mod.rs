//! Loading, fetching, normalizing, and segmenting the articles of one event.

mod fetch;
mod segment;

pub use fetch::{
    extract_page, fetch_topic, ExtractedPage, FetchConfig, FetchFailure, FetchOutcome,
};
pub use segment::{segment, Sentence, Token, ABBREVIATIONS};

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("topic schema violation at `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("duplicate article id `{0}`")]
    DuplicateId(String),
    #[error("topic `{0}` has no articles")]
    EmptyTopic(String),
    #[error("no URL could be fetched ({} failures)", .0.len())]
    AllFetchesFailed(Vec<FetchFailure>),
    #[error("no URLs given")]
    NoUrls,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Left,
    Center,
    Right,
    Unknown,
}

impl Orientation {
    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::Left => "left",
            Orientation::Center => "center",
            Orientation::Right => "right",
            Orientation::Unknown => "unknown",
        }
    }
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One article as it appears in the topic input file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArticleInput {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
    pub outlet_name: String,
    pub outlet_orientation: Orientation,
    pub title: String,
    pub lead: String,
    pub body: String,
}

/// The topic input file schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopicInput {
    pub topic_id: String,
    pub event_description: String,
    pub articles: Vec<ArticleInput>,
}

/// A normalized, segmented article.
///
/// All offsets refer to [`Article::text`], the canonical concatenation
/// `title + "\n" + lead + "\n" + body`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Article {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
    pub outlet_name: String,
    pub outlet_orientation: Orientation,
    pub title: String,
    pub lead: String,
    pub body: String,
    pub tokens: Vec<Token>,
    pub sentences: Vec<Sentence>,
}

impl Article {
    pub fn new(input: ArticleInput) -> Self {
        let title = normalize_whitespace(&input.title);
        let lead = normalize_whitespace(&input.lead);
        let body = normalize_whitespace(&input.body);
        let (tokens, sentences) = segment(&canonical_text(&title, &lead, &body));
        Article {
            id: input.id,
            url: input.url,
            outlet_name: normalize_whitespace(&input.outlet_name),
            outlet_orientation: input.outlet_orientation,
            title,
            lead,
            body,
            tokens,
            sentences,
        }
    }

    pub fn text(&self) -> String {
        canonical_text(&self.title, &self.lead, &self.body)
    }

    /// Byte range of the body inside the canonical text.
    pub fn body_offset(&self) -> usize {
        self.title.len() + self.lead.len() + 2
    }

    pub fn sentence_text<'a>(&self, text: &'a str, idx: usize) -> Option<&'a str> {
        let s = self.sentences.get(idx)?;
        text.get(s.char_start..s.char_end)
    }

    /// Index of the token starting at `char_start`, if any.
    pub fn token_at(&self, char_start: usize) -> Option<usize> {
        self.tokens
            .binary_search_by_key(&char_start, |t| t.char_start)
            .ok()
    }

    pub fn to_input(&self) -> ArticleInput {
        ArticleInput {
            id: self.id.clone(),
            url: self.url.clone(),
            outlet_name: self.outlet_name.clone(),
            outlet_orientation: self.outlet_orientation,
            title: self.title.clone(),
            lead: self.lead.clone(),
            body: self.body.clone(),
        }
    }

    /// Checks the span invariants. Used when accepting articles from outside.
    pub fn check_invariants(&self) -> Result<(), String> {
        let text = self.text();
        let mut prev_end = 0;
        for (i, t) in self.tokens.iter().enumerate() {
            if t.char_start < prev_end || t.char_end <= t.char_start {
                return Err(format!("token {i} overlaps or is empty"));
            }
            if text.get(t.char_start..t.char_end) != Some(t.surface.as_str()) {
                return Err(format!("token {i} surface does not match text"));
            }
            let Some(s) = self.sentences.get(t.sentence_idx) else {
                return Err(format!("token {i} has invalid sentence index"));
            };
            if t.char_start < s.char_start || t.char_end > s.char_end {
                return Err(format!("token {i} lies outside its sentence"));
            }
            prev_end = t.char_end;
        }
        for w in self.sentences.windows(2) {
            if w[1].char_start < w[0].char_end {
                return Err("sentences overlap".into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topic {
    pub topic_id: String,
    pub event_description: String,
    pub articles: Vec<Article>,
}

impl Topic {
    pub fn from_input(input: TopicInput) -> Result<Self, IngestError> {
        if input.articles.is_empty() {
            return Err(IngestError::EmptyTopic(input.topic_id));
        }
        let mut seen = HashSet::new();
        for a in &input.articles {
            if a.id.is_empty() {
                return Err(IngestError::Schema {
                    field: "articles[].id".into(),
                    message: "must not be empty".into(),
                });
            }
            if !seen.insert(a.id.as_str()) {
                return Err(IngestError::DuplicateId(a.id.clone()));
            }
        }
        Ok(Topic {
            topic_id: input.topic_id,
            event_description: normalize_whitespace(&input.event_description),
            articles: input.articles.into_iter().map(Article::new).collect(),
        })
    }

    pub fn to_input(&self) -> TopicInput {
        TopicInput {
            topic_id: self.topic_id.clone(),
            event_description: self.event_description.clone(),
            articles: self.articles.iter().map(Article::to_input).collect(),
        }
    }

    pub fn article(&self, id: &str) -> Option<&Article> {
        self.articles.iter().find(|a| a.id == id)
    }
}

/// Parses a topic from JSON text in the input schema.
pub fn parse_topic(json: &str) -> Result<Topic, IngestError> {
    let de = &mut serde_json::Deserializer::from_str(json);
    let input: TopicInput = serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        IngestError::Schema {
            field,
            message: e.into_inner().to_string(),
        }
    })?;
    Topic::from_input(input)
}

pub fn load_topic(path: impl AsRef<Path>) -> Result<Topic, IngestError> {
    let path = path.as_ref();
    let json = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_topic(&json)
}

/// Collapses every whitespace run to one ASCII space and trims the ends.
pub fn normalize_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn canonical_text(title: &str, lead: &str, body: &str) -> String {
    let mut text = String::with_capacity(title.len() + lead.len() + body.len() + 2);
    text.push_str(title);
    text.push('\n');
    text.push_str(lead);
    text.push('\n');
    text.push_str(body);
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(id: &str, body: &str) -> ArticleInput {
        ArticleInput {
            id: id.into(),
            url: None,
            outlet_name: "Daily Example".into(),
            outlet_orientation: Orientation::Center,
            title: "Budget talks".into(),
            lead: "Leaders met.".into(),
            body: body.into(),
        }
    }

    #[test]
    fn ten_articles() {
        let topic = Topic::from_input(TopicInput {
            topic_id: "t".into(),
            event_description: "e".into(),
            articles: (0..10)
                .map(|i| input(&format!("a{i}"), "Trump spoke."))
                .collect(),
        })
        .unwrap();
        assert_eq!(topic.articles.len(), 10);
        assert!(topic.articles.iter().all(|a| !a.tokens.is_empty()));
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = Topic::from_input(TopicInput {
            topic_id: "t".into(),
            event_description: "e".into(),
            articles: vec![input("a1", "x"), input("a1", "y")],
        })
        .unwrap_err();
        assert!(matches!(err, IngestError::DuplicateId(id) if id == "a1"));
    }

    #[test]
    fn empty_topic_rejected() {
        let err =
            parse_topic(r#"{"topic_id":"t","event_description":"e","articles":[]}"#).unwrap_err();
        assert!(matches!(err, IngestError::EmptyTopic(_)));
    }

    #[test]
    fn schema_error_names_field() {
        let json = r#"{"topic_id":"t","event_description":"e","articles":[
            {"id":"a","outlet_name":"o","outlet_orientation":"far-left","title":"x","lead":"","body":""}]}"#;
        match parse_topic(json).unwrap_err() {
            IngestError::Schema { field, .. } => {
                assert_eq!(field, "articles[0].outlet_orientation")
            }
            other => panic!("unexpected {other:?}"),
        }
        let json = r#"{"topic_id":"t","event_description":"e","articles":[
            {"id":"a","outlet_orientation":"left","title":"x","lead":"","body":""}]}"#;
        match parse_topic(json).unwrap_err() {
            IngestError::Schema { field, message } => {
                assert_eq!(field, "articles[0]");
                assert!(message.contains("outlet_name"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn body_sentences() {
        let a = Article::new(input("a", "Trump spoke.  Pelosi\treplied."));
        assert_eq!(a.body, "Trump spoke. Pelosi replied.");
        let text = a.text();
        let body_start = a.body_offset();
        let body_tokens: Vec<_> = a
            .tokens
            .iter()
            .filter(|t| t.char_start >= body_start)
            .collect();
        assert_eq!(body_tokens.iter().filter(|t| t.is_word()).count(), 4);
        assert_eq!(body_tokens.iter().filter(|t| !t.is_word()).count(), 2);
        let body_sentences: Vec<_> = a
            .sentences
            .iter()
            .filter(|s| s.char_start >= body_start)
            .collect();
        assert_eq!(body_sentences.len(), 2);
        assert_eq!(
            &text[body_sentences[1].char_start..body_sentences[1].char_end],
            "Pelosi replied."
        );
        a.check_invariants().unwrap();
    }

    #[test]
    fn reload_of_exported_form_is_identical() {
        let a = Article::new(input("a", " Dr. Smith left.\n\nHe  returned. "));
        let again = Article::new(a.to_input());
        assert_eq!(a, again);
    }
}
