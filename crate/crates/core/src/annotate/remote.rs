//! Remote annotation over HTTP.
//!
//! The provider POSTs a [`WireArticle`] and expects a [`WireAnnotation`]:
//!
//! ```json
//! {"article_id": "a1",
//!  "pos_tags": ["proper_noun", "verb", ...],
//!  "mentions": [{"char_start": 0, "char_end": 5, "ner_type": "person"}],
//!  "chains": [{"mentions": [0, 3], "representative": "Donald Trump"}]}
//! ```
//!
//! `pos_tags`, `head_start`, `representative`, and `chains` are optional.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{
    AnnotationProvider, Capabilities, ChainSource, Mention, MentionChain, NerType, PosTag,
    ProviderOutput,
};
use crate::ingest::{Article, Sentence, Token};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireArticle {
    pub article_id: String,
    pub title: String,
    pub lead: String,
    pub body: String,
    /// Canonical text; all offsets refer to it.
    pub text: String,
    pub tokens: Vec<Token>,
    pub sentences: Vec<Sentence>,
}

impl From<&Article> for WireArticle {
    fn from(a: &Article) -> Self {
        WireArticle {
            article_id: a.id.clone(),
            title: a.title.clone(),
            lead: a.lead.clone(),
            body: a.body.clone(),
            text: a.text(),
            tokens: a.tokens.clone(),
            sentences: a.sentences.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireMention {
    pub char_start: usize,
    pub char_end: usize,
    pub ner_type: NerType,
    #[serde(default)]
    pub head_start: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireChain {
    /// Indices into `mentions`.
    pub mentions: Vec<usize>,
    #[serde(default)]
    pub representative: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireAnnotation {
    pub article_id: String,
    #[serde(default)]
    pub pos_tags: Option<Vec<PosTag>>,
    pub mentions: Vec<WireMention>,
    #[serde(default)]
    pub chains: Vec<WireChain>,
}

impl WireAnnotation {
    /// Resolves offsets against `article`, filling surface, sentence, and head.
    pub fn into_output(self, article: &Article) -> Result<ProviderOutput, String> {
        if self.article_id != article.id {
            return Err(format!(
                "response is for article `{}`, expected `{}`",
                self.article_id, article.id
            ));
        }
        let text = article.text();
        let mentions = self
            .mentions
            .iter()
            .map(|w| {
                let surface = text
                    .get(w.char_start..w.char_end)
                    .ok_or_else(|| format!("span {}..{} outside text", w.char_start, w.char_end))?;
                let covered: Vec<&Token> = article
                    .tokens
                    .iter()
                    .filter(|t| t.char_start >= w.char_start && t.char_end <= w.char_end)
                    .collect();
                let first = covered.first().ok_or("span covers no token")?;
                let head_start = w.head_start.unwrap_or_else(|| {
                    covered
                        .iter()
                        .rev()
                        .find(|t| t.is_word())
                        .map_or(first.char_start, |t| t.char_start)
                });
                let head = article
                    .tokens
                    .iter()
                    .find(|t| t.char_start == head_start)
                    .ok_or("head is not a token")?;
                Ok(Mention {
                    article_id: article.id.clone(),
                    char_start: w.char_start,
                    char_end: w.char_end,
                    sentence_idx: first.sentence_idx,
                    surface: surface.to_string(),
                    head: head.surface.clone(),
                    head_start,
                    ner_type: w.ner_type,
                })
            })
            .collect::<Result<Vec<_>, String>>()?;

        let chains = self
            .chains
            .iter()
            .enumerate()
            .map(|(n, c)| {
                let ms = c
                    .mentions
                    .iter()
                    .map(|&i| {
                        mentions
                            .get(i)
                            .cloned()
                            .ok_or(format!("chain references mention {i}"))
                    })
                    .collect::<Result<Vec<_>, String>>()?;
                Ok(MentionChain {
                    chain_id: format!("{}:c{n}", article.id),
                    representative: c.representative.clone().unwrap_or_default(),
                    mentions: ms,
                    source: ChainSource::InDocCoref,
                })
            })
            .collect::<Result<Vec<_>, String>>()?;

        Ok(ProviderOutput {
            pos_tags: self.pos_tags,
            mentions,
            chains,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RemoteProvider {
    endpoint: String,
    agent: ureq::Agent,
    capabilities: Capabilities,
}

impl RemoteProvider {
    pub fn new(endpoint: impl Into<String>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .build()
            .into();
        RemoteProvider {
            endpoint: endpoint.into(),
            agent,
            capabilities: Capabilities {
                pos: true,
                ner: true,
                in_doc_coref: true,
            },
        }
    }
}

impl AnnotationProvider for RemoteProvider {
    fn name(&self) -> &str {
        "remote"
    }

    fn capabilities(&self) -> Capabilities {
        self.capabilities
    }

    fn annotate(&self, article: &Article) -> Result<ProviderOutput, String> {
        let wire: WireAnnotation = self
            .agent
            .post(&self.endpoint)
            .send_json(WireArticle::from(article))
            .map_err(|e| e.to_string())?
            .body_mut()
            .read_json()
            .map_err(|e| e.to_string())?;
        wire.into_output(article)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotate::annotate_article;
    use crate::annotate::tests::article;

    #[test]
    fn wire_resolution() {
        let a = article("a1", "Donald Trump met Pelosi. He smiled.");
        let body = a.body_offset();
        let wire = WireAnnotation {
            article_id: "a1".into(),
            pos_tags: None,
            mentions: vec![
                WireMention {
                    char_start: body,
                    char_end: body + 12,
                    ner_type: NerType::Person,
                    head_start: None,
                },
                WireMention {
                    char_start: body + 17,
                    char_end: body + 23,
                    ner_type: NerType::Person,
                    head_start: None,
                },
                WireMention {
                    char_start: body + 25,
                    char_end: body + 27,
                    ner_type: NerType::Person,
                    head_start: None,
                },
            ],
            chains: vec![WireChain {
                mentions: vec![0, 2],
                representative: None,
            }],
        };
        let out = wire.into_output(&a).unwrap();
        assert_eq!(out.mentions[0].surface, "Donald Trump");
        assert_eq!(out.mentions[0].head, "Trump");
        assert_eq!(
            out.mentions[2].sentence_idx,
            out.mentions[1].sentence_idx + 1
        );
        assert_eq!(out.chains[0].mentions.len(), 2);
    }

    #[test]
    fn wire_rejects_bad_spans() {
        let a = article("a1", "Trump.");
        let wire = WireAnnotation {
            article_id: "a1".into(),
            pos_tags: None,
            mentions: vec![WireMention {
                char_start: 0,
                char_end: 999,
                ner_type: NerType::Person,
                head_start: None,
            }],
            chains: vec![],
        };
        assert!(wire.into_output(&a).is_err());
        let wrong = WireAnnotation {
            article_id: "zz".into(),
            pos_tags: None,
            mentions: vec![],
            chains: vec![],
        };
        assert!(wrong.into_output(&a).is_err());
    }

    #[test]
    fn unreachable_endpoint_is_a_provider_error() {
        let p = RemoteProvider::new("http://127.0.0.1:9/annotate", Duration::from_millis(500));
        let err = annotate_article(&article("a3", "Trump spoke."), &p).unwrap_err();
        assert_eq!(err.article_id(), "a3");
    }
}
