//! Person-mention detection, POS structure, and within-document coreference.
//!
//! Annotation is delegated to an [`AnnotationProvider`]. [`BuiltinProvider`]
//! is deterministic and offline; [`RemoteProvider`] forwards articles to an
//! external service speaking the JSON annotation schema.

mod builtin;
mod chunk;
pub mod lexicon;
mod pos;
mod remote;

pub use builtin::BuiltinProvider;
pub use chunk::extract_np_singletons;
pub use pos::{is_capitalized, tag_article, PosTag};
pub use remote::{RemoteProvider, WireAnnotation, WireArticle, WireChain, WireMention};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::Article;

#[derive(Debug, Error)]
pub enum AnnotateError {
    #[error("annotation provider `{provider}` failed on article `{article_id}`: {message}")]
    Provider {
        provider: String,
        article_id: String,
        message: String,
    },
    #[error("provider `{provider}` returned an invalid span in article `{article_id}`: {message}")]
    InvalidSpan {
        provider: String,
        article_id: String,
        message: String,
    },
}

impl AnnotateError {
    pub fn article_id(&self) -> &str {
        match self {
            AnnotateError::Provider { article_id, .. }
            | AnnotateError::InvalidSpan { article_id, .. } => article_id,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NerType {
    Person,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mention {
    pub article_id: String,
    pub char_start: usize,
    pub char_end: usize,
    pub sentence_idx: usize,
    pub surface: String,
    pub head: String,
    /// Byte offset of the head token.
    pub head_start: usize,
    pub ner_type: NerType,
}

impl Mention {
    pub fn span(&self) -> (usize, usize) {
        (self.char_start, self.char_end)
    }

    pub fn is_pronoun(&self) -> bool {
        lexicon::PERSON_PRONOUNS.contains(&self.surface.to_lowercase().as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainSource {
    InDocCoref,
    NpSingleton,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MentionChain {
    pub chain_id: String,
    pub mentions: Vec<Mention>,
    pub representative: String,
    pub source: ChainSource,
}

impl MentionChain {
    /// The chain counts as a person chain when at least half of its mentions
    /// are person-typed.
    pub fn ner_type(&self) -> NerType {
        let persons = self
            .mentions
            .iter()
            .filter(|m| m.ner_type == NerType::Person)
            .count();
        if !self.mentions.is_empty() && persons * 2 >= self.mentions.len() {
            NerType::Person
        } else {
            NerType::Other
        }
    }

    /// Head of the mention whose surface is the representative phrase, or of
    /// the longest non-pronoun mention.
    pub fn head(&self) -> &str {
        self.representative_mention()
            .map_or("", |m| m.head.as_str())
    }

    pub fn representative_mention(&self) -> Option<&Mention> {
        self.mentions
            .iter()
            .find(|m| m.surface == self.representative)
            .or_else(|| pick_representative(&self.mentions))
    }
}

/// Longest non-pronoun mention by surface length; the first one on ties.
pub fn pick_representative(mentions: &[Mention]) -> Option<&Mention> {
    let mut best: Option<&Mention> = None;
    for m in mentions.iter().filter(|m| !m.is_pronoun()) {
        if best.is_none_or(|b| m.surface.chars().count() > b.surface.chars().count()) {
            best = Some(m);
        }
    }
    best.or_else(|| mentions.first())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Capabilities {
    pub pos: bool,
    pub ner: bool,
    pub in_doc_coref: bool,
}

/// Raw provider output before validation.
#[derive(Debug, Clone, Default)]
pub struct ProviderOutput {
    /// One tag per article token, when the provider tags POS.
    pub pos_tags: Option<Vec<PosTag>>,
    pub mentions: Vec<Mention>,
    pub chains: Vec<MentionChain>,
}

/// Annotation back end. Implementations must be safe for concurrent use.
pub trait AnnotationProvider: Send + Sync {
    fn name(&self) -> &str;
    fn capabilities(&self) -> Capabilities;
    fn annotate(&self, article: &Article) -> Result<ProviderOutput, String>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArticleAnnotation {
    pub article_id: String,
    pub pos_tags: Vec<PosTag>,
    /// Person-typed mentions plus every mention of a retained chain.
    pub mentions: Vec<Mention>,
    /// Within-document chains; every person mention belongs to one.
    pub chains: Vec<MentionChain>,
    pub np_singletons: Vec<MentionChain>,
}

/// Runs `provider` on one article and validates what it returns.
pub fn annotate_article(
    article: &Article,
    provider: &dyn AnnotationProvider,
) -> Result<ArticleAnnotation, AnnotateError> {
    let output = provider
        .annotate(article)
        .map_err(|message| AnnotateError::Provider {
            provider: provider.name().to_string(),
            article_id: article.id.clone(),
            message,
        })?;

    let text = article.text();
    let invalid = |message: String| AnnotateError::InvalidSpan {
        provider: provider.name().to_string(),
        article_id: article.id.clone(),
        message,
    };
    let check = |m: &Mention| -> Result<(), AnnotateError> {
        if m.article_id != article.id {
            return Err(invalid(format!("mention belongs to `{}`", m.article_id)));
        }
        if text.get(m.char_start..m.char_end) != Some(m.surface.as_str()) || m.surface.is_empty() {
            return Err(invalid(format!(
                "span {}..{} does not cover `{}`",
                m.char_start, m.char_end, m.surface
            )));
        }
        if article.token_at(m.char_start).is_none() || article.token_at(m.head_start).is_none() {
            return Err(invalid(format!(
                "span {}..{} is not token aligned",
                m.char_start, m.char_end
            )));
        }
        if m.sentence_idx >= article.sentences.len() {
            return Err(invalid(format!(
                "sentence index {} out of range",
                m.sentence_idx
            )));
        }
        Ok(())
    };
    for m in output
        .mentions
        .iter()
        .chain(output.chains.iter().flat_map(|c| &c.mentions))
    {
        check(m)?;
    }

    let pos_tags = match output.pos_tags {
        Some(tags) if provider.capabilities().pos && tags.len() == article.tokens.len() => tags,
        _ => tag_article(article),
    };

    // Keep chains that are mostly about persons.
    let mut chains: Vec<MentionChain> = output
        .chains
        .into_iter()
        .filter(|c| !c.mentions.is_empty() && c.ner_type() == NerType::Person)
        .map(|mut c| {
            c.mentions.sort();
            c.source = ChainSource::InDocCoref;
            if c.representative.is_empty() {
                c.representative = pick_representative(&c.mentions)
                    .map(|m| m.surface.clone())
                    .unwrap_or_default();
            }
            c
        })
        .collect();

    let chained: BTreeSet<(usize, usize)> = chains
        .iter()
        .flat_map(|c| c.mentions.iter().map(Mention::span))
        .collect();
    let mut next_id = chains.len();
    let mut singletons = Vec::new();
    for m in output
        .mentions
        .iter()
        .filter(|m| m.ner_type == NerType::Person)
    {
        if !chained.contains(&m.span()) && !m.is_pronoun() {
            singletons.push(MentionChain {
                chain_id: format!("{}:c{next_id}", article.id),
                mentions: vec![m.clone()],
                representative: m.surface.clone(),
                source: ChainSource::InDocCoref,
            });
            next_id += 1;
        }
    }
    chains.extend(singletons);
    chains.sort_by_key(|c| c.mentions[0].char_start);

    let mut mentions: Vec<Mention> = chains.iter().flat_map(|c| c.mentions.clone()).collect();
    mentions.sort();
    mentions.dedup();

    let np_singletons = extract_np_singletons(article, &pos_tags, &mentions);

    Ok(ArticleAnnotation {
        article_id: article.id.clone(),
        pos_tags,
        mentions,
        chains,
        np_singletons,
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::ingest::{ArticleInput, Orientation};

    pub(crate) fn article(id: &str, body: &str) -> Article {
        Article::new(ArticleInput {
            id: id.into(),
            url: None,
            outlet_name: "o".into(),
            outlet_orientation: Orientation::Unknown,
            title: String::new(),
            lead: String::new(),
            body: body.into(),
        })
    }

    #[test]
    fn trump_met_pelosi() {
        let a = article("a", "Trump met Pelosi.");
        let ann = annotate_article(&a, &BuiltinProvider::default()).unwrap();
        let surfaces: Vec<_> = ann.mentions.iter().map(|m| m.surface.as_str()).collect();
        assert_eq!(surfaces, vec!["Trump", "Pelosi"]);
        assert_eq!(ann.chains.len(), 2);
        assert!(ann.chains.iter().all(|c| c.mentions.len() == 1));
    }

    #[test]
    fn empty_body_has_no_mentions() {
        let a = article("a", "");
        let ann = annotate_article(&a, &BuiltinProvider::default()).unwrap();
        assert!(ann.mentions.is_empty());
        assert!(ann.chains.is_empty());
    }

    #[test]
    fn unresolvable_pronoun_is_dropped() {
        let a = article("a", "He said it.");
        let ann = annotate_article(&a, &BuiltinProvider::default()).unwrap();
        assert!(ann.mentions.is_empty());
        assert!(ann.chains.is_empty());
    }

    #[test]
    fn every_chain_mention_is_listed() {
        let a = article(
            "a",
            "Speaker Nancy Pelosi met Senator Schumer. Pelosi said he agreed with her.",
        );
        let ann = annotate_article(&a, &BuiltinProvider::default()).unwrap();
        for c in &ann.chains {
            assert!(!c.mentions.is_empty());
            for m in &c.mentions {
                assert!(ann.mentions.contains(m));
            }
        }
    }

    struct Broken;
    impl AnnotationProvider for Broken {
        fn name(&self) -> &str {
            "broken"
        }
        fn capabilities(&self) -> Capabilities {
            Capabilities {
                pos: false,
                ner: true,
                in_doc_coref: false,
            }
        }
        fn annotate(&self, article: &Article) -> Result<ProviderOutput, String> {
            if article.body.is_empty() {
                return Err("model unavailable".into());
            }
            Ok(ProviderOutput {
                pos_tags: None,
                mentions: vec![Mention {
                    article_id: article.id.clone(),
                    char_start: 0,
                    char_end: 3,
                    sentence_idx: 0,
                    surface: "xyz".into(),
                    head: "xyz".into(),
                    head_start: 0,
                    ner_type: NerType::Person,
                }],
                chains: vec![],
            })
        }
    }

    #[test]
    fn provider_failure_names_article() {
        let err = annotate_article(&article("a9", ""), &Broken).unwrap_err();
        assert!(matches!(err, AnnotateError::Provider { .. }));
        assert_eq!(err.article_id(), "a9");
        let err = annotate_article(&article("a9", "Trump met Pelosi."), &Broken).unwrap_err();
        assert!(matches!(err, AnnotateError::InvalidSpan { .. }));
    }

    #[test]
    fn mixed_chain_retention() {
        let m = |ner| Mention {
            article_id: "a".into(),
            char_start: 0,
            char_end: 1,
            sentence_idx: 0,
            surface: "x".into(),
            head: "x".into(),
            head_start: 0,
            ner_type: ner,
        };
        let chain = |ms| MentionChain {
            chain_id: "c".into(),
            mentions: ms,
            representative: "x".into(),
            source: ChainSource::InDocCoref,
        };
        assert_eq!(
            chain(vec![m(NerType::Person), m(NerType::Other)]).ner_type(),
            NerType::Person
        );
        assert_eq!(
            chain(vec![
                m(NerType::Person),
                m(NerType::Other),
                m(NerType::Other)
            ])
            .ner_type(),
            NerType::Other
        );
    }
}
