//! Target-dependent sentiment: one polarity label per person mention,
//! judged within the mention's sentence.

mod lexicon;
mod remote;

pub use lexicon::{Lexicon, LexiconClassifier, LexiconError};
pub use remote::{ClassifyRequest, ClassifyResponse, RemoteClassifier};

use std::collections::BTreeMap;
use std::ops::Range;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotate::Mention;
use crate::cdcr::PersonConcept;
use crate::ingest::{Article, Topic};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
    Neutral,
}

impl Polarity {
    pub fn score(self) -> i8 {
        match self {
            Polarity::Positive => 1,
            Polarity::Negative => -1,
            Polarity::Neutral => 0,
        }
    }

    pub fn from_sign(x: f64) -> Self {
        if x > 0.0 {
            Polarity::Positive
        } else if x < 0.0 {
            Polarity::Negative
        } else {
            Polarity::Neutral
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarityLabel {
    pub value: Polarity,
    pub score: i8,
    pub confidence: f64,
}

impl PolarityLabel {
    pub fn new(value: Polarity, confidence: f64) -> Self {
        PolarityLabel {
            value,
            score: value.score(),
            confidence: confidence.clamp(0.0, 1.0),
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.score == self.value.score() && (0.0..=1.0).contains(&self.confidence)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierMode {
    BuiltinLexicon,
    Remote,
}

/// A sentence-level, target-dependent polarity classifier.
///
/// `target` is a byte range into `sentence`. Implementations are called
/// concurrently.
pub trait SentimentClassifier: Send + Sync {
    fn name(&self) -> &str;
    fn mode(&self) -> ClassifierMode;
    fn classify(&self, sentence: &str, target: Range<usize>) -> Result<PolarityLabel, String>;
}

/// Tries `primary`, and on error answers with `fallback`.
pub struct WithFallback<P, F> {
    pub primary: P,
    pub fallback: F,
}

impl<P: SentimentClassifier, F: SentimentClassifier> SentimentClassifier for WithFallback<P, F> {
    fn name(&self) -> &str {
        self.primary.name()
    }

    fn mode(&self) -> ClassifierMode {
        self.primary.mode()
    }

    fn classify(&self, sentence: &str, target: Range<usize>) -> Result<PolarityLabel, String> {
        self.primary
            .classify(sentence, target.clone())
            .or_else(|_| self.fallback.classify(sentence, target))
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TscError {
    #[error(
        "classifier `{classifier}` failed on {article_id}@{char_start}..{char_end}: {message}"
    )]
    Classifier {
        classifier: String,
        article_id: String,
        char_start: usize,
        char_end: usize,
        message: String,
    },
    #[error(
        "mention {article_id}@{char_start}..{char_end} does not lie within sentence {sentence_idx}"
    )]
    OutsideSentence {
        article_id: String,
        char_start: usize,
        char_end: usize,
        sentence_idx: usize,
    },
    #[error("unknown article `{0}`")]
    UnknownArticle(String),
}

/// Identity of a mention within a topic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MentionKey {
    pub article_id: String,
    pub char_start: usize,
    pub char_end: usize,
}

impl From<&Mention> for MentionKey {
    fn from(m: &Mention) -> Self {
        MentionKey {
            article_id: m.article_id.clone(),
            char_start: m.char_start,
            char_end: m.char_end,
        }
    }
}

pub fn classify_mention(
    article: &Article,
    mention: &Mention,
    classifier: &dyn SentimentClassifier,
) -> Result<PolarityLabel, TscError> {
    classify_in(&article.text(), article, mention, classifier)
}

fn classify_in(
    text: &str,
    article: &Article,
    mention: &Mention,
    classifier: &dyn SentimentClassifier,
) -> Result<PolarityLabel, TscError> {
    let outside = || TscError::OutsideSentence {
        article_id: mention.article_id.clone(),
        char_start: mention.char_start,
        char_end: mention.char_end,
        sentence_idx: mention.sentence_idx,
    };
    let s = article
        .sentences
        .get(mention.sentence_idx)
        .ok_or_else(outside)?;
    if mention.char_start < s.char_start || mention.char_end > s.char_end {
        return Err(outside());
    }
    let sentence = &text[s.char_start..s.char_end];
    let target = mention.char_start - s.char_start..mention.char_end - s.char_start;
    let label = classifier
        .classify(sentence, target)
        .map_err(|message| TscError::Classifier {
            classifier: classifier.name().to_string(),
            article_id: mention.article_id.clone(),
            char_start: mention.char_start,
            char_end: mention.char_end,
            message,
        })?;
    Ok(PolarityLabel::new(label.value, label.confidence))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TopicLabels {
    pub labels: BTreeMap<MentionKey, PolarityLabel>,
    pub errors: Vec<TscError>,
}

impl TopicLabels {
    pub fn incomplete(&self) -> bool {
        !self.errors.is_empty()
    }

    pub fn get(&self, m: &Mention) -> Option<&PolarityLabel> {
        self.labels.get(&MentionKey::from(m))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Labels every mention of every concept. Failed mentions are reported in
/// `errors`; the rest are still labelled.
pub fn classify_topic(
    topic: &Topic,
    concepts: &[PersonConcept],
    classifier: &dyn SentimentClassifier,
) -> TopicLabels {
    let texts: BTreeMap<&str, (String, &Article)> = topic
        .articles
        .iter()
        .map(|a| (a.id.as_str(), (a.text(), a)))
        .collect();
    let mentions: Vec<&Mention> = concepts.iter().flat_map(PersonConcept::mentions).collect();
    let results: Vec<(MentionKey, Result<PolarityLabel, TscError>)> = mentions
        .par_iter()
        .map(|m| {
            let r = match texts.get(m.article_id.as_str()) {
                Some((text, article)) => classify_in(text, article, m, classifier),
                None => Err(TscError::UnknownArticle(m.article_id.clone())),
            };
            (MentionKey::from(*m), r)
        })
        .collect();
    let mut out = TopicLabels::default();
    for (key, r) in results {
        match r {
            Ok(label) => {
                out.labels.insert(key, label);
            }
            Err(e) => out.errors.push(e),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotate::tests::article;
    use crate::annotate::{annotate_article, BuiltinProvider};
    use crate::cdcr::{extract_candidates, merge_sieves, SieveConfig};
    use crate::ingest::{ArticleInput, Orientation, TopicInput};

    struct Failing;

    impl SentimentClassifier for Failing {
        fn name(&self) -> &str {
            "failing"
        }
        fn mode(&self) -> ClassifierMode {
            ClassifierMode::Remote
        }
        fn classify(&self, _: &str, _: Range<usize>) -> Result<PolarityLabel, String> {
            Err("timeout".into())
        }
    }

    fn topic(bodies: &[&str]) -> Topic {
        Topic::from_input(TopicInput {
            topic_id: "t".into(),
            event_description: "e".into(),
            articles: bodies
                .iter()
                .enumerate()
                .map(|(i, b)| ArticleInput {
                    id: format!("a{i}"),
                    url: None,
                    outlet_name: "o".into(),
                    outlet_orientation: Orientation::Center,
                    title: "T".into(),
                    lead: String::new(),
                    body: b.to_string(),
                })
                .collect(),
        })
        .unwrap()
    }

    fn concepts(t: &Topic) -> Vec<PersonConcept> {
        let anns: Vec<_> = t
            .articles
            .iter()
            .map(|a| annotate_article(a, &BuiltinProvider::default()).unwrap())
            .collect();
        merge_sieves(
            &extract_candidates(&anns),
            &SieveConfig::string_only(),
            None,
        )
        .unwrap()
        .persons()
        .cloned()
        .collect()
    }

    #[test]
    fn label_consistency() {
        for p in [Polarity::Positive, Polarity::Negative, Polarity::Neutral] {
            assert!(PolarityLabel::new(p, 0.7).is_consistent());
        }
        assert!(!PolarityLabel {
            value: Polarity::Positive,
            score: 0,
            confidence: 1.0
        }
        .is_consistent());
    }

    #[test]
    fn single_mention() {
        let a = article("a", "The Mueller report was tough on Trump.");
        let ann = annotate_article(&a, &BuiltinProvider::default()).unwrap();
        let trump = ann.mentions.iter().find(|m| m.surface == "Trump").unwrap();
        let label = classify_mention(&a, trump, &LexiconClassifier::builtin()).unwrap();
        assert_eq!(label.value, Polarity::Negative);
    }

    #[test]
    fn totality() {
        let t = topic(&["Donald Trump spoke. Trump won. He smiled."]);
        let cs = concepts(&t);
        assert_eq!(cs.len(), 1);
        assert_eq!(cs[0].mention_count, 3);
        let labels = classify_topic(&t, &cs, &LexiconClassifier::builtin());
        assert_eq!(labels.len(), 3);
        assert!(!labels.incomplete());
        assert!(labels.labels.values().all(PolarityLabel::is_consistent));
    }

    #[test]
    fn empty_topic() {
        let t = topic(&["It rained."]);
        assert!(classify_topic(&t, &concepts(&t), &LexiconClassifier::builtin()).is_empty());
    }

    #[test]
    fn failures_are_reported_and_fallback_recovers() {
        let t = topic(&["Trump won."]);
        let cs = concepts(&t);
        let labels = classify_topic(&t, &cs, &Failing);
        assert!(labels.incomplete());
        assert!(labels.is_empty());
        match &labels.errors[0] {
            TscError::Classifier {
                article_id,
                char_start,
                ..
            } => {
                assert_eq!(article_id, "a0");
                assert_eq!(*char_start, cs[0].chains[0].mentions[0].char_start);
            }
            e => panic!("unexpected {e:?}"),
        }
        let fb = WithFallback {
            primary: Failing,
            fallback: LexiconClassifier::builtin(),
        };
        let labels = classify_topic(&t, &cs, &fb);
        assert_eq!(labels.len(), 1);
        assert_eq!(
            labels.labels.values().next().unwrap().value,
            Polarity::Positive
        );
    }

    #[test]
    fn mention_outside_sentence() {
        let a = article("a", "Trump won. Biden lost.");
        let ann = annotate_article(&a, &BuiltinProvider::default()).unwrap();
        let mut m = ann.mentions[0].clone();
        m.sentence_idx += 1;
        assert!(matches!(
            classify_mention(&a, &m, &LexiconClassifier::builtin()),
            Err(TscError::OutsideSentence { .. })
        ));
    }
}
