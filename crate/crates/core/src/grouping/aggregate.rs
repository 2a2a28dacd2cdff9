use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annotate::Mention;
use crate::cdcr::PersonConcept;
use crate::ingest::{Article, Topic};
use crate::tsc::TopicLabels;

/// Linear mention weight over the relative token offset in the article.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PositionWeight {
    pub w_start: f64,
    pub w_end: f64,
}

impl Default for PositionWeight {
    fn default() -> Self {
        PositionWeight {
            w_start: 1.0,
            w_end: 0.5,
        }
    }
}

impl PositionWeight {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.w_start.is_finite() && self.w_end.is_finite())
            || self.w_end < 0.0
            || self.w_end > self.w_start
        {
            return Err(format!(
                "position weight needs 0 <= w_end <= w_start, got {} .. {}",
                self.w_start, self.w_end
            ));
        }
        Ok(())
    }

    /// `ratio` is clamped to [0, 1].
    pub fn weight(&self, ratio: f64) -> f64 {
        let r = ratio.clamp(0.0, 1.0);
        self.w_start + (self.w_end - self.w_start) * r
    }
}

/// Token index of the mention start over the index of the last token.
pub fn offset_ratio(article: &Article, mention: &Mention) -> f64 {
    let n = article.tokens.len();
    if n <= 1 {
        return 0.0;
    }
    let idx = article.token_at(mention.char_start).unwrap_or_else(|| {
        article
            .tokens
            .partition_point(|t| t.char_start < mention.char_start)
    });
    idx.min(n - 1) as f64 / (n - 1) as f64
}

/// `sum(w(m) * s(m)) / m_max` over `(offset ratio, polarity score)` pairs.
pub fn weighted_polarity(
    mentions: impl IntoIterator<Item = (f64, i8)>,
    m_max: usize,
    weight: &PositionWeight,
) -> f64 {
    if m_max == 0 {
        return 0.0;
    }
    let sum: f64 = mentions
        .into_iter()
        .map(|(r, s)| weight.weight(r) * f64::from(s))
        .fold(0.0, |a, b| a + b); // `sum` would give -0.0 for no mentions

    sum / m_max as f64
}

/// Largest mention count of any person in the article.
pub fn m_max(article_id: &str, persons: &[PersonConcept]) -> usize {
    persons
        .iter()
        .map(|p| p.mentions_in(article_id).len())
        .max()
        .unwrap_or(0)
}

/// Polarity score of `person` in `article`. Unlabelled mentions count as neutral.
pub fn aggregate_polarity(
    article: &Article,
    person: &PersonConcept,
    labels: &TopicLabels,
    m_max: usize,
    weight: &PositionWeight,
) -> f64 {
    weighted_polarity(
        person.mentions_in(&article.id).iter().map(|m| {
            let s = labels.get(m).map_or(0, |l| l.score);
            (offset_ratio(article, m), s)
        }),
        m_max,
        weight,
    )
}

/// One article's scores, aligned to the topic's person index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArticleVector {
    pub article_id: String,
    pub scores: Vec<f64>,
    pub m_max: usize,
    /// Set when the article mentions no person at all.
    pub no_persons: bool,
}

/// Top `limit` persons by mention count; ties by canonical name, then id.
pub fn person_index(persons: &[PersonConcept], limit: usize) -> Vec<String> {
    let mut ranked: Vec<&PersonConcept> = persons.iter().collect();
    ranked.sort_by(|a, b| {
        b.mention_count
            .cmp(&a.mention_count)
            .then_with(|| a.canonical_name.cmp(&b.canonical_name))
            .then_with(|| a.person_id.cmp(&b.person_id))
    });
    ranked
        .into_iter()
        .take(limit)
        .map(|p| p.person_id.clone())
        .collect()
}

/// Builds one vector per article. `m_max` is taken over all `persons`, not
/// only the indexed ones.
pub fn article_vectors(
    topic: &Topic,
    persons: &[PersonConcept],
    index: &[String],
    labels: &TopicLabels,
    weight: &PositionWeight,
) -> Vec<ArticleVector> {
    let by_id: BTreeMap<&str, &PersonConcept> =
        persons.iter().map(|p| (p.person_id.as_str(), p)).collect();
    topic
        .articles
        .par_iter()
        .map(|a| {
            let mm = m_max(&a.id, persons);
            let scores = index
                .iter()
                .map(|pid| {
                    by_id
                        .get(pid.as_str())
                        .map_or(0.0, |p| aggregate_polarity(a, p, labels, mm, weight))
                })
                .collect();
            ArticleVector {
                article_id: a.id.clone(),
                scores,
                m_max: mm,
                no_persons: mm == 0,
            }
        })
        .collect()
}
