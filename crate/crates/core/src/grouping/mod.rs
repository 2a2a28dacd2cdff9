//! Article-level polarity vectors and three-way article groupings.

mod aggregate;
mod kmeans;

pub use aggregate::{
    aggregate_polarity, article_vectors, m_max, offset_ratio, person_index, weighted_polarity,
    ArticleVector, PositionWeight,
};
pub use kmeans::{centroid, kmeans, sq_dist};

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cdcr::PersonConcept;
use crate::embedding::{cosine, EmbeddingError, EmbeddingProvider, Similarity};
use crate::ingest::{Article, Orientation, Topic};

pub const DEFAULT_MFA_THRESHOLD: f64 = 0.1;
pub const DEFAULT_KMEANS_SEED: u64 = 42;
pub const DEFAULT_PERSON_LIMIT: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroupingError {
    #[error("topic has no person concepts")]
    NoPersons,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupingMethod {
    Mfa,
    All,
    PolSides,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Group {
    pub label: String,
    pub members: Vec<String>,
    pub representative: Option<String>,
}

impl Group {
    fn new(label: impl Into<String>) -> Self {
        Group {
            label: label.into(),
            members: Vec::new(),
            representative: None,
        }
    }
}

/// Exactly three groups that together partition the topic's articles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasGrouping {
    pub method: GroupingMethod,
    pub groups: Vec<Group>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mfa_person_id: Option<String>,
}

impl BiasGrouping {
    pub fn group_of(&self, article_id: &str) -> Option<usize> {
        self.groups
            .iter()
            .position(|g| g.members.iter().any(|m| m == article_id))
    }

    /// Checks that the groups partition `article_ids` and that every
    /// representative is a member of its group.
    pub fn check_partition<'a>(
        &self,
        article_ids: impl IntoIterator<Item = &'a str>,
    ) -> Result<(), String> {
        if self.groups.len() != 3 {
            return Err(format!("{} groups instead of 3", self.groups.len()));
        }
        if self.method == GroupingMethod::Mfa && self.mfa_person_id.is_none() {
            return Err("MFA grouping without MFA person".into());
        }
        let mut seen: Vec<&str> = self
            .groups
            .iter()
            .flat_map(|g| g.members.iter().map(String::as_str))
            .collect();
        let mut expected: Vec<&str> = article_ids.into_iter().collect();
        seen.sort_unstable();
        expected.sort_unstable();
        if seen != expected {
            return Err("groups do not partition the articles".into());
        }
        for g in &self.groups {
            match &g.representative {
                Some(r) if !g.members.contains(r) => {
                    return Err(format!("representative {r} not in `{}`", g.label))
                }
                None if !g.members.is_empty() => {
                    return Err(format!("group `{}` lacks a representative", g.label))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Person with the most mentions; ties go to the lexicographically smaller name.
pub fn find_mfa(concepts: &[PersonConcept]) -> Result<&PersonConcept, GroupingError> {
    concepts
        .iter()
        .filter(|c| c.mention_count > 0)
        .min_by(|a, b| {
            b.mention_count
                .cmp(&a.mention_count)
                .then_with(|| a.canonical_name.cmp(&b.canonical_name))
                .then_with(|| a.person_id.cmp(&b.person_id))
        })
        .ok_or(GroupingError::NoPersons)
}

/// Bands articles by their score for the MFA at `mfa_index`:
/// above `tau`, within `[-tau, tau]`, below `-tau`.
pub fn group_mfa(
    vectors: &[ArticleVector],
    mfa_index: usize,
    mfa_person_id: &str,
    mfa_name: &str,
    tau: f64,
) -> BiasGrouping {
    let mut groups = vec![
        Group::new(format!("pro-{mfa_name}")),
        Group::new("ambivalent"),
        Group::new(format!("contra-{mfa_name}")),
    ];
    for v in vectors {
        let s = v.scores.get(mfa_index).copied().unwrap_or(0.0);
        let g = if s > tau {
            0
        } else if s < -tau {
            2
        } else {
            1
        };
        groups[g].members.push(v.article_id.clone());
    }
    BiasGrouping {
        method: GroupingMethod::Mfa,
        groups,
        mfa_person_id: Some(mfa_person_id.to_string()),
    }
}

/// k-means over all person scores. Clusters are ordered by their centroid's
/// first coordinate, highest first; empty clusters come last.
pub fn group_all(vectors: &[ArticleVector], k: usize, seed: u64) -> BiasGrouping {
    let points: Vec<Vec<f64>> = vectors.iter().map(|v| v.scores.clone()).collect();
    let assign = kmeans(&points, k, seed);
    let mut clusters: Vec<Vec<usize>> = vec![Vec::new(); k.max(3)];
    for (i, &c) in assign.iter().enumerate() {
        clusters[c].push(i);
    }
    let key = |members: &Vec<usize>| -> f64 {
        let pts: Vec<&[f64]> = members.iter().map(|&i| points[i].as_slice()).collect();
        centroid(&pts).first().copied().unwrap_or(0.0)
    };
    clusters.sort_by(|a, b| match (a.is_empty(), b.is_empty()) {
        (false, true) => std::cmp::Ordering::Less,
        (true, false) => std::cmp::Ordering::Greater,
        (true, true) => std::cmp::Ordering::Equal,
        (false, false) => key(b).total_cmp(&key(a)).then_with(|| a[0].cmp(&b[0])),
    });
    let groups = clusters
        .into_iter()
        .take(3)
        .enumerate()
        .map(|(n, members)| Group {
            label: format!("cluster {}", n + 1),
            members: members
                .iter()
                .map(|&i| vectors[i].article_id.clone())
                .collect(),
            representative: None,
        })
        .collect();
    BiasGrouping {
        method: GroupingMethod::All,
        groups,
        mfa_person_id: None,
    }
}

/// Groups by outlet orientation. Unknown orientation goes to the center.
pub fn group_polsides(topic: &Topic) -> BiasGrouping {
    let mut groups = vec![
        Group::new("left"),
        Group::new("center"),
        Group::new("right"),
    ];
    for a in &topic.articles {
        let g = match a.outlet_orientation {
            Orientation::Left => 0,
            Orientation::Center | Orientation::Unknown => 1,
            Orientation::Right => 2,
        };
        groups[g].members.push(a.id.clone());
    }
    BiasGrouping {
        method: GroupingMethod::PolSides,
        groups,
        mfa_person_id: None,
    }
}

/// Uniform random assignment of each article to one of three groups.
pub fn group_random(topic: &Topic, seed: u64) -> BiasGrouping {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut groups: Vec<Group> = (1..=3)
        .map(|n| Group::new(format!("Perspective {n}")))
        .collect();
    for a in &topic.articles {
        groups[rng.random_range(0..3)].members.push(a.id.clone());
    }
    BiasGrouping {
        method: GroupingMethod::Random,
        groups,
        mfa_person_id: None,
    }
}

/// Member closest to the group centroid; ties go to higher relevance, then
/// to the smaller id. `None` for an empty group.
pub fn representative_article(
    members: &[String],
    vectors: &BTreeMap<&str, &ArticleVector>,
    relevance: &BTreeMap<String, Similarity>,
) -> Option<String> {
    const EPS: f64 = 1e-12;
    let pts: Vec<&[f64]> = members
        .iter()
        .filter_map(|m| vectors.get(m.as_str()).map(|v| v.scores.as_slice()))
        .collect();
    let c = centroid(&pts);
    let score = |id: &str| relevance.get(id).map_or(0.0, |s| s.score);
    let dist = |id: &str| {
        vectors
            .get(id)
            .map_or(f64::INFINITY, |v| sq_dist(&v.scores, &c).sqrt())
    };
    members
        .iter()
        .min_by(|a, b| {
            let (da, db) = (dist(a), dist(b));
            if (da - db).abs() > EPS {
                return da.total_cmp(&db);
            }
            score(b).total_cmp(&score(a)).then_with(|| a.cmp(b))
        })
        .cloned()
}

pub fn assign_representatives(
    grouping: &mut BiasGrouping,
    vectors: &[ArticleVector],
    relevance: &BTreeMap<String, Similarity>,
) {
    let by_id: BTreeMap<&str, &ArticleVector> =
        vectors.iter().map(|v| (v.article_id.as_str(), v)).collect();
    for g in &mut grouping.groups {
        g.representative = representative_article(&g.members, &by_id, relevance);
    }
}

/// Sum of word-token vectors and the number of in-vocabulary tokens.
fn token_sum(
    article: &Article,
    emb: &dyn EmbeddingProvider,
) -> Result<(Vec<f64>, usize), EmbeddingError> {
    let mut sum = vec![0.0; emb.dimension()];
    let mut n = 0;
    for t in article.tokens.iter().filter(|t| t.is_word()) {
        if let Some(v) = emb.lookup(&t.surface.to_lowercase())? {
            if v.len() != sum.len() {
                return Err(EmbeddingError::Provider(format!(
                    "vector for `{}` has dimension {}, expected {}",
                    t.surface,
                    v.len(),
                    sum.len()
                )));
            }
            sum.iter_mut().zip(&v).for_each(|(s, x)| *s += x);
            n += 1;
        }
    }
    Ok((sum, n))
}

fn scaled(sum: &[f64], n: usize) -> Vec<f64> {
    sum.iter().map(|s| s / n as f64).collect()
}

/// Mapped cosine between each article's mean token vector and the mean
/// token vector of `reference` (all of their word tokens pooled).
pub fn relevance_against(
    articles: &[&Article],
    reference: &[&Article],
    emb: &dyn EmbeddingProvider,
) -> Result<BTreeMap<String, Similarity>, EmbeddingError> {
    let mut pooled = vec![0.0; emb.dimension()];
    let mut pooled_n = 0;
    for a in reference {
        let (s, n) = token_sum(a, emb)?;
        pooled.iter_mut().zip(&s).for_each(|(p, x)| *p += x);
        pooled_n += n;
    }
    let reference_vec = (pooled_n > 0).then(|| scaled(&pooled, pooled_n));
    let mut out = BTreeMap::new();
    for a in articles {
        let (s, n) = token_sum(a, emb)?;
        let sim = match (&reference_vec, n) {
            (Some(r), n) if n > 0 => Similarity {
                score: (cosine(&scaled(&s, n), r) + 1.0) / 2.0,
                oov: false,
            },
            _ => Similarity::oov(),
        };
        out.insert(a.id.clone(), sim);
    }
    Ok(out)
}

pub fn relevance_score(
    article: &Article,
    topic: &Topic,
    emb: &dyn EmbeddingProvider,
) -> Result<Similarity, EmbeddingError> {
    let all: Vec<&Article> = topic.articles.iter().collect();
    Ok(relevance_against(&[article], &all, emb)?[&article.id])
}

/// Relevance of every article to the whole topic.
pub fn topic_relevance(
    topic: &Topic,
    emb: &dyn EmbeddingProvider,
) -> Result<BTreeMap<String, Similarity>, EmbeddingError> {
    let all: Vec<&Article> = topic.articles.iter().collect();
    relevance_against(&all, &all, emb)
}
