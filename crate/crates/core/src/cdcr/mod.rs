//! Cross-document person resolution.
//!
//! Candidate chains (within-document chains plus noun-phrase singletons) are
//! merged by a cascade of six pairwise sieves. Each sieve links pairs of
//! candidate chains of the same entity type; links are closed transitively
//! with a union-find, so a sieve can only merge and the result never depends
//! on the order in which pairs are visited.

mod sieves;
mod union_find;

pub use sieves::{chain_similarity, Sieve, SieveConfig};
pub use union_find::UnionFind;

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotate::{ArticleAnnotation, ChainSource, Mention, MentionChain, NerType};
use crate::embedding::{EmbeddingError, EmbeddingProvider};

#[derive(Debug, Error)]
pub enum CdcrError {
    #[error("sieve {0:?} needs an embedding provider")]
    EmbeddingsUnavailable(Sieve),
    #[error("embedding lookup failed in sieve {sieve:?}: {source}")]
    Embedding {
        sieve: Sieve,
        #[source]
        source: EmbeddingError,
    },
    #[error("invalid sieve configuration: {0}")]
    Config(String),
}

/// A resolved concept: one or more candidate chains judged coreferent.
///
/// The pipeline keeps only person-typed concepts; other concepts appear in
/// the cascade output so that it partitions every candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersonConcept {
    pub person_id: String,
    pub canonical_name: String,
    pub ner_type: NerType,
    pub chains: Vec<MentionChain>,
    pub mention_count: usize,
    pub per_article_mentions: BTreeMap<String, Vec<Mention>>,
}

impl PersonConcept {
    pub fn mentions(&self) -> impl Iterator<Item = &Mention> {
        self.chains.iter().flat_map(|c| &c.mentions)
    }

    pub fn mentions_in(&self, article_id: &str) -> &[Mention] {
        self.per_article_mentions
            .get(article_id)
            .map_or(&[], Vec::as_slice)
    }
}

/// Which sieve joined two previously separate clusters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeRecord {
    pub sieve: Sieve,
    pub left: String,
    pub right: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdcrOutput {
    pub concepts: Vec<PersonConcept>,
    pub merges: Vec<MergeRecord>,
}

impl CdcrOutput {
    pub fn persons(&self) -> impl Iterator<Item = &PersonConcept> {
        self.concepts
            .iter()
            .filter(|c| c.ner_type == NerType::Person)
    }

    /// Sieve that merged the clusters holding chains `a` and `b`, if any
    /// single merge directly joined them.
    pub fn merged_by(&self, a: &str, b: &str) -> Option<Sieve> {
        self.merges
            .iter()
            .find(|m| (m.left == a && m.right == b) || (m.left == b && m.right == a))
            .map(|m| m.sieve)
    }
}

/// Union of within-document chains and noun-phrase singletons.
///
/// A singleton is dropped when its span equals a chain mention span or when
/// it shares a chain mention's head token.
pub fn extract_candidates(annotations: &[ArticleAnnotation]) -> Vec<MentionChain> {
    let mut out = Vec::new();
    for ann in annotations {
        let spans: HashSet<(usize, usize)> = ann
            .chains
            .iter()
            .flat_map(|c| c.mentions.iter().map(Mention::span))
            .collect();
        let heads: HashSet<usize> = ann
            .chains
            .iter()
            .flat_map(|c| c.mentions.iter().map(|m| m.head_start))
            .collect();
        out.extend(ann.chains.iter().cloned());
        out.extend(
            ann.np_singletons
                .iter()
                .filter(|np| {
                    debug_assert_eq!(np.source, ChainSource::NpSingleton);
                    np.mentions
                        .iter()
                        .all(|m| !spans.contains(&m.span()) && !heads.contains(&m.head_start))
                })
                .cloned(),
        );
    }
    out
}

/// Runs the sieve cascade over `candidates`.
///
/// Sieves 2 and 6 need `embeddings`; the others work without them.
pub fn merge_sieves(
    candidates: &[MentionChain],
    config: &SieveConfig,
    embeddings: Option<&dyn EmbeddingProvider>,
) -> Result<CdcrOutput, CdcrError> {
    config.validate().map_err(CdcrError::Config)?;
    let features = sieves::Features::build(candidates, config, embeddings)?;
    let mut uf = UnionFind::new(candidates.len());
    let mut merges = Vec::new();

    for sieve in Sieve::ALL {
        if !config.enabled(sieve) {
            continue;
        }
        for (a, b) in features.links(sieve, config) {
            if uf.union(a, b) {
                merges.push(MergeRecord {
                    sieve,
                    left: candidates[a].chain_id.clone(),
                    right: candidates[b].chain_id.clone(),
                });
            }
        }
    }

    Ok(CdcrOutput {
        concepts: build_concepts(candidates, uf.groups()),
        merges,
    })
}

fn build_concepts(candidates: &[MentionChain], groups: Vec<Vec<usize>>) -> Vec<PersonConcept> {
    let mut concepts: Vec<PersonConcept> = groups
        .into_iter()
        .map(|members| {
            let mut chains: Vec<MentionChain> =
                members.iter().map(|&i| candidates[i].clone()).collect();
            chains.sort_by(|a, b| a.chain_id.cmp(&b.chain_id));
            let largest = chains
                .iter()
                .max_by(|a, b| {
                    a.mentions
                        .len()
                        .cmp(&b.mentions.len())
                        .then_with(|| b.chain_id.cmp(&a.chain_id))
                })
                .expect("groups are non-empty");
            let canonical_name = largest.representative.clone();
            let ner_type = largest.ner_type();
            let mut per_article: BTreeMap<String, Vec<Mention>> = BTreeMap::new();
            for m in chains.iter().flat_map(|c| &c.mentions) {
                per_article
                    .entry(m.article_id.clone())
                    .or_default()
                    .push(m.clone());
            }
            per_article.values_mut().for_each(|v| v.sort());
            PersonConcept {
                person_id: String::new(),
                canonical_name,
                ner_type,
                mention_count: chains.iter().map(|c| c.mentions.len()).sum(),
                chains,
                per_article_mentions: per_article,
            }
        })
        .collect();

    concepts.sort_by(|a, b| {
        b.mention_count
            .cmp(&a.mention_count)
            .then_with(|| a.canonical_name.cmp(&b.canonical_name))
            .then_with(|| a.chains[0].chain_id.cmp(&b.chains[0].chain_id))
    });
    let (mut persons, mut others) = (0, 0);
    for c in &mut concepts {
        c.person_id = match c.ner_type {
            NerType::Person => {
                persons += 1;
                format!("p{}", persons - 1)
            }
            NerType::Other => {
                others += 1;
                format!("o{}", others - 1)
            }
        };
    }
    concepts
}
