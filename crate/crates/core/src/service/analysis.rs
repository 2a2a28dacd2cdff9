use std::collections::{BTreeMap, BTreeSet};

use chrono::{DateTime, SecondsFormat, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Engine, ServiceError};
use crate::annotate::annotate_article;
use crate::cdcr::{extract_candidates, merge_sieves, PersonConcept};
use crate::embedding::Similarity;
use crate::grouping::{
    article_vectors, assign_representatives, find_mfa, group_all, group_mfa, group_polsides,
    group_random, person_index, ArticleVector, BiasGrouping, GroupingMethod,
};
use crate::ingest::{Topic, TopicInput};
use crate::tsc::{classify_topic, PolarityLabel};

pub const SCHEMA_VERSION: u32 = 1;
pub const NO_MFA: &str = "no-MFA";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledMention {
    pub article_id: String,
    pub char_start: usize,
    pub char_end: usize,
    pub person_id: String,
    pub surface: String,
    pub label: PolarityLabel,
}

/// Everything the overview and article views need for one topic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopicAnalysis {
    pub schema_version: u32,
    pub topic: TopicInput,
    pub concepts: Vec<PersonConcept>,
    /// Person ids backing each position of the article vectors.
    pub person_index: Vec<String>,
    pub mfa_person_id: Option<String>,
    pub labels: Vec<LabeledMention>,
    pub vectors: Vec<ArticleVector>,
    pub groupings: BTreeMap<GroupingMethod, BiasGrouping>,
    pub relevance: BTreeMap<String, Similarity>,
    pub flags: BTreeSet<String>,
    pub created_at: String,
    pub engine_config_hash: String,
}

impl TopicAnalysis {
    pub fn topic_id(&self) -> &str {
        &self.topic.topic_id
    }

    pub fn has_mfa(&self) -> bool {
        !self.flags.contains(NO_MFA)
    }

    pub fn mfa(&self) -> Option<&PersonConcept> {
        let id = self.mfa_person_id.as_deref()?;
        self.concepts.iter().find(|c| c.person_id == id)
    }

    pub fn vector(&self, article_id: &str) -> Option<&ArticleVector> {
        self.vectors.iter().find(|v| v.article_id == article_id)
    }

    /// Score of the MFA in each article, when there is an MFA.
    pub fn s_mfa(&self, article_id: &str) -> Option<f64> {
        let id = self.mfa_person_id.as_deref()?;
        let pos = self.person_index.iter().position(|p| p == id)?;
        self.vector(article_id).map(|v| v.scores[pos])
    }

    pub fn relevance_of(&self, article_id: &str) -> f64 {
        self.relevance.get(article_id).map_or(0.0, |s| s.score)
    }

    /// Random grouping for a seed, with representatives chosen as for the
    /// stored groupings.
    pub fn random_grouping(&self, seed: u64) -> Result<BiasGrouping, ServiceError> {
        let topic = Topic::from_input(self.topic.clone())
            .map_err(|e| ServiceError::Invalid(e.to_string()))?;
        let mut g = group_random(&topic, seed);
        assign_representatives(&mut g, &self.vectors, &self.relevance);
        Ok(g)
    }

    /// Cross-references between the parts of the analysis.
    pub fn check_consistency(&self) -> Result<(), String> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(format!(
                "unsupported schema_version {}",
                self.schema_version
            ));
        }
        let topic = Topic::from_input(self.topic.clone()).map_err(|e| e.to_string())?;
        let ids: BTreeSet<&str> = topic.articles.iter().map(|a| a.id.as_str()).collect();
        let persons: BTreeSet<&str> = self.concepts.iter().map(|c| c.person_id.as_str()).collect();
        for c in &self.concepts {
            let total: usize = c.chains.iter().map(|ch| ch.mentions.len()).sum();
            if total != c.mention_count {
                return Err(format!(
                    "{}: mention_count {} != {total}",
                    c.person_id, c.mention_count
                ));
            }
            if let Some(a) = c
                .per_article_mentions
                .keys()
                .find(|a| !ids.contains(a.as_str()))
            {
                return Err(format!("{} mentions unknown article {a}", c.person_id));
            }
        }
        if let Some(p) = self
            .person_index
            .iter()
            .find(|p| !persons.contains(p.as_str()))
        {
            return Err(format!("person index names unknown person {p}"));
        }
        if let Some(m) = &self.mfa_person_id {
            if !persons.contains(m.as_str()) {
                return Err(format!("unknown MFA {m}"));
            }
        }
        for l in &self.labels {
            if !ids.contains(l.article_id.as_str()) || !persons.contains(l.person_id.as_str()) {
                return Err(format!(
                    "label at {}@{} references unknown data",
                    l.article_id, l.char_start
                ));
            }
            if !l.label.is_consistent() {
                return Err(format!(
                    "inconsistent label at {}@{}",
                    l.article_id, l.char_start
                ));
            }
        }
        let vec_ids: BTreeSet<&str> = self.vectors.iter().map(|v| v.article_id.as_str()).collect();
        if vec_ids != ids
            || self
                .vectors
                .iter()
                .any(|v| v.scores.len() != self.person_index.len())
        {
            return Err("article vectors do not match the topic".into());
        }
        let rel_ids: BTreeSet<&str> = self.relevance.keys().map(String::as_str).collect();
        if rel_ids != ids {
            return Err("relevance map does not cover the topic".into());
        }
        for (method, g) in &self.groupings {
            if g.method != *method {
                return Err(format!(
                    "grouping stored under {method:?} has method {:?}",
                    g.method
                ));
            }
            g.check_partition(ids.iter().copied())
                .map_err(|e| format!("{method:?} grouping: {e}"))?;
        }
        Ok(())
    }
}

fn stage(stage: &'static str, article_id: Option<&str>, message: impl ToString) -> ServiceError {
    ServiceError::Stage {
        stage,
        article_id: article_id.map(str::to_string),
        message: message.to_string(),
    }
}

pub fn analyze_topic(topic: &Topic, engine: &Engine) -> Result<TopicAnalysis, ServiceError> {
    analyze_topic_at(topic, engine, Utc::now())
}

/// Runs annotation, person resolution, sentiment, and grouping.
pub fn analyze_topic_at(
    topic: &Topic,
    engine: &Engine,
    created_at: DateTime<Utc>,
) -> Result<TopicAnalysis, ServiceError> {
    let cfg = &engine.config;
    let annotations = topic
        .articles
        .par_iter()
        .map(|a| annotate_article(a, engine.annotator.as_ref()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| stage("annotate", Some(e.article_id()), &e))?;

    let candidates = extract_candidates(&annotations);
    let resolved = if candidates.is_empty() {
        Vec::new()
    } else {
        merge_sieves(&candidates, &cfg.sieves, Some(engine.embeddings.as_ref()))
            .map_err(|e| stage("cdcr", None, e))?
            .concepts
    };
    let concepts: Vec<PersonConcept> = resolved
        .into_iter()
        .filter(|c| c.ner_type == crate::annotate::NerType::Person)
        .collect();

    let tsc = classify_topic(topic, &concepts, engine.classifier.as_ref());
    if let Some(e) = tsc.errors.first() {
        let article = match e {
            crate::tsc::TscError::Classifier { article_id, .. }
            | crate::tsc::TscError::OutsideSentence { article_id, .. } => Some(article_id.as_str()),
            crate::tsc::TscError::UnknownArticle(a) => Some(a.as_str()),
        };
        return Err(stage("tsc", article, e));
    }
    let mut labels = Vec::with_capacity(tsc.len());
    for c in &concepts {
        for m in c.mentions() {
            let label = *tsc.get(m).expect("classification is total without errors");
            labels.push(LabeledMention {
                article_id: m.article_id.clone(),
                char_start: m.char_start,
                char_end: m.char_end,
                person_id: c.person_id.clone(),
                surface: m.surface.clone(),
                label,
            });
        }
    }
    labels.sort_by(|a, b| {
        (a.article_id.as_str(), a.char_start, a.char_end).cmp(&(
            b.article_id.as_str(),
            b.char_start,
            b.char_end,
        ))
    });

    let relevance = crate::grouping::topic_relevance(topic, engine.embeddings.as_ref())
        .map_err(|e| stage("relevance", None, e))?;

    let index = person_index(&concepts, cfg.grouping.person_limit);
    let vectors = article_vectors(
        topic,
        &concepts,
        &index,
        &tsc,
        &cfg.grouping.position_weight,
    );

    let mut groupings = BTreeMap::new();
    let mut flags = BTreeSet::new();
    let mfa = find_mfa(&concepts).ok();
    match mfa {
        Some(p) => {
            let pos = index
                .iter()
                .position(|id| *id == p.person_id)
                .expect("MFA is the top person");
            groupings.insert(
                GroupingMethod::Mfa,
                group_mfa(
                    &vectors,
                    pos,
                    &p.person_id,
                    &p.canonical_name,
                    cfg.grouping.mfa_threshold,
                ),
            );
            groupings.insert(
                GroupingMethod::All,
                group_all(&vectors, cfg.grouping.k, cfg.grouping.kmeans_seed),
            );
        }
        None => {
            flags.insert(NO_MFA.to_string());
        }
    }
    groupings.insert(GroupingMethod::PolSides, group_polsides(topic));
    for g in groupings.values_mut() {
        assign_representatives(g, &vectors, &relevance);
    }

    let analysis = TopicAnalysis {
        schema_version: SCHEMA_VERSION,
        topic: topic.to_input(),
        mfa_person_id: mfa.map(|p| p.person_id.clone()),
        concepts,
        person_index: index,
        labels,
        vectors,
        groupings,
        relevance,
        flags,
        created_at: created_at.to_rfc3339_opts(SecondsFormat::Secs, true),
        engine_config_hash: cfg.hash(),
    };
    analysis
        .check_consistency()
        .map_err(|e| stage("grouping", None, e))?;
    Ok(analysis)
}
