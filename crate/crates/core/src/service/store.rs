use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ServiceError, TopicAnalysis};
use crate::ingest::{parse_topic, Topic, TopicInput};

/// Short listing entry for a stored topic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicSummary {
    pub topic_id: String,
    pub event_description: String,
    pub article_count: usize,
    /// Config hashes of the stored analyses.
    pub analyses: Vec<String>,
}

/// File-per-topic store:
///
/// ```text
/// <root>/topics/<topic_id>.json
/// <root>/analyses/<topic_id>/<engine_config_hash>.json
/// <root>/responses.jsonl
/// ```
#[derive(Debug, Clone)]
pub struct TopicStore {
    root: PathBuf,
}

pub fn validate_id(id: &str) -> Result<(), ServiceError> {
    let ok = !id.is_empty()
        && id.len() <= 128
        && !id.starts_with('.')
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok {
        Ok(())
    } else {
        Err(ServiceError::Invalid(format!("`{id}` is not a valid id")))
    }
}

fn write_atomic(path: &Path, contents: &str) -> Result<(), ServiceError> {
    let dir = path.parent().expect("store paths have parents");
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().and_then(|f| f.to_str()).unwrap_or("file")
    ));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Canonical export text of an analysis.
pub fn export_json(analysis: &TopicAnalysis) -> String {
    let mut s = serde_json::to_string_pretty(analysis).expect("analysis serialises");
    s.push('\n');
    s
}

/// Parses and checks an exported analysis.
pub fn parse_analysis(json: &str) -> Result<TopicAnalysis, ServiceError> {
    let de = &mut serde_json::Deserializer::from_str(json);
    let analysis: TopicAnalysis = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ServiceError::Invalid(format!("{path}: {}", e.inner()))
    })?;
    analysis
        .check_consistency()
        .map_err(ServiceError::Invalid)?;
    Ok(analysis)
}

impl TopicStore {
    pub fn open(root: impl Into<PathBuf>) -> Result<Self, ServiceError> {
        let root = root.into();
        fs::create_dir_all(root.join("topics"))?;
        fs::create_dir_all(root.join("analyses"))?;
        Ok(TopicStore { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn responses_path(&self) -> PathBuf {
        self.root.join("responses.jsonl")
    }

    fn topic_path(&self, id: &str) -> PathBuf {
        self.root.join("topics").join(format!("{id}.json"))
    }

    fn analysis_dir(&self, id: &str) -> PathBuf {
        self.root.join("analyses").join(id)
    }

    pub fn save_topic(&self, topic: &TopicInput) -> Result<(), ServiceError> {
        validate_id(&topic.topic_id)?;
        let json = serde_json::to_string_pretty(topic).expect("topic serialises");
        write_atomic(&self.topic_path(&topic.topic_id), &json)
    }

    pub fn load_topic(&self, id: &str) -> Result<Topic, ServiceError> {
        validate_id(id)?;
        let path = self.topic_path(id);
        if !path.exists() {
            return Err(ServiceError::NotFound(format!("topic `{id}`")));
        }
        parse_topic(&fs::read_to_string(path)?).map_err(|e| ServiceError::Invalid(e.to_string()))
    }

    pub fn list_topics(&self) -> Result<Vec<TopicSummary>, ServiceError> {
        let mut out = Vec::new();
        for entry in fs::read_dir(self.root.join("topics"))? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let Some(id) = path.file_stem().and_then(|s| s.to_str()) else {
                continue;
            };
            let topic = self.load_topic(id)?;
            out.push(TopicSummary {
                topic_id: topic.topic_id.clone(),
                event_description: topic.event_description.clone(),
                article_count: topic.articles.len(),
                analyses: self.analysis_hashes(id)?,
            });
        }
        out.sort_by(|a, b| a.topic_id.cmp(&b.topic_id));
        Ok(out)
    }

    fn analysis_hashes(&self, id: &str) -> Result<Vec<String>, ServiceError> {
        let dir = self.analysis_dir(id);
        if !dir.exists() {
            return Ok(Vec::new());
        }
        let mut hashes = Vec::new();
        for entry in fs::read_dir(dir)? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) == Some("json") {
                if let Some(h) = path.file_stem().and_then(|s| s.to_str()) {
                    hashes.push(h.to_string());
                }
            }
        }
        hashes.sort();
        Ok(hashes)
    }

    /// Stores the analysis and its topic.
    pub fn save_analysis(&self, analysis: &TopicAnalysis) -> Result<(), ServiceError> {
        validate_id(analysis.topic_id())?;
        validate_id(&analysis.engine_config_hash)?;
        self.save_topic(&analysis.topic)?;
        let path = self
            .analysis_dir(analysis.topic_id())
            .join(format!("{}.json", analysis.engine_config_hash));
        write_atomic(&path, &export_json(analysis))
    }

    /// The analysis for `hash`, or without a hash the most recently created one.
    pub fn load_analysis(
        &self,
        id: &str,
        hash: Option<&str>,
    ) -> Result<TopicAnalysis, ServiceError> {
        validate_id(id)?;
        let not_found = || ServiceError::NotFound(format!("analysis of topic `{id}`"));
        let read = |h: &str| -> Result<TopicAnalysis, ServiceError> {
            let path = self.analysis_dir(id).join(format!("{h}.json"));
            if !path.exists() {
                return Err(not_found());
            }
            parse_analysis(&fs::read_to_string(path)?)
        };
        match hash {
            Some(h) => {
                validate_id(h)?;
                read(h)
            }
            None => {
                let mut best: Option<TopicAnalysis> = None;
                for h in self.analysis_hashes(id)? {
                    let a = read(&h)?;
                    if best.as_ref().is_none_or(|b| a.created_at > b.created_at) {
                        best = Some(a);
                    }
                }
                best.ok_or_else(not_found)
            }
        }
    }

    pub fn export_topic(&self, id: &str, hash: Option<&str>) -> Result<String, ServiceError> {
        Ok(export_json(&self.load_analysis(id, hash)?))
    }

    pub fn import_analysis(&self, json: &str) -> Result<TopicAnalysis, ServiceError> {
        let analysis = parse_analysis(json)?;
        self.save_analysis(&analysis)?;
        Ok(analysis)
    }
}
