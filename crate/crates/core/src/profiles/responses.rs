use std::collections::HashSet;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ConjointProfile;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum QuestionKind {
    Scale {
        min: i64,
        max: i64,
        #[serde(default)]
        low: String,
        #[serde(default)]
        high: String,
    },
    Choice {
        options: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub id: String,
    pub stage: String,
    pub text: String,
    pub kind: QuestionKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Questionnaire {
    pub questions: Vec<Question>,
}

impl Questionnaire {
    pub fn builtin() -> Self {
        serde_json::from_str(include_str!("../../data/questionnaire.json"))
            .expect("bundled questionnaire parses")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ResponseError> {
        let raw = std::fs::read_to_string(path)?;
        serde_json::from_str(&raw).map_err(|e| ResponseError::Parse(e.to_string()))
    }

    pub fn question(&self, id: &str) -> Option<&Question> {
        self.questions.iter().find(|q| q.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Answer {
    Scale(i64),
    Choice(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResponseRecord {
    pub respondent_id: String,
    pub profile: ConjointProfile,
    pub question_id: String,
    pub answer: Answer,
    pub timestamp: DateTime<Utc>,
}

impl ResponseRecord {
    fn key(&self) -> (String, String, u8) {
        (
            self.respondent_id.clone(),
            self.question_id.clone(),
            self.profile.task_set_index,
        )
    }
}

#[derive(Debug, Error)]
pub enum ResponseError {
    #[error("response storage failed: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed response data: {0}")]
    Parse(String),
    #[error("unknown question `{0}`")]
    UnknownQuestion(String),
    #[error("answer to `{question_id}` is invalid: {message}")]
    InvalidAnswer {
        question_id: String,
        message: String,
    },
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("respondent `{respondent_id}` already answered `{question_id}` in task set {task_set_index}")]
    Duplicate {
        respondent_id: String,
        question_id: String,
        task_set_index: u8,
    },
}

/// Respondent, question, and task set of a stored answer.
type RecordKey = (String, String, u8);

/// Append-only JSON-lines log of questionnaire answers.
#[derive(Debug)]
pub struct ResponseStore {
    path: PathBuf,
    questionnaire: Questionnaire,
    state: Mutex<(File, HashSet<RecordKey>)>,
}

impl ResponseStore {
    /// Opens (or creates) the log at `path`, indexing records already in it.
    pub fn open(
        path: impl Into<PathBuf>,
        questionnaire: Questionnaire,
    ) -> Result<Self, ResponseError> {
        let path = path.into();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .read(true)
            .open(&path)?;
        let keys = read_records(&path)?
            .iter()
            .map(ResponseRecord::key)
            .collect();
        Ok(ResponseStore {
            path,
            questionnaire,
            state: Mutex::new((file, keys)),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn questionnaire(&self) -> &Questionnaire {
        &self.questionnaire
    }

    pub fn validate(&self, record: &ResponseRecord) -> Result<(), ResponseError> {
        record
            .profile
            .check_invariants()
            .map_err(ResponseError::InvalidProfile)?;
        let q = self
            .questionnaire
            .question(&record.question_id)
            .ok_or_else(|| ResponseError::UnknownQuestion(record.question_id.clone()))?;
        let invalid = |message: String| ResponseError::InvalidAnswer {
            question_id: q.id.clone(),
            message,
        };
        match (&q.kind, &record.answer) {
            (QuestionKind::Scale { min, max, .. }, Answer::Scale(v)) => {
                if v < min || v > max {
                    return Err(invalid(format!("{v} outside {min}..={max}")));
                }
            }
            (QuestionKind::Choice { options }, Answer::Choice(c)) => {
                if !options.contains(c) {
                    return Err(invalid(format!("`{c}` is not one of {options:?}")));
                }
            }
            (QuestionKind::Scale { .. }, _) => return Err(invalid("expected a number".into())),
            (QuestionKind::Choice { .. }, _) => {
                return Err(invalid("expected one of the options".into()))
            }
        }
        Ok(())
    }

    /// Validates and appends `record`. Returns the line that was written.
    pub fn log_response(&self, record: &ResponseRecord) -> Result<String, ResponseError> {
        self.validate(record)?;
        let line =
            serde_json::to_string(record).map_err(|e| ResponseError::Parse(e.to_string()))?;
        let mut guard = self.state.lock().unwrap_or_else(|p| p.into_inner());
        let key = record.key();
        if guard.1.contains(&key) {
            return Err(ResponseError::Duplicate {
                respondent_id: key.0,
                question_id: key.1,
                task_set_index: key.2,
            });
        }
        writeln!(guard.0, "{line}")?;
        guard.0.flush()?;
        guard.1.insert(key);
        Ok(line)
    }

    pub fn all(&self) -> Result<Vec<ResponseRecord>, ResponseError> {
        let _guard = self.state.lock().unwrap_or_else(|p| p.into_inner());
        read_records(&self.path)
    }

    pub fn by_respondent(&self, respondent_id: &str) -> Result<Vec<ResponseRecord>, ResponseError> {
        Ok(self
            .all()?
            .into_iter()
            .filter(|r| r.respondent_id == respondent_id)
            .collect())
    }

    pub fn by_profile(
        &self,
        profile: &ConjointProfile,
    ) -> Result<Vec<ResponseRecord>, ResponseError> {
        Ok(self
            .all()?
            .into_iter()
            .filter(|r| &r.profile == profile)
            .collect())
    }
}

fn read_records(path: &Path) -> Result<Vec<ResponseRecord>, ResponseError> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    BufReader::new(File::open(path)?)
        .lines()
        .enumerate()
        .filter(|(_, l)| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
        .map(|(n, l)| {
            serde_json::from_str(&l?)
                .map_err(|e| ResponseError::Parse(format!("line {}: {e}", n + 1)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::{randomize_profile, ProfileConstraints};

    fn record(question: &str, answer: Answer) -> ResponseRecord {
        ResponseRecord {
            respondent_id: "r1".into(),
            profile: randomize_profile(
                4,
                &ProfileConstraints {
                    task_set_index: Some(1),
                    ..Default::default()
                },
            )
            .unwrap(),
            question_id: question.into(),
            answer,
            timestamp: "2024-05-01T12:00:00Z".parse().unwrap(),
        }
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("responses.jsonl");
        let store = ResponseStore::open(&path, Questionnaire::builtin()).unwrap();
        let rec = record("art_fair", Answer::Scale(7));
        let line = store.log_response(&rec).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), format!("{line}\n"));
        assert_eq!(store.by_respondent("r1").unwrap(), vec![rec.clone()]);
        assert_eq!(store.by_profile(&rec.profile).unwrap().len(), 1);
        assert_eq!(
            serde_json::to_string(&store.all().unwrap()[0]).unwrap(),
            line
        );
    }

    #[test]
    fn scale_and_choice_validation() {
        let dir = tempfile::tempdir().unwrap();
        let store =
            ResponseStore::open(dir.path().join("r.jsonl"), Questionnaire::builtin()).unwrap();
        assert!(matches!(
            store.log_response(&record("art_fair", Answer::Scale(11))),
            Err(ResponseError::InvalidAnswer { .. })
        ));
        assert!(matches!(
            store.log_response(&record(
                "art_political_bias",
                Answer::Choice("maybe".into())
            )),
            Err(ResponseError::InvalidAnswer { .. })
        ));
        assert!(matches!(
            store.log_response(&record("nope", Answer::Scale(1))),
            Err(ResponseError::UnknownQuestion(_))
        ));
        store
            .log_response(&record("art_political_bias", Answer::Choice("yes".into())))
            .unwrap();
    }

    #[test]
    fn duplicates_rejected_across_reopen() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.jsonl");
        let store = ResponseStore::open(&path, Questionnaire::builtin()).unwrap();
        store
            .log_response(&record("art_fair", Answer::Scale(3)))
            .unwrap();
        assert!(matches!(
            store.log_response(&record("art_fair", Answer::Scale(4))),
            Err(ResponseError::Duplicate { .. })
        ));
        drop(store);
        let store = ResponseStore::open(&path, Questionnaire::builtin()).unwrap();
        assert!(matches!(
            store.log_response(&record("art_fair", Answer::Scale(5))),
            Err(ResponseError::Duplicate { .. })
        ));
        assert_eq!(store.all().unwrap().len(), 1);
    }
}
