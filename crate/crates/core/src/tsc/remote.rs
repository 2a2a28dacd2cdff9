use std::ops::Range;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{ClassifierMode, Polarity, PolarityLabel, SentimentClassifier};

/// Body POSTed to a remote classifier. Offsets are bytes into `sentence`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyRequest {
    pub sentence: String,
    pub target_char_start: usize,
    pub target_char_end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyResponse {
    pub label: Polarity,
    pub confidence: f64,
}

#[derive(Debug, Clone)]
pub struct RemoteClassifier {
    endpoint: String,
    agent: ureq::Agent,
}

impl RemoteClassifier {
    pub fn new(endpoint: impl Into<String>, timeout: Duration) -> Self {
        RemoteClassifier {
            endpoint: endpoint.into(),
            agent: ureq::Agent::config_builder()
                .timeout_global(Some(timeout))
                .build()
                .into(),
        }
    }
}

impl SentimentClassifier for RemoteClassifier {
    fn name(&self) -> &str {
        "remote"
    }

    fn mode(&self) -> ClassifierMode {
        ClassifierMode::Remote
    }

    fn classify(&self, sentence: &str, target: Range<usize>) -> Result<PolarityLabel, String> {
        let req = ClassifyRequest {
            sentence: sentence.to_string(),
            target_char_start: target.start,
            target_char_end: target.end,
        };
        let resp: ClassifyResponse = self
            .agent
            .post(&self.endpoint)
            .send_json(&req)
            .map_err(|e| e.to_string())?
            .body_mut()
            .read_json()
            .map_err(|e| e.to_string())?;
        if !(0.0..=1.0).contains(&resp.confidence) {
            return Err(format!("confidence {} outside [0, 1]", resp.confidence));
        }
        Ok(PolarityLabel::new(resp.label, resp.confidence))
    }
}
