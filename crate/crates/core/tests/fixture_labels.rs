use std::collections::BTreeMap;
use std::path::PathBuf;

use biaslens_core::ingest::load_topic;
use biaslens_core::service::{analyze_topic, Engine, EngineConfig};
use biaslens_core::tsc::Polarity;
use serde::Deserialize;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

#[derive(Deserialize)]
struct Sheet {
    articles: BTreeMap<String, Vec<(String, Polarity)>>,
}

#[test]
fn builtin_labels_match_hand_sheet() {
    let topic = load_topic(fixture("topic_barr_letter.json")).unwrap();
    let sheet: Sheet =
        serde_json::from_str(&std::fs::read_to_string(fixture("polarity_sheet.json")).unwrap())
            .unwrap();
    let analysis = analyze_topic(&topic, &Engine::new(EngineConfig::default()).unwrap()).unwrap();
    let mut got: BTreeMap<String, Vec<(String, Polarity)>> = BTreeMap::new();
    for l in &analysis.labels {
        got.entry(l.article_id.clone())
            .or_default()
            .push((l.surface.clone(), l.label.value));
    }
    for (article, expected) in &sheet.articles {
        assert_eq!(got.get(article), Some(expected), "article {article}");
    }
    assert_eq!(got.len(), sheet.articles.len());
}
