use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use biaslens_core::grouping::GroupingMethod;
use biaslens_core::ingest::{load_topic, parse_topic, Topic};
use biaslens_core::profiles::{
    randomize_profile, ConjointProfile, ExplanationMode, HighlightMode, OverviewVariant,
    ProfileConstraints, TagKind,
};
use biaslens_core::service::{
    analyze_topic_at, export_json, get_article_view, get_overview, parse_analysis, Engine,
    EngineConfig, Explanations, ServiceError, TopicAnalysis, TopicStore, NO_MFA,
};
use biaslens_core::tsc::Polarity;
use chrono::{TimeZone, Utc};
use proptest::prelude::*;
use serde::Deserialize;
use serde_json::json;

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn repo_path(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .join(rel)
}

fn analyze(topic: &Topic) -> TopicAnalysis {
    let engine = Engine::new(EngineConfig::default()).unwrap();
    analyze_topic_at(
        topic,
        &engine,
        Utc.with_ymd_and_hms(2026, 1, 2, 3, 4, 5).unwrap(),
    )
    .unwrap()
}

fn fixture() -> TopicAnalysis {
    analyze(&load_topic(fixture_path("topic_barr_letter.json")).unwrap())
}

fn profile(
    variant: OverviewVariant,
    mode: Option<ExplanationMode>,
    highlight: HighlightMode,
) -> ConjointProfile {
    ConjointProfile {
        overview_variant: variant,
        headline_tags: if variant == OverviewVariant::None {
            BTreeSet::new()
        } else {
            [TagKind::Polsides, TagKind::Mfap].into()
        },
        explanation_mode: mode,
        highlight_mode: highlight,
        show_context_bar: true,
        show_bias_group_indicators: TagKind::ALL.into(),
        topic_id: String::new(),
        task_set_index: 1,
        seed: 7,
    }
}

fn tiny_topic(id: &str, bodies: &[(&str, &str)]) -> Topic {
    let articles: Vec<_> = bodies
        .iter()
        .map(|(aid, body)| {
            json!({"id": aid, "outlet_name": "Wire", "outlet_orientation": "left",
                   "title": "Weather report", "lead": "Rain is expected.", "body": body})
        })
        .collect();
    parse_topic(&json!({"topic_id": id, "event_description": "", "articles": articles}).to_string())
        .unwrap()
}

#[test]
fn fixture_analysis_matches_hand_counts() {
    let a = fixture();
    // Mentions per person, counted by hand from the fixture text.
    let expected: BTreeMap<&str, usize> = [
        ("President Trump", 24),
        ("Attorney General William Barr", 20),
        ("Mueller", 14),
        ("Speaker Nancy Pelosi", 14),
        ("Adam Schiff", 6),
        ("Jerrold Nadler", 4),
        ("The attorney general", 2),
        ("Mitch McConnell", 1),
        ("Rod Rosenstein", 1),
        ("Senator Chuck Schumer", 1),
        ("Senator Lindsey Graham", 1),
        ("the president", 1),
    ]
    .into();
    let got: BTreeMap<&str, usize> = a
        .concepts
        .iter()
        .filter(|c| c.ner_type == biaslens_core::annotate::NerType::Person)
        .map(|c| (c.canonical_name.as_str(), c.mention_count))
        .collect();
    assert_eq!(got, expected);
    assert_eq!(a.mfa().unwrap().canonical_name, "President Trump");
    assert!(a.flags.is_empty());
    assert_eq!(a.relevance.len(), 10);
    for method in [
        GroupingMethod::Mfa,
        GroupingMethod::All,
        GroupingMethod::PolSides,
    ] {
        let g = &a.groupings[&method];
        assert_eq!(g.groups.len(), 3, "{method:?}");
        g.check_partition(a.topic.articles.iter().map(|x| x.id.as_str()))
            .unwrap();
    }
    assert_eq!(a.check_consistency(), Ok(()));
}

#[test]
fn mfa_bands_follow_s_mfa() {
    let a = fixture();
    let g = &a.groupings[&GroupingMethod::Mfa];
    for art in &a.topic.articles {
        let s = a.s_mfa(&art.id).unwrap();
        let band = if s > 0.1 {
            0
        } else if s < -0.1 {
            2
        } else {
            1
        };
        assert_eq!(g.group_of(&art.id), Some(band), "{} s={s}", art.id);
    }
}

#[test]
fn export_import_round_trip_is_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let store = TopicStore::open(dir.path()).unwrap();
    let a = fixture();
    store.save_topic(&a.topic).unwrap();
    store.save_analysis(&a).unwrap();
    let exported = store.export_topic("barr-letter", None).unwrap();
    assert_eq!(exported, export_json(&a));
    let parsed = parse_analysis(&exported).unwrap();
    assert_eq!(parsed, a);

    let other = TopicStore::open(dir.path().join("other")).unwrap();
    let imported = other.import_analysis(&exported).unwrap();
    assert_eq!(export_json(&imported), exported);
    assert_eq!(
        other
            .export_topic("barr-letter", Some(&a.engine_config_hash))
            .unwrap(),
        exported
    );
}

#[test]
fn fixture_export_validates_against_committed_schema() {
    let schema: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(repo_path("schemas/topic_analysis.schema.json")).unwrap(),
    )
    .unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let doc: serde_json::Value = serde_json::from_str(&export_json(&fixture())).unwrap();
    let errors: Vec<String> = validator
        .iter_errors(&doc)
        .map(|e| format!("{} at {}", e, e.instance_path()))
        .collect();
    assert!(errors.is_empty(), "{errors:#?}");

    let mut broken = doc.clone();
    broken["labels"][0]["label"]["score"] = json!(2);
    assert!(!validator.is_valid(&broken));
    let no_persons: serde_json::Value = serde_json::from_str(&export_json(&analyze(&tiny_topic(
        "calm",
        &[("w1", "It rained all day.")],
    ))))
    .unwrap();
    assert!(validator.is_valid(&no_persons));
}

#[test]
fn person_free_topic_is_flagged_and_keeps_polsides() {
    let a = analyze(&tiny_topic(
        "calm",
        &[("w1", "It rained all day."), ("w2", "The river rose.")],
    ));
    assert!(a.flags.contains(NO_MFA));
    assert!(!a.has_mfa());
    assert_eq!(
        a.groupings.keys().copied().collect::<Vec<_>>(),
        vec![GroupingMethod::PolSides]
    );
    assert!(export_json(&a).contains("\"no-MFA\""));
    assert!(a.vectors.iter().all(|v| v.no_persons));

    let ex = Explanations::builtin();
    let mfa = profile(
        OverviewVariant::Mfa,
        Some(ExplanationMode::Specific),
        HighlightMode::ThreeColor,
    );
    assert!(matches!(
        get_overview(&a, &mfa, &ex),
        Err(ServiceError::GroupingUnavailable(GroupingMethod::Mfa))
    ));
    let all = profile(
        OverviewVariant::AllGeneric,
        Some(ExplanationMode::Generic),
        HighlightMode::ThreeColor,
    );
    assert!(matches!(
        get_overview(&a, &all, &ex),
        Err(ServiceError::GroupingUnavailable(GroupingMethod::All))
    ));
    let pol = profile(
        OverviewVariant::Polsides,
        Some(ExplanationMode::Specific),
        HighlightMode::ThreeColor,
    );
    assert!(get_overview(&a, &pol, &ex).is_ok());
    let view = get_article_view(&a, "w1", &pol).unwrap();
    assert!(view.context_bar.is_none());
    assert!(view.highlights.is_empty());
}

#[test]
fn single_article_topic_fills_one_band() {
    let a = analyze(&tiny_topic(
        "solo",
        &[(
            "s1",
            "Senator Schumer praised the plan. Schumer said it was great.",
        )],
    ));
    let g = &a.groupings[&GroupingMethod::Mfa];
    let sizes: Vec<usize> = g.groups.iter().map(|x| x.members.len()).collect();
    assert_eq!(sizes.iter().sum::<usize>(), 1);
    assert_eq!(sizes.iter().filter(|&&n| n == 0).count(), 2);
    assert_eq!(g.group_of("s1"), Some(0), "both sentences are positive");
    let all = &a.groupings[&GroupingMethod::All];
    assert_eq!(all.groups.len(), 3);
    assert_eq!(
        all.groups.iter().filter(|x| x.members.is_empty()).count(),
        2
    );
}

#[test]
fn plain_overview_is_one_relevance_sorted_list() {
    let a = fixture();
    let p = profile(
        OverviewVariant::Plain,
        Some(ExplanationMode::Specific),
        HighlightMode::Disabled,
    );
    let o = get_overview(&a, &p, &Explanations::builtin()).unwrap();
    assert!(o.groups.is_empty());
    assert!(o.main_article.is_none());
    assert_eq!(o.further_articles.len(), 10);
    let rel: Vec<f64> = o.further_articles.iter().map(|h| h.relevance).collect();
    assert!(rel.windows(2).all(|w| w[0] >= w[1]), "{rel:?}");
}

#[test]
fn polsides_overview_is_labelled_by_orientation() {
    let a = fixture();
    let p = profile(
        OverviewVariant::Polsides,
        Some(ExplanationMode::Specific),
        HighlightMode::Disabled,
    );
    let o = get_overview(&a, &p, &Explanations::builtin()).unwrap();
    let labels: Vec<&str> = o.groups.iter().map(|g| g.label.as_str()).collect();
    assert_eq!(labels, vec!["left", "center", "right"]);
    let orientation: BTreeMap<&str, &str> = a
        .topic
        .articles
        .iter()
        .map(|x| (x.id.as_str(), x.outlet_orientation.as_str()))
        .collect();
    for g in &o.groups {
        let mut ids = vec![g.representative.article_id.as_str()];
        ids.extend(g.members.iter().map(|h| h.article_id.as_str()));
        for id in ids {
            let o = orientation[id];
            assert!(
                o == g.label || (o == "unknown" && g.label == "center"),
                "{id} in {}",
                g.label
            );
        }
        assert!(!g.explanation.is_empty());
    }
}

#[test]
fn generic_mfa_overview_uses_numbered_perspectives() {
    let a = fixture();
    let p = profile(
        OverviewVariant::MfaGeneric,
        Some(ExplanationMode::Generic),
        HighlightMode::Disabled,
    );
    let o = get_overview(&a, &p, &Explanations::builtin()).unwrap();
    let labels: Vec<&str> = o.groups.iter().map(|g| g.label.as_str()).collect();
    assert_eq!(
        labels,
        vec!["Perspective 1", "Perspective 2", "Perspective 3"]
    );
    assert!(o.generic_coloring);
    let specific = get_overview(
        &a,
        &profile(
            OverviewVariant::Mfa,
            Some(ExplanationMode::Specific),
            HighlightMode::Disabled,
        ),
        &Explanations::builtin(),
    )
    .unwrap();
    assert!(specific.groups[0].explanation.contains("President Trump"));
}

#[test]
fn variant_none_has_no_overview() {
    let a = fixture();
    let p = profile(OverviewVariant::None, None, HighlightMode::Disabled);
    assert!(matches!(
        get_overview(&a, &p, &Explanations::builtin()),
        Err(ServiceError::NoOverview)
    ));
}

#[derive(Deserialize)]
struct Sheet {
    articles: BTreeMap<String, Vec<(String, Polarity)>>,
}

#[test]
fn highlight_counts_follow_the_hand_sheet() {
    let a = fixture();
    let sheet: Sheet = serde_json::from_str(
        &std::fs::read_to_string(fixture_path("polarity_sheet.json")).unwrap(),
    )
    .unwrap();
    for (article, labels) in &sheet.articles {
        let neutral = labels
            .iter()
            .filter(|(_, p)| *p == Polarity::Neutral)
            .count();
        let count = |mode| {
            get_article_view(&a, article, &profile(OverviewVariant::None, None, mode))
                .unwrap()
                .highlights
                .len()
        };
        assert_eq!(count(HighlightMode::ThreeColor), labels.len(), "{article}");
        assert_eq!(
            count(HighlightMode::TwoColor),
            labels.len() - neutral,
            "{article}"
        );
        assert_eq!(
            count(HighlightMode::SingleColor),
            labels.len() - neutral,
            "{article}"
        );
        assert_eq!(count(HighlightMode::Disabled), 0, "{article}");
    }
}

#[test]
fn tough_on_trump_is_red() {
    let a = fixture();
    let v = get_article_view(
        &a,
        "a1",
        &profile(OverviewVariant::None, None, HighlightMode::TwoColor),
    )
    .unwrap();
    let sentence = "The Mueller report was tough on Trump";
    let at = v.text.find(sentence).unwrap() + sentence.len() - "Trump".len();
    let span = v.highlights.iter().find(|h| h.char_start == at).unwrap();
    assert_eq!(&v.text[span.char_start..span.char_end], "Trump");
    assert_eq!(
        (span.polarity, span.color.as_str()),
        (Polarity::Negative, "red")
    );
    let bar = v.context_bar.unwrap();
    assert_eq!(bar.len(), 10);
    assert_eq!(bar.iter().filter(|e| e.is_current).count(), 1);
    for e in &bar {
        assert_eq!(Some(e.s_mfa), a.s_mfa(&e.article_id));
    }
}

#[test]
fn unknown_article_is_not_found() {
    let a = fixture();
    let p = profile(OverviewVariant::None, None, HighlightMode::Disabled);
    assert!(matches!(
        get_article_view(&a, "zz", &p),
        Err(ServiceError::NotFound(_))
    ));
}

fn shown_once(ids: &[&str], topic: &TopicAnalysis) {
    let set: BTreeSet<&str> = ids.iter().copied().collect();
    assert_eq!(set.len(), ids.len(), "duplicate headline in {ids:?}");
    let all: BTreeSet<&str> = topic.topic.articles.iter().map(|x| x.id.as_str()).collect();
    assert_eq!(set, all);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn payloads_follow_the_profile(seed in any::<u64>(), article in 0usize..10) {
        let a = fixture();
        let ex = Explanations::builtin();
        let mut p = randomize_profile(seed, &ProfileConstraints::default()).unwrap();
        p.topic_id = a.topic_id().to_string();
        match get_overview(&a, &p, &ex) {
            Err(ServiceError::NoOverview) => prop_assert_eq!(p.overview_variant, OverviewVariant::None),
            Err(e) => prop_assert!(false, "{e}"),
            Ok(o) => {
                prop_assert_eq!(o.overview_variant, p.overview_variant);
                prop_assert_eq!(Some(o.explanation_mode), p.explanation_mode);
                prop_assert_eq!(&o.headline_tags, &p.headline_tags);
                prop_assert_eq!(o.generic_coloring, p.explanation_mode == Some(ExplanationMode::Generic));
                prop_assert!(o.groups.len() <= 3);
                let mut heads: Vec<_> = o.main_article.iter().collect();
                for g in &o.groups {
                    heads.push(&g.representative);
                    heads.extend(&g.members);
                }
                heads.extend(&o.further_articles);
                for h in heads {
                    prop_assert_eq!(h.tags.keys().copied().collect::<BTreeSet<_>>(), p.headline_tags.clone());
                }
                shown_once(&o.article_ids(), &a);
                prop_assert_eq!(get_overview(&a, &p, &ex).unwrap(), o);
            }
        }
        let id = &a.topic.articles[article].id;
        let v = get_article_view(&a, id, &p).unwrap();
        prop_assert_eq!(v.highlight_mode, p.highlight_mode);
        prop_assert_eq!(v.context_bar.is_some(), p.show_context_bar);
        prop_assert_eq!(v.bias_group_indicators.keys().copied().collect::<BTreeSet<_>>(), p.show_bias_group_indicators.clone());
        prop_assert_eq!(v.headline_tags.keys().copied().collect::<BTreeSet<_>>(), p.headline_tags.clone());
        prop_assert!(v.highlights.windows(2).all(|w| w[0].char_end <= w[1].char_start));
        prop_assert_eq!(get_article_view(&a, id, &p).unwrap(), v);
    }
}
