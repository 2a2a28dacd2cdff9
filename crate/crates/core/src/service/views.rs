use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{ServiceError, TopicAnalysis};
use crate::grouping::{representative_article, ArticleVector, BiasGrouping, GroupingMethod};
use crate::ingest::{ArticleInput, Orientation};
use crate::profiles::{ConjointProfile, ExplanationMode, HighlightMode, OverviewVariant, TagKind};
use crate::tsc::Polarity;

const EXCERPT_CHARS: usize = 280;

/// Group explanation templates. `{person}` is replaced by the MFA's name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Explanations {
    pub generic: String,
    pub polsides: BTreeMap<String, String>,
    pub mfa: BTreeMap<String, String>,
}

impl Explanations {
    pub fn builtin() -> Self {
        serde_json::from_str(include_str!("../../data/explanations.json"))
            .expect("bundled explanations parse")
    }
}

impl Default for Explanations {
    fn default() -> Self {
        Self::builtin()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Headline {
    pub article_id: String,
    pub title: String,
    pub excerpt: String,
    pub relevance: f64,
    pub tags: BTreeMap<TagKind, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverviewGroup {
    pub label: String,
    pub explanation: String,
    pub representative: Headline,
    /// Other members, most relevant first.
    pub members: Vec<Headline>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverviewPayload {
    pub topic_id: String,
    pub event_description: String,
    pub overview_variant: OverviewVariant,
    pub explanation_mode: ExplanationMode,
    /// Groups share one colour and carry numbered labels.
    pub generic_coloring: bool,
    pub headline_tags: BTreeSet<TagKind>,
    pub main_article: Option<Headline>,
    pub groups: Vec<OverviewGroup>,
    pub further_articles: Vec<Headline>,
}

impl OverviewPayload {
    /// Every article id in the payload in display order.
    pub fn article_ids(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self
            .main_article
            .iter()
            .map(|h| h.article_id.as_str())
            .collect();
        for g in &self.groups {
            out.push(&g.representative.article_id);
            out.extend(g.members.iter().map(|h| h.article_id.as_str()));
        }
        out.extend(self.further_articles.iter().map(|h| h.article_id.as_str()));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HighlightSpan {
    pub char_start: usize,
    pub char_end: usize,
    pub person_id: String,
    pub polarity: Polarity,
    pub color: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextBarEntry {
    pub article_id: String,
    pub s_mfa: f64,
    pub headline: String,
    pub is_current: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArticleViewPayload {
    pub topic_id: String,
    pub article_id: String,
    pub title: String,
    pub lead: String,
    pub body: String,
    /// Title, lead and body joined by newlines; highlight offsets are bytes into it.
    pub text: String,
    pub highlight_mode: HighlightMode,
    pub highlights: Vec<HighlightSpan>,
    pub context_bar: Option<Vec<ContextBarEntry>>,
    pub bias_group_indicators: BTreeMap<TagKind, String>,
    pub headline_tags: BTreeMap<TagKind, String>,
}

fn check_profile(analysis: &TopicAnalysis, profile: &ConjointProfile) -> Result<(), ServiceError> {
    profile.check_invariants().map_err(ServiceError::Invalid)?;
    if !profile.topic_id.is_empty() && profile.topic_id != analysis.topic_id() {
        return Err(ServiceError::Invalid(format!(
            "profile is for topic `{}`, not `{}`",
            profile.topic_id,
            analysis.topic_id()
        )));
    }
    Ok(())
}

fn excerpt(a: &ArticleInput) -> String {
    let src = if a.lead.trim().is_empty() {
        &a.body
    } else {
        &a.lead
    };
    let src = src.trim();
    match src.char_indices().nth(EXCERPT_CHARS) {
        Some((cut, _)) => format!("{}...", src[..cut].trim_end()),
        None => src.to_string(),
    }
}

fn group_label(
    analysis: &TopicAnalysis,
    method: GroupingMethod,
    article_id: &str,
) -> Option<String> {
    let g = analysis.groupings.get(&method)?;
    g.group_of(article_id).map(|i| g.groups[i].label.clone())
}

fn tags_for(
    analysis: &TopicAnalysis,
    kinds: &BTreeSet<TagKind>,
    article: &ArticleInput,
) -> BTreeMap<TagKind, String> {
    kinds
        .iter()
        .filter_map(|k| {
            let v = match k {
                TagKind::Polsides => {
                    Some(orientation_label(article.outlet_orientation).to_string())
                }
                TagKind::Mfap => group_label(analysis, GroupingMethod::Mfa, &article.id),
                TagKind::Allp => group_label(analysis, GroupingMethod::All, &article.id),
            };
            v.map(|v| (*k, v))
        })
        .collect()
}

fn orientation_label(o: Orientation) -> &'static str {
    match o {
        Orientation::Left => "left",
        Orientation::Center | Orientation::Unknown => "center",
        Orientation::Right => "right",
    }
}

fn by_relevance(analysis: &TopicAnalysis, ids: &mut [String]) {
    ids.sort_by(|a, b| {
        analysis
            .relevance_of(b)
            .total_cmp(&analysis.relevance_of(a))
            .then_with(|| a.cmp(b))
    });
}

/// Builds the overview for `profile`.
///
/// The main article is the most relevant one. It is left out of the groups,
/// and a group whose representative it was gets the next best member.
/// Groups left empty are dropped. Remaining articles are listed by relevance.
pub fn get_overview(
    analysis: &TopicAnalysis,
    profile: &ConjointProfile,
    explanations: &Explanations,
) -> Result<OverviewPayload, ServiceError> {
    check_profile(analysis, profile)?;
    let variant = profile.overview_variant;
    let articles: BTreeMap<&str, &ArticleInput> = analysis
        .topic
        .articles
        .iter()
        .map(|a| (a.id.as_str(), a))
        .collect();
    let headline = |id: &str| {
        let a = articles[id];
        Headline {
            article_id: a.id.clone(),
            title: a.title.clone(),
            excerpt: excerpt(a),
            relevance: analysis.relevance_of(id),
            tags: tags_for(analysis, &profile.headline_tags, a),
        }
    };
    let mut all_ids: Vec<String> = articles.keys().map(|s| s.to_string()).collect();
    by_relevance(analysis, &mut all_ids);

    let grouping: Option<BiasGrouping> = match variant {
        OverviewVariant::None => return Err(ServiceError::NoOverview),
        OverviewVariant::Plain => None,
        OverviewVariant::Polsides | OverviewVariant::PolsidesGeneric => {
            analysis.groupings.get(&GroupingMethod::PolSides).cloned()
        }
        OverviewVariant::Mfa | OverviewVariant::MfaGeneric => Some(
            analysis
                .groupings
                .get(&GroupingMethod::Mfa)
                .cloned()
                .ok_or(ServiceError::GroupingUnavailable(GroupingMethod::Mfa))?,
        ),
        OverviewVariant::AllGeneric => Some(
            analysis
                .groupings
                .get(&GroupingMethod::All)
                .cloned()
                .ok_or(ServiceError::GroupingUnavailable(GroupingMethod::All))?,
        ),
        OverviewVariant::RandomGeneric => {
            Some(analysis.random_grouping(profile.random_grouping_seed())?)
        }
    };
    let explanation_mode = profile
        .explanation_mode
        .expect("checked: overview variants carry a mode");
    let generic = explanation_mode == ExplanationMode::Generic;

    let Some(grouping) = grouping else {
        return Ok(OverviewPayload {
            topic_id: analysis.topic_id().to_string(),
            event_description: analysis.topic.event_description.clone(),
            overview_variant: variant,
            explanation_mode,
            generic_coloring: generic,
            headline_tags: profile.headline_tags.clone(),
            main_article: None,
            groups: Vec::new(),
            further_articles: all_ids.iter().map(|id| headline(id)).collect(),
        });
    };

    let main = all_ids.first().cloned();
    let vectors: BTreeMap<&str, &ArticleVector> = analysis
        .vectors
        .iter()
        .map(|v| (v.article_id.as_str(), v))
        .collect();
    let mut shown: BTreeSet<String> = main.iter().cloned().collect();
    let mut groups = Vec::new();
    for (i, g) in grouping.groups.iter().enumerate() {
        let mut members: Vec<String> = g
            .members
            .iter()
            .filter(|m| Some(*m) != main.as_ref())
            .cloned()
            .collect();
        if members.is_empty() {
            continue;
        }
        let rep = match &g.representative {
            Some(r) if members.contains(r) => r.clone(),
            _ => {
                representative_article(&members, &vectors, &analysis.relevance).expect("non-empty")
            }
        };
        members.retain(|m| *m != rep);
        by_relevance(analysis, &mut members);
        shown.insert(rep.clone());
        shown.extend(members.iter().cloned());
        let (label, explanation) = if generic {
            (
                format!("Perspective {}", groups.len() + 1),
                explanations.generic.clone(),
            )
        } else {
            let text = match grouping.method {
                GroupingMethod::Mfa => {
                    let role = ["pro", "ambivalent", "contra"][i.min(2)];
                    let person = analysis.mfa().map_or("", |p| p.canonical_name.as_str());
                    explanations
                        .mfa
                        .get(role)
                        .cloned()
                        .unwrap_or_default()
                        .replace("{person}", person)
                }
                GroupingMethod::PolSides => explanations
                    .polsides
                    .get(&g.label)
                    .cloned()
                    .unwrap_or_default(),
                _ => explanations.generic.clone(),
            };
            (g.label.clone(), text)
        };
        groups.push(OverviewGroup {
            label,
            explanation,
            representative: headline(&rep),
            members: members.iter().map(|m| headline(m)).collect(),
        });
    }
    let further: Vec<Headline> = all_ids
        .iter()
        .filter(|id| !shown.contains(*id))
        .map(|id| headline(id))
        .collect();

    Ok(OverviewPayload {
        topic_id: analysis.topic_id().to_string(),
        event_description: analysis.topic.event_description.clone(),
        overview_variant: variant,
        explanation_mode,
        generic_coloring: generic,
        headline_tags: profile.headline_tags.clone(),
        main_article: main.as_deref().map(headline),
        groups,
        further_articles: further,
    })
}

/// Keeps the longest of overlapping spans; on equal length the earlier one.
pub fn resolve_overlaps(mut spans: Vec<HighlightSpan>) -> Vec<HighlightSpan> {
    spans.sort_by(|a, b| {
        (b.char_end - b.char_start)
            .cmp(&(a.char_end - a.char_start))
            .then_with(|| a.char_start.cmp(&b.char_start))
            .then_with(|| a.person_id.cmp(&b.person_id))
    });
    let mut kept: Vec<HighlightSpan> = Vec::new();
    for s in spans {
        if kept
            .iter()
            .all(|k| s.char_end <= k.char_start || k.char_end <= s.char_start)
        {
            kept.push(s);
        }
    }
    kept.sort_by_key(|s| s.char_start);
    kept
}

fn color(mode: HighlightMode, p: Polarity) -> Option<&'static str> {
    match (mode, p) {
        (HighlightMode::Disabled, _) => None,
        (HighlightMode::SingleColor, Polarity::Neutral) => None,
        (HighlightMode::SingleColor, _) => Some("gray"),
        (HighlightMode::TwoColor, Polarity::Neutral) => None,
        (_, Polarity::Positive) => Some("green"),
        (_, Polarity::Negative) => Some("red"),
        (HighlightMode::ThreeColor, Polarity::Neutral) => Some("gray"),
    }
}

pub fn get_article_view(
    analysis: &TopicAnalysis,
    article_id: &str,
    profile: &ConjointProfile,
) -> Result<ArticleViewPayload, ServiceError> {
    check_profile(analysis, profile)?;
    let article = analysis
        .topic
        .articles
        .iter()
        .find(|a| a.id == article_id)
        .ok_or_else(|| {
            ServiceError::NotFound(format!(
                "article `{article_id}` in topic `{}`",
                analysis.topic_id()
            ))
        })?;
    let mode = profile.highlight_mode;
    let spans = analysis
        .labels
        .iter()
        .filter(|l| l.article_id == article_id)
        .filter_map(|l| {
            color(mode, l.label.value).map(|c| HighlightSpan {
                char_start: l.char_start,
                char_end: l.char_end,
                person_id: l.person_id.clone(),
                polarity: l.label.value,
                color: c.to_string(),
            })
        })
        .collect();

    let context_bar = (profile.show_context_bar && analysis.has_mfa()).then(|| {
        analysis
            .topic
            .articles
            .iter()
            .map(|a| ContextBarEntry {
                article_id: a.id.clone(),
                s_mfa: analysis.s_mfa(&a.id).unwrap_or(0.0),
                headline: a.title.clone(),
                is_current: a.id == article_id,
            })
            .collect()
    });

    Ok(ArticleViewPayload {
        topic_id: analysis.topic_id().to_string(),
        article_id: article.id.clone(),
        title: article.title.clone(),
        lead: article.lead.clone(),
        body: article.body.clone(),
        text: crate::ingest::canonical_text(&article.title, &article.lead, &article.body),
        highlight_mode: mode,
        highlights: resolve_overlaps(spans),
        context_bar,
        bias_group_indicators: tags_for(analysis, &profile.show_bias_group_indicators, article),
        headline_tags: tags_for(analysis, &profile.headline_tags, article),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn span(s: usize, e: usize) -> HighlightSpan {
        HighlightSpan {
            char_start: s,
            char_end: e,
            person_id: "p0".into(),
            polarity: Polarity::Negative,
            color: "red".into(),
        }
    }

    #[test]
    fn longest_span_wins() {
        let out = resolve_overlaps(vec![span(0, 5), span(3, 15), span(16, 20), span(14, 17)]);
        assert_eq!(
            out.iter()
                .map(|s| (s.char_start, s.char_end))
                .collect::<Vec<_>>(),
            vec![(3, 15), (16, 20)]
        );
    }

    #[test]
    fn colors_per_mode() {
        use HighlightMode::*;
        assert_eq!(color(Disabled, Polarity::Negative), None);
        assert_eq!(color(SingleColor, Polarity::Negative), Some("gray"));
        assert_eq!(color(SingleColor, Polarity::Neutral), None);
        assert_eq!(color(TwoColor, Polarity::Negative), Some("red"));
        assert_eq!(color(TwoColor, Polarity::Neutral), None);
        assert_eq!(color(ThreeColor, Polarity::Neutral), Some("gray"));
        assert_eq!(color(ThreeColor, Polarity::Positive), Some("green"));
    }
}
