//! Randomised visualisation profiles for the conjoint study and the
//! response log.

mod responses;

pub use responses::{
    Answer, Question, QuestionKind, Questionnaire, ResponseError, ResponseRecord, ResponseStore,
};

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OverviewVariant {
    None,
    Plain,
    Polsides,
    Mfa,
    PolsidesGeneric,
    MfaGeneric,
    RandomGeneric,
    AllGeneric,
}

impl OverviewVariant {
    pub const ALL: [OverviewVariant; 8] = [
        OverviewVariant::None,
        OverviewVariant::Plain,
        OverviewVariant::Polsides,
        OverviewVariant::Mfa,
        OverviewVariant::PolsidesGeneric,
        OverviewVariant::MfaGeneric,
        OverviewVariant::RandomGeneric,
        OverviewVariant::AllGeneric,
    ];

    pub fn is_generic(self) -> bool {
        matches!(
            self,
            OverviewVariant::PolsidesGeneric
                | OverviewVariant::MfaGeneric
                | OverviewVariant::RandomGeneric
                | OverviewVariant::AllGeneric
        )
    }
}

/// Kinds of headline tag and bias-group indicator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TagKind {
    Polsides,
    Mfap,
    Allp,
}

impl TagKind {
    pub const ALL: [TagKind; 3] = [TagKind::Polsides, TagKind::Mfap, TagKind::Allp];
    /// Tags that take part in headline-tag randomisation.
    pub const HEADLINE: [TagKind; 2] = [TagKind::Polsides, TagKind::Mfap];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExplanationMode {
    Specific,
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HighlightMode {
    Disabled,
    SingleColor,
    TwoColor,
    ThreeColor,
}

impl HighlightMode {
    pub const ALL: [HighlightMode; 4] = [
        HighlightMode::Disabled,
        HighlightMode::SingleColor,
        HighlightMode::TwoColor,
        HighlightMode::ThreeColor,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConjointProfile {
    pub overview_variant: OverviewVariant,
    /// Empty when the overview is skipped.
    pub headline_tags: BTreeSet<TagKind>,
    /// Absent when the overview is skipped.
    pub explanation_mode: Option<ExplanationMode>,
    pub highlight_mode: HighlightMode,
    pub show_context_bar: bool,
    pub show_bias_group_indicators: BTreeSet<TagKind>,
    pub topic_id: String,
    pub task_set_index: u8,
    /// Seed the profile was drawn from; also keys the random grouping.
    #[serde(default)]
    pub seed: u64,
}

impl ConjointProfile {
    pub fn check_invariants(&self) -> Result<(), String> {
        if !(1..=2).contains(&self.task_set_index) {
            return Err(format!(
                "task_set_index {} not in 1..=2",
                self.task_set_index
            ));
        }
        if self.headline_tags.contains(&TagKind::Allp) {
            return Err("allp is not a headline tag level".into());
        }
        match self.overview_variant {
            OverviewVariant::None => {
                if !self.headline_tags.is_empty() || self.explanation_mode.is_some() {
                    return Err("variant none carries overview attributes".into());
                }
            }
            v => match self.explanation_mode {
                None => return Err("explanation_mode missing".into()),
                Some(ExplanationMode::Specific) if v.is_generic() => {
                    return Err(format!("{v:?} requires generic explanations"))
                }
                _ => {}
            },
        }
        Ok(())
    }

    /// Seed for the random-generic grouping of this profile's topic.
    pub fn random_grouping_seed(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.topic_id.as_bytes() {
            h ^= u64::from(*b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        h ^ self.seed
    }
}

/// Attribute values fixed in advance; everything else is drawn.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileConstraints {
    pub topic_id: Option<String>,
    pub task_set_index: Option<u8>,
    pub overview_variant: Option<OverviewVariant>,
    pub headline_tags: Option<BTreeSet<TagKind>>,
    pub explanation_mode: Option<ExplanationMode>,
    pub highlight_mode: Option<HighlightMode>,
    pub show_context_bar: Option<bool>,
    pub show_bias_group_indicators: Option<BTreeSet<TagKind>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    #[error("contradictory constraints: {0}")]
    Contradictory(String),
}

impl ProfileConstraints {
    pub fn validate(&self) -> Result<(), ProfileError> {
        let bad = |m: &str| Err(ProfileError::Contradictory(m.into()));
        if self.task_set_index.is_some_and(|t| !(1..=2).contains(&t)) {
            return bad("task_set_index must be 1 or 2");
        }
        if self
            .headline_tags
            .as_ref()
            .is_some_and(|t| t.contains(&TagKind::Allp))
        {
            return bad("allp cannot be a headline tag");
        }
        match (self.overview_variant, self.explanation_mode) {
            (Some(v), Some(ExplanationMode::Specific)) if v.is_generic() => {
                return bad("generic variant with specific explanations")
            }
            (Some(OverviewVariant::None), Some(_)) => {
                return bad("variant none with an explanation mode")
            }
            _ => {}
        }
        if self.overview_variant == Some(OverviewVariant::None)
            && self.headline_tags.as_ref().is_some_and(|t| !t.is_empty())
        {
            return bad("variant none with headline tags");
        }
        Ok(())
    }
}

/// Independent uniform draws for every attribute, before invariants apply.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDraw {
    pub overview_variant: OverviewVariant,
    pub headline_tags: BTreeSet<TagKind>,
    pub explanation_mode: ExplanationMode,
    pub highlight_mode: HighlightMode,
    pub show_context_bar: bool,
    pub show_bias_group_indicators: BTreeSet<TagKind>,
    pub task_set_index: u8,
}

fn pick<T: Copy>(rng: &mut impl Rng, levels: &[T]) -> T {
    levels[rng.random_range(0..levels.len())]
}

fn subset(rng: &mut impl Rng, levels: &[TagKind]) -> BTreeSet<TagKind> {
    levels
        .iter()
        .copied()
        .filter(|_| rng.random_bool(0.5))
        .collect()
}

/// Every attribute drawn from the same seeded stream in a fixed order.
/// Constrained attributes are still drawn so the stream does not shift.
pub fn draw_raw(seed: u64) -> RawDraw {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    RawDraw {
        overview_variant: pick(&mut rng, &OverviewVariant::ALL),
        headline_tags: subset(&mut rng, &TagKind::HEADLINE),
        explanation_mode: pick(
            &mut rng,
            &[ExplanationMode::Specific, ExplanationMode::Generic],
        ),
        highlight_mode: pick(&mut rng, &HighlightMode::ALL),
        show_context_bar: rng.random_bool(0.5),
        show_bias_group_indicators: subset(&mut rng, &TagKind::ALL),
        task_set_index: pick(&mut rng, &[1, 2]),
    }
}

pub fn randomize_profile(
    seed: u64,
    constraints: &ProfileConstraints,
) -> Result<ConjointProfile, ProfileError> {
    constraints.validate()?;
    let raw = draw_raw(seed);
    let c = constraints;
    let overview_variant = c.overview_variant.unwrap_or(raw.overview_variant);
    let mut profile = ConjointProfile {
        overview_variant,
        headline_tags: c.headline_tags.clone().unwrap_or(raw.headline_tags),
        explanation_mode: Some(c.explanation_mode.unwrap_or(raw.explanation_mode)),
        highlight_mode: c.highlight_mode.unwrap_or(raw.highlight_mode),
        show_context_bar: c.show_context_bar.unwrap_or(raw.show_context_bar),
        show_bias_group_indicators: c
            .show_bias_group_indicators
            .clone()
            .unwrap_or(raw.show_bias_group_indicators),
        topic_id: c.topic_id.clone().unwrap_or_default(),
        task_set_index: c.task_set_index.unwrap_or(raw.task_set_index),
        seed,
    };
    if overview_variant.is_generic() {
        profile.explanation_mode = Some(ExplanationMode::Generic);
    }
    if overview_variant == OverviewVariant::None {
        profile.explanation_mode = None;
        profile.headline_tags.clear();
    }
    if let Err(e) = profile.check_invariants() {
        return Err(ProfileError::Contradictory(e));
    }
    Ok(profile)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_determinism() {
        let c = ProfileConstraints {
            topic_id: Some("t1".into()),
            ..Default::default()
        };
        assert_eq!(
            randomize_profile(9, &c).unwrap(),
            randomize_profile(9, &c).unwrap()
        );
        assert_eq!(randomize_profile(9, &c).unwrap().topic_id, "t1");
    }

    #[test]
    fn generic_variant_forces_generic() {
        let c = ProfileConstraints {
            overview_variant: Some(OverviewVariant::PolsidesGeneric),
            ..Default::default()
        };
        for seed in 0..200 {
            assert_eq!(
                randomize_profile(seed, &c).unwrap().explanation_mode,
                Some(ExplanationMode::Generic)
            );
        }
    }

    #[test]
    fn none_variant_drops_overview_attributes() {
        let c = ProfileConstraints {
            overview_variant: Some(OverviewVariant::None),
            ..Default::default()
        };
        for seed in 0..50 {
            let p = randomize_profile(seed, &c).unwrap();
            assert!(p.headline_tags.is_empty());
            assert_eq!(p.explanation_mode, None);
        }
    }

    #[test]
    fn contradictions() {
        let c = ProfileConstraints {
            overview_variant: Some(OverviewVariant::MfaGeneric),
            explanation_mode: Some(ExplanationMode::Specific),
            ..Default::default()
        };
        assert!(randomize_profile(1, &c).is_err());
        let c = ProfileConstraints {
            headline_tags: Some([TagKind::Allp].into()),
            ..Default::default()
        };
        assert!(randomize_profile(1, &c).is_err());
        let c = ProfileConstraints {
            task_set_index: Some(3),
            ..Default::default()
        };
        assert!(randomize_profile(1, &c).is_err());
    }

    #[test]
    fn json_shape() {
        let p = randomize_profile(3, &ProfileConstraints::default()).unwrap();
        let v = serde_json::to_value(&p).unwrap();
        assert!(v["highlight_mode"].is_string());
        let back: ConjointProfile = serde_json::from_value(v).unwrap();
        assert_eq!(back, p);
    }
}
