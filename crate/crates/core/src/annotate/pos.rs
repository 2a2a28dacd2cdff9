//! Heuristic part-of-speech tagging.
//!
//! Closed-class words come from fixed lists; capitalized words are proper
//! nouns unless they open a sentence and are not a known name or title;
//! everything else is guessed from suffixes and defaults to noun.

use serde::{Deserialize, Serialize};

use super::lexicon::*;
use crate::ingest::Article;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PosTag {
    Determiner,
    PossessivePronoun,
    Pronoun,
    Adjective,
    Noun,
    ProperNoun,
    Verb,
    Adverb,
    Preposition,
    Conjunction,
    Number,
    Possessive,
    Punctuation,
}

impl PosTag {
    pub fn is_nominal(self) -> bool {
        matches!(self, PosTag::Noun | PosTag::ProperNoun)
    }
}

pub fn tag_article(article: &Article) -> Vec<PosTag> {
    let mut tags = Vec::with_capacity(article.tokens.len());
    for (i, tok) in article.tokens.iter().enumerate() {
        let sentence_initial = i == 0
            || article.tokens[i - 1].sentence_idx != tok.sentence_idx
            || matches!(
                article.tokens[i - 1].surface.as_str(),
                "\"" | "\u{201c}" | ":" | "(" | "'" | "\u{2018}"
            );
        let next_capitalized = article
            .tokens
            .get(i + 1)
            .is_some_and(|n| n.sentence_idx == tok.sentence_idx && is_capitalized(&n.surface));
        tags.push(tag_word(&tok.surface, sentence_initial, next_capitalized));
    }
    tags
}

pub fn is_capitalized(word: &str) -> bool {
    word.chars().next().is_some_and(char::is_uppercase)
}

fn tag_word(word: &str, sentence_initial: bool, next_capitalized: bool) -> PosTag {
    let lower = word.to_lowercase();
    let l = lower.as_str();
    if l == "'s" || l == "\u{2019}s" {
        return PosTag::Possessive;
    }
    if l == "n't" || l == "n\u{2019}t" {
        return PosTag::Adverb;
    }
    if !word.chars().any(char::is_alphanumeric) {
        return PosTag::Punctuation;
    }
    if word.chars().next().is_some_and(|c| c.is_ascii_digit()) {
        return PosTag::Number;
    }

    let closed = closed_class(l);
    if is_capitalized(word) {
        if !sentence_initial {
            return PosTag::ProperNoun;
        }
        if let Some(tag) = closed {
            return tag;
        }
        if is_known_name(word) || is_title(word) || non_person().contains(l) || next_capitalized {
            return PosTag::ProperNoun;
        }
        return open_class(l);
    }
    closed.unwrap_or_else(|| open_class(l))
}

fn closed_class(l: &str) -> Option<PosTag> {
    if DETERMINERS.contains(&l) {
        Some(PosTag::Determiner)
    } else if POSSESSIVE_PRONOUNS.contains(&l) {
        Some(PosTag::PossessivePronoun)
    } else if PRONOUNS.contains(&l) {
        Some(PosTag::Pronoun)
    } else if PREPOSITIONS.contains(&l) {
        Some(PosTag::Preposition)
    } else if CONJUNCTIONS.contains(&l) {
        Some(PosTag::Conjunction)
    } else if ADVERBS.contains(&l) {
        Some(PosTag::Adverb)
    } else if VERBS.contains(&l) {
        Some(PosTag::Verb)
    } else if ADJECTIVES.contains(&l) {
        Some(PosTag::Adjective)
    } else {
        None
    }
}

fn open_class(l: &str) -> PosTag {
    if l.len() > 4 && l.ends_with("ly") {
        PosTag::Adverb
    } else if l.len() > 4 && (l.ends_with("ed") || l.ends_with("ing")) {
        PosTag::Verb
    } else if ["ous", "ive", "ful", "less", "ical", "able", "ible", "ish"]
        .iter()
        .any(|s| l.len() > s.len() + 2 && l.ends_with(s))
    {
        PosTag::Adjective
    } else {
        PosTag::Noun
    }
}
