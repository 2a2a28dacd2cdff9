use serde::{Deserialize, Serialize};

use super::CdcrError;
use crate::annotate::lexicon::{is_title, DETERMINERS};
use crate::annotate::{MentionChain, NerType};
use crate::embedding::{
    mean, phrase_vector, unit_cosine, EmbeddingError, EmbeddingProvider, Similarity,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sieve {
    ExactRepresentative,
    MentionSimilarity,
    HeadWord,
    AliasAcronym,
    SubstringCompound,
    RepresentativeSimilarity,
}

impl Sieve {
    /// Cascade order.
    pub const ALL: [Sieve; 6] = [
        Sieve::ExactRepresentative,
        Sieve::MentionSimilarity,
        Sieve::HeadWord,
        Sieve::AliasAcronym,
        Sieve::SubstringCompound,
        Sieve::RepresentativeSimilarity,
    ];

    /// 1-based position in the cascade.
    pub fn number(self) -> usize {
        Sieve::ALL.iter().position(|s| *s == self).unwrap() + 1
    }

    fn needs_embeddings(self) -> bool {
        matches!(
            self,
            Sieve::MentionSimilarity | Sieve::RepresentativeSimilarity
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SieveConfig {
    pub exact_representative_match: bool,
    pub mention_set_similarity: bool,
    /// Minimum mapped cosine of mean mention vectors.
    pub mention_similarity_threshold: f64,
    pub head_word_match: bool,
    pub alias_acronym_match: bool,
    /// Groups of names that denote the same person, e.g. `["Donald Trump", "POTUS"]`.
    pub aliases: Vec<Vec<String>>,
    pub substring_compound_match: bool,
    pub representative_embedding_similarity: bool,
    /// Minimum mapped cosine of representative phrase vectors.
    pub representative_similarity_threshold: f64,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            exact_representative_match: true,
            mention_set_similarity: true,
            mention_similarity_threshold: 0.85,
            head_word_match: true,
            alias_acronym_match: true,
            aliases: Vec::new(),
            substring_compound_match: true,
            representative_embedding_similarity: true,
            representative_similarity_threshold: 0.80,
        }
    }
}

impl SieveConfig {
    /// Sieves 1, 3, 4 and 5 only.
    pub fn string_only() -> Self {
        SieveConfig {
            mention_set_similarity: false,
            representative_embedding_similarity: false,
            ..SieveConfig::default()
        }
    }

    pub fn enabled(&self, sieve: Sieve) -> bool {
        match sieve {
            Sieve::ExactRepresentative => self.exact_representative_match,
            Sieve::MentionSimilarity => self.mention_set_similarity,
            Sieve::HeadWord => self.head_word_match,
            Sieve::AliasAcronym => self.alias_acronym_match,
            Sieve::SubstringCompound => self.substring_compound_match,
            Sieve::RepresentativeSimilarity => self.representative_embedding_similarity,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        for (name, t) in [
            (
                "mention_similarity_threshold",
                self.mention_similarity_threshold,
            ),
            (
                "representative_similarity_threshold",
                self.representative_similarity_threshold,
            ),
        ] {
            if !(0.0..=1.0).contains(&t) {
                return Err(format!("{name} = {t} is outside [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Mapped cosine of the mean mention vectors of two chains.
///
/// Pronoun mentions are left out unless a chain has nothing else. If either
/// chain has no in-vocabulary token the score is 0 with the OOV flag set.
pub fn chain_similarity(
    a: &MentionChain,
    b: &MentionChain,
    embeddings: &dyn EmbeddingProvider,
) -> Result<Similarity, EmbeddingError> {
    match (chain_vector(a, embeddings)?, chain_vector(b, embeddings)?) {
        (Some(va), Some(vb)) => Ok(Similarity {
            score: unit_cosine(&va, &vb),
            oov: false,
        }),
        _ => Ok(Similarity::oov()),
    }
}

fn chain_vector(
    chain: &MentionChain,
    embeddings: &dyn EmbeddingProvider,
) -> Result<Option<Vec<f64>>, EmbeddingError> {
    let named: Vec<_> = chain.mentions.iter().filter(|m| !m.is_pronoun()).collect();
    let pool = if named.is_empty() {
        chain.mentions.iter().collect()
    } else {
        named
    };
    let mut vectors = Vec::new();
    for m in pool {
        if let Some(v) = phrase_vector(embeddings, &m.surface)? {
            vectors.push(v);
        }
    }
    Ok(mean(&vectors))
}

/// Per-candidate data the sieves compare.
pub(super) struct Features {
    ner: Vec<NerType>,
    /// False for chains made of pronouns only; string sieves ignore those.
    named: Vec<bool>,
    exact: Vec<String>,
    head: Vec<String>,
    /// Lowercased name parts without determiners or titles, hyphens split.
    parts: Vec<Vec<String>>,
    /// Capitalised name words as written, for acronyms.
    caps: Vec<Vec<String>>,
    mention_vec: Vec<Option<Vec<f64>>>,
    rep_vec: Vec<Option<Vec<f64>>>,
}

impl Features {
    pub(super) fn build(
        candidates: &[MentionChain],
        config: &SieveConfig,
        embeddings: Option<&dyn EmbeddingProvider>,
    ) -> Result<Self, CdcrError> {
        for sieve in Sieve::ALL {
            if config.enabled(sieve) && sieve.needs_embeddings() && embeddings.is_none() {
                return Err(CdcrError::EmbeddingsUnavailable(sieve));
            }
        }
        let n = candidates.len();
        let mut f = Features {
            ner: Vec::with_capacity(n),
            named: Vec::with_capacity(n),
            exact: Vec::with_capacity(n),
            head: Vec::with_capacity(n),
            parts: Vec::with_capacity(n),
            caps: Vec::with_capacity(n),
            mention_vec: vec![None; n],
            rep_vec: vec![None; n],
        };
        for c in candidates {
            let words = name_words(&c.representative);
            f.ner.push(c.ner_type());
            f.named
                .push(c.mentions.iter().any(|m| !m.is_pronoun()) && !words.is_empty());
            f.exact.push(words.join(" ").to_lowercase());
            f.head.push(c.head().trim_end_matches('.').to_lowercase());
            f.parts.push(
                words
                    .iter()
                    .filter(|w| !is_title(w))
                    .flat_map(|w| w.split('-'))
                    .filter(|p| !p.is_empty())
                    .map(str::to_lowercase)
                    .collect(),
            );
            f.caps.push(
                words
                    .iter()
                    .filter(|w| !is_title(w))
                    .flat_map(|w| w.split('-'))
                    .filter(|p| p.chars().next().is_some_and(char::is_uppercase))
                    .map(str::to_string)
                    .collect(),
            );
        }
        if let Some(emb) = embeddings {
            let wrap = |sieve| move |source| CdcrError::Embedding { sieve, source };
            if config.mention_set_similarity {
                for (i, c) in candidates.iter().enumerate() {
                    f.mention_vec[i] =
                        chain_vector(c, emb).map_err(wrap(Sieve::MentionSimilarity))?;
                }
            }
            if config.representative_embedding_similarity {
                for (i, c) in candidates.iter().enumerate() {
                    f.rep_vec[i] = phrase_vector(emb, &c.representative)
                        .map_err(wrap(Sieve::RepresentativeSimilarity))?;
                }
            }
        }
        Ok(f)
    }

    /// All pairs `(i, j)`, `i < j`, that `sieve` links.
    pub(super) fn links(&self, sieve: Sieve, config: &SieveConfig) -> Vec<(usize, usize)> {
        let aliases = alias_sets(&config.aliases);
        let n = self.ner.len();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.ner[i] == self.ner[j] && self.linked(sieve, config, &aliases, i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    fn linked(
        &self,
        sieve: Sieve,
        config: &SieveConfig,
        aliases: &[Vec<String>],
        i: usize,
        j: usize,
    ) -> bool {
        let named = self.named[i] && self.named[j];
        match sieve {
            Sieve::ExactRepresentative => named && self.exact[i] == self.exact[j],
            Sieve::MentionSimilarity => above(
                &self.mention_vec[i],
                &self.mention_vec[j],
                config.mention_similarity_threshold,
            ),
            Sieve::HeadWord => {
                named
                    && !self.head[i].is_empty()
                    && self.head[i] == self.head[j]
                    && given_names_agree(&self.parts[i], &self.parts[j])
            }
            Sieve::AliasAcronym => {
                named
                    && (is_acronym_of(&self.exact[i], &self.caps[j])
                        || is_acronym_of(&self.exact[j], &self.caps[i])
                        || aliases
                            .iter()
                            .any(|g| g.contains(&self.exact[i]) && g.contains(&self.exact[j])))
            }
            Sieve::SubstringCompound => {
                named
                    && (contains_run(&self.parts[i], &self.parts[j])
                        || contains_run(&self.parts[j], &self.parts[i]))
            }
            Sieve::RepresentativeSimilarity => {
                named
                    && above(
                        &self.rep_vec[i],
                        &self.rep_vec[j],
                        config.representative_similarity_threshold,
                    )
            }
        }
    }
}

fn above(a: &Option<Vec<f64>>, b: &Option<Vec<f64>>, threshold: f64) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => unit_cosine(a, b) >= threshold,
        _ => false,
    }
}

/// Word tokens of a phrase with leading determiners and a trailing `'s` removed.
fn name_words(phrase: &str) -> Vec<String> {
    let mut words: Vec<String> = phrase
        .split_whitespace()
        .map(|w| {
            w.trim_matches(|c: char| !c.is_alphanumeric() && c != '-' && c != '.')
                .trim_end_matches("'s")
                .trim_end_matches("\u{2019}s")
                .to_string()
        })
        .filter(|w| !w.is_empty())
        .collect();
    while words
        .first()
        .is_some_and(|w| DETERMINERS.contains(&w.to_lowercase().as_str()))
    {
        words.remove(0);
    }
    words
}

/// Name parts before the head must not contradict each other: if both
/// phrases carry a given name, the first ones must match.
fn given_names_agree(a: &[String], b: &[String]) -> bool {
    match (a.split_last(), b.split_last()) {
        (Some((_, ra)), Some((_, rb))) if !ra.is_empty() && !rb.is_empty() => ra[0] == rb[0],
        _ => true,
    }
}

fn is_acronym_of(candidate: &str, words: &[String]) -> bool {
    if words.len() < 2 || candidate.len() != words.len() || candidate.contains(' ') {
        return false;
    }
    let initials: String = words
        .iter()
        .filter_map(|w| w.chars().next())
        .flat_map(char::to_lowercase)
        .collect();
    initials == candidate.replace('.', "")
}

/// True if `needle` occurs as a contiguous run inside `hay`.
fn contains_run(hay: &[String], needle: &[String]) -> bool {
    !needle.is_empty()
        && needle.len() <= hay.len()
        && hay.windows(needle.len()).any(|w| w == needle)
}

fn alias_sets(groups: &[Vec<String>]) -> Vec<Vec<String>> {
    groups
        .iter()
        .map(|g| {
            g.iter()
                .map(|s| name_words(s).join(" ").to_lowercase())
                .collect()
        })
        .collect()
}
