use std::collections::HashMap;
use std::ops::Range;
use std::path::Path;

use thiserror::Error;

use super::{ClassifierMode, Polarity, PolarityLabel, SentimentClassifier};
use crate::annotate::lexicon::NEGATORS;
use crate::ingest::segment;

/// How many tokens before a valence word a negator may appear.
pub const NEGATION_WINDOW: usize = 3;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read lexicon: {0}")]
    Io(#[from] std::io::Error),
    #[error("lexicon line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Word valences, one `token valence` pair per line; `#` starts a comment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    valence: HashMap<String, f64>,
}

impl Lexicon {
    pub fn parse(src: &str) -> Result<Self, LexiconError> {
        let mut valence = HashMap::new();
        for (n, line) in src.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| LexiconError::Parse {
                line: n + 1,
                message,
            };
            let mut parts = line.split_whitespace();
            let (Some(tok), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(err(format!("expected `token valence`, got `{line}`")));
            };
            let v: f64 = v.parse().map_err(|e| err(format!("{e}")))?;
            if !v.is_finite() {
                return Err(err("valence must be finite".into()));
            }
            valence.insert(tok.to_lowercase(), v);
        }
        Ok(Lexicon { valence })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn builtin() -> Self {
        Self::parse(include_str!("../../data/lexicon.txt")).expect("bundled lexicon parses")
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Self {
        Lexicon {
            valence: pairs
                .into_iter()
                .map(|(t, v)| (t.to_lowercase(), v))
                .collect(),
        }
    }

    pub fn valence(&self, token: &str) -> Option<f64> {
        self.valence.get(&token.to_lowercase()).copied()
    }

    pub fn len(&self) -> usize {
        self.valence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valence.is_empty()
    }
}

/// Sums lexicon valences over the sentence, outside the target span.
///
/// A valence is flipped when one of the `NEGATION_WINDOW` word tokens before
/// it is a negator. Confidence is |sum| over the summed absolute valences,
/// and 1 when the sentence has no lexicon hits.
#[derive(Debug, Clone)]
pub struct LexiconClassifier {
    lexicon: Lexicon,
}

impl LexiconClassifier {
    pub fn new(lexicon: Lexicon) -> Self {
        LexiconClassifier { lexicon }
    }

    pub fn builtin() -> Self {
        Self::new(Lexicon::builtin())
    }

    pub fn lexicon(&self) -> &Lexicon {
        &self.lexicon
    }
}

impl SentimentClassifier for LexiconClassifier {
    fn name(&self) -> &str {
        "builtin_lexicon"
    }

    fn mode(&self) -> ClassifierMode {
        ClassifierMode::BuiltinLexicon
    }

    fn classify(&self, sentence: &str, target: Range<usize>) -> Result<PolarityLabel, String> {
        if target.start > target.end || target.end > sentence.len() {
            return Err(format!(
                "target {target:?} outside sentence of length {}",
                sentence.len()
            ));
        }
        let (tokens, _) = segment(sentence);
        let words: Vec<_> = tokens.iter().filter(|t| t.is_word()).collect();
        let (mut sum, mut total) = (0.0, 0.0);
        for (i, tok) in words.iter().enumerate() {
            if tok.char_start < target.end && target.start < tok.char_end {
                continue;
            }
            let Some(mut v) = self.lexicon.valence(&tok.surface) else {
                continue;
            };
            let negated = words[i.saturating_sub(NEGATION_WINDOW)..i]
                .iter()
                .any(|w| NEGATORS.contains(&w.surface.to_lowercase().as_str()));
            if negated {
                v = -v;
            }
            sum += v;
            total += v.abs();
        }
        let confidence = if total > 0.0 { sum.abs() / total } else { 1.0 };
        Ok(PolarityLabel::new(Polarity::from_sign(sum), confidence))
    }
}
