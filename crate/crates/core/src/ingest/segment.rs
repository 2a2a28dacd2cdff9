//! Rule-based tokenizer and sentence splitter.
//!
//! Offsets are UTF-8 byte offsets into the input text, so for every token
//! `&text[t.char_start..t.char_end] == t.surface`.
//!
//! Word tokens are maximal runs of alphanumeric characters, optionally joined
//! by an internal apostrophe, hyphen, or period (`Ocasio-Cortez`, `3.5`). The
//! clitics `'s` and `n't` are split off as their own tokens. Dotted initialisms
//! (`U.S.`) and known abbreviations (`Dr.`, `Sen.`) keep their trailing period.
//! Every other non-whitespace character is a single punctuation token.
//!
//! Sentences end after `.`, `!`, or `?` (plus any closing quotes/brackets) and
//! at every newline, which separates title, lead, and body in canonical text.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub char_start: usize,
    pub char_end: usize,
    pub sentence_idx: usize,
}

impl Token {
    pub fn is_word(&self) -> bool {
        self.surface.chars().any(char::is_alphanumeric)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub char_start: usize,
    pub char_end: usize,
}

/// Abbreviations whose trailing period is part of the token and never ends a
/// sentence. Lowercase, without the period.
pub const ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "sen", "rep", "gov", "pres", "gen", "lt", "col", "sgt",
    "capt", "cmdr", "adm", "maj", "jr", "sr", "st", "hon", "rev", "atty", "supt", "mt", "ft", "vs",
    "etc", "inc", "corp", "ltd", "co", "dept", "univ", "jan", "feb", "mar", "apr", "jun", "jul",
    "aug", "sep", "sept", "oct", "nov", "dec",
];

fn is_abbreviation(word: &str) -> bool {
    let lower = word.to_lowercase();
    ABBREVIATIONS.contains(&lower.as_str())
}

const APOSTROPHES: [char; 2] = ['\'', '\u{2019}'];

#[derive(Debug, Clone, Copy)]
struct RawToken {
    start: usize,
    end: usize,
}

/// Splits `text` into tokens and sentences. Pure and deterministic.
pub fn segment(text: &str) -> (Vec<Token>, Vec<Sentence>) {
    let raw = tokenize(text);
    if raw.is_empty() {
        return (Vec::new(), Vec::new());
    }

    let mut tokens = Vec::with_capacity(raw.len());
    let mut sentences = Vec::new();
    let mut sentence_start: Option<usize> = None;
    let mut last_end = 0;

    let close_sentence = |sentences: &mut Vec<Sentence>, start: &mut Option<usize>, end: usize| {
        if let Some(s) = start.take() {
            sentences.push(Sentence {
                char_start: s,
                char_end: end,
            });
        }
    };

    for (i, tok) in raw.iter().enumerate() {
        // A newline between the previous token and this one is a hard boundary.
        if sentence_start.is_some() && text[last_end..tok.start].contains('\n') {
            close_sentence(&mut sentences, &mut sentence_start, last_end);
        }
        if sentence_start.is_none() {
            sentence_start = Some(tok.start);
        }
        let surface = &text[tok.start..tok.end];
        tokens.push(Token {
            surface: surface.to_string(),
            char_start: tok.start,
            char_end: tok.end,
            sentence_idx: sentences.len(),
        });
        last_end = tok.end;

        if matches!(surface, "." | "!" | "?") {
            // Absorb closing punctuation that belongs to this sentence.
            let next = raw.get(i + 1).map(|t| &text[t.start..t.end]);
            let closes_next =
                matches!(next, Some("\"" | "'" | ")" | "]" | "\u{201d}" | "\u{2019}"))
                    && !text[tok.end..raw[i + 1].start].contains(char::is_whitespace);
            if !closes_next {
                close_sentence(&mut sentences, &mut sentence_start, tok.end);
            }
        } else if matches!(surface, "\"" | "'" | ")" | "]" | "\u{201d}" | "\u{2019}")
            && i > 0
            && matches!(&text[raw[i - 1].start..raw[i - 1].end], "." | "!" | "?")
        {
            close_sentence(&mut sentences, &mut sentence_start, tok.end);
        }
    }
    close_sentence(&mut sentences, &mut sentence_start, last_end);

    (tokens, sentences)
}

fn tokenize(text: &str) -> Vec<RawToken> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let byte_at = |i: usize| chars.get(i).map_or(text.len(), |&(b, _)| b);
    let mut out = Vec::new();
    let mut i = 0;

    while i < chars.len() {
        let c = chars[i].1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if !c.is_alphanumeric() {
            out.push(RawToken {
                start: byte_at(i),
                end: byte_at(i + 1),
            });
            i += 1;
            continue;
        }

        // Dotted initialism: letter '.' letter '.' ...
        if let Some(end) = initialism_end(&chars, i) {
            out.push(RawToken {
                start: byte_at(i),
                end: byte_at(end),
            });
            i = end;
            continue;
        }

        let start = i;
        let mut j = i + 1;
        loop {
            while j < chars.len() && chars[j].1.is_alphanumeric() {
                j += 1;
            }
            // Join across a single inner connector followed by alphanumerics.
            let joinable = j + 1 < chars.len()
                && chars[j + 1].1.is_alphanumeric()
                && match chars[j].1 {
                    '-' => true,
                    '.' => chars[j - 1].1.is_ascii_digit() && chars[j + 1].1.is_ascii_digit(),
                    ',' => chars[j - 1].1.is_ascii_digit() && chars[j + 1].1.is_ascii_digit(),
                    c if APOSTROPHES.contains(&c) => {
                        !is_clitic(&chars, j) && !is_negation_clitic(&chars, j)
                    }
                    _ => false,
                };
            if joinable {
                j += 1;
            } else {
                break;
            }
        }

        let word: String = chars[start..j].iter().map(|&(_, c)| c).collect();

        // "didn't" -> "did" + "n't"
        if is_negation_clitic(&chars, j) {
            let split = j - 1;
            if split > start {
                out.push(RawToken {
                    start: byte_at(start),
                    end: byte_at(split),
                });
            }
            out.push(RawToken {
                start: byte_at(split),
                end: byte_at(j + 2),
            });
            i = j + 2;
            continue;
        }

        out.push(RawToken {
            start: byte_at(start),
            end: byte_at(j),
        });

        // Abbreviation keeps its period.
        if j < chars.len() && chars[j].1 == '.' && is_abbreviation(&word) {
            out.last_mut().expect("just pushed").end = byte_at(j + 1);
            i = j + 1;
            continue;
        }

        // "Trump's" -> "Trump" + "'s"
        if is_clitic(&chars, j) {
            out.push(RawToken {
                start: byte_at(j),
                end: byte_at(j + 2),
            });
            i = j + 2;
            continue;
        }
        i = j;
    }
    out
}

/// True when `chars[at]` starts a possessive `'s` clitic.
fn is_clitic(chars: &[(usize, char)], at: usize) -> bool {
    at < chars.len()
        && APOSTROPHES.contains(&chars[at].1)
        && chars
            .get(at + 1)
            .is_some_and(|&(_, c)| c == 's' || c == 'S')
        && !chars.get(at + 2).is_some_and(|&(_, c)| c.is_alphanumeric())
}

/// True when `chars[at]` is the apostrophe of a trailing `n't`.
fn is_negation_clitic(chars: &[(usize, char)], at: usize) -> bool {
    at > 0
        && at < chars.len()
        && APOSTROPHES.contains(&chars[at].1)
        && matches!(chars[at - 1].1, 'n' | 'N')
        && chars
            .get(at + 1)
            .is_some_and(|&(_, c)| c == 't' || c == 'T')
        && !chars.get(at + 2).is_some_and(|&(_, c)| c.is_alphanumeric())
}

fn initialism_end(chars: &[(usize, char)], start: usize) -> Option<usize> {
    let mut j = start;
    let mut letters = 0;
    while j + 1 < chars.len() && chars[j].1.is_alphabetic() && chars[j + 1].1 == '.' {
        // each segment is exactly one letter
        if j > start && chars[j - 1].1 != '.' {
            break;
        }
        if j == start && start > 0 && chars[start - 1].1.is_alphanumeric() {
            return None;
        }
        letters += 1;
        j += 2;
    }
    if letters >= 2 && !chars.get(j).is_some_and(|&(_, c)| c.is_alphanumeric()) {
        Some(j)
    } else {
        None
    }
}
