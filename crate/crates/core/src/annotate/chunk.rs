use super::lexicon::is_title;
use super::pos::PosTag;
use super::{ChainSource, Mention, MentionChain, NerType};
use crate::ingest::Article;

/// One singleton chain per maximal noun phrase headed by a proper noun or a
/// person-typed token.
///
/// Noun phrases follow `base ("of" base)*` with
/// `base = (det | poss-pronoun)? (adj | num | noun | proper)* (noun | proper)`;
/// the head is the last token of the first base. A head is person-typed when
/// it lies inside one of `person_mentions` or is a title in any case, so
/// "the president" counts.
pub fn extract_np_singletons(
    article: &Article,
    tags: &[PosTag],
    person_mentions: &[Mention],
) -> Vec<MentionChain> {
    let tokens = &article.tokens;
    let text = article.text();
    let mut out = Vec::new();
    let mut i = 0;

    while i < tokens.len() {
        let Some((base_end, head)) = base_np(tags, i) else {
            i += 1;
            continue;
        };
        let start = i;
        let sentence = tokens[start].sentence_idx;
        let mut end = base_end;
        // Attach "of"-complements.
        while end + 1 < tokens.len()
            && tokens[end].surface.eq_ignore_ascii_case("of")
            && tokens[end + 1].sentence_idx == sentence
        {
            match base_np(tags, end + 1) {
                Some((next_end, _)) if tokens[next_end - 1].sentence_idx == sentence => {
                    end = next_end
                }
                _ => break,
            }
        }
        i = end;

        let head_tok = &tokens[head];
        let in_person = person_mentions
            .iter()
            .any(|m| m.char_start <= head_tok.char_start && head_tok.char_end <= m.char_end);
        let person = in_person || is_title(&head_tok.surface);
        if tags[head] != PosTag::ProperNoun && !person {
            continue;
        }

        let char_start = tokens[start].char_start;
        let char_end = tokens[end - 1].char_end;
        let surface = text[char_start..char_end].to_string();
        out.push(MentionChain {
            chain_id: format!("{}:np{}", article.id, out.len()),
            mentions: vec![Mention {
                article_id: article.id.clone(),
                char_start,
                char_end,
                sentence_idx: sentence,
                surface: surface.clone(),
                head: head_tok.surface.clone(),
                head_start: head_tok.char_start,
                ner_type: if person {
                    NerType::Person
                } else {
                    NerType::Other
                },
            }],
            representative: surface,
            source: ChainSource::NpSingleton,
        });
    }
    out
}

/// Matches a base NP starting at `start`; returns (end, head index).
fn base_np(tags: &[PosTag], start: usize) -> Option<(usize, usize)> {
    let mut j = start;
    if matches!(
        tags.get(j),
        Some(PosTag::Determiner | PosTag::PossessivePronoun)
    ) {
        j += 1;
    }
    let mut last_nominal = None;
    while let Some(&tag) = tags.get(j) {
        match tag {
            PosTag::Adjective | PosTag::Number => {}
            t if t.is_nominal() => last_nominal = Some(j),
            _ => break,
        }
        j += 1;
    }
    let head = last_nominal?;
    Some((head + 1, head))
}
