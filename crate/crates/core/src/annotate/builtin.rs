use std::collections::HashSet;

use super::lexicon::{self, bare, is_known_name, is_title, non_person};
use super::pos::{is_capitalized, tag_article, PosTag};
use super::{
    AnnotationProvider, Capabilities, ChainSource, Mention, MentionChain, NerType, ProviderOutput,
};
use crate::ingest::Article;

/// Deterministic, offline annotator.
///
/// Person names are maximal runs of proper nouns and titles that carry a
/// person cue: a title or honorific, a gazetteer name, or a surname already
/// established earlier in the same article. Pronouns link to the nearest
/// preceding person mention at most `pronoun_window` sentences back; the rest
/// are dropped.
#[derive(Debug, Clone)]
pub struct BuiltinProvider {
    pub pronoun_window: usize,
}

impl Default for BuiltinProvider {
    fn default() -> Self {
        BuiltinProvider { pronoun_window: 1 }
    }
}

/// A detected name run, as token indices.
#[derive(Debug, Clone)]
struct NameRun {
    start: usize,
    end: usize,
    /// First token after the last title.
    name_start: usize,
}

impl AnnotationProvider for BuiltinProvider {
    fn name(&self) -> &str {
        "builtin"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            pos: true,
            ner: true,
            in_doc_coref: true,
        }
    }

    fn annotate(&self, article: &Article) -> Result<ProviderOutput, String> {
        let tags = tag_article(article);
        let text = article.text();
        let runs = name_runs(article, &tags);

        // Pass 1: strong cues establish surnames.
        let mut known: HashSet<String> = HashSet::new();
        let mut is_person = vec![false; runs.len()];
        for (i, run) in runs.iter().enumerate() {
            if strong_person(article, run) {
                is_person[i] = true;
                known.insert(bare(&article.tokens[run.end - 1].surface));
            }
        }
        // Pass 2: later bare surnames.
        for (i, run) in runs.iter().enumerate() {
            if !is_person[i] && weak_person(article, run, &known) {
                is_person[i] = true;
            }
        }

        let mention_for = |start: usize, end: usize, head: usize| {
            let first = &article.tokens[start];
            let last = &article.tokens[end - 1];
            Mention {
                article_id: article.id.clone(),
                char_start: first.char_start,
                char_end: last.char_end,
                sentence_idx: first.sentence_idx,
                surface: text[first.char_start..last.char_end].to_string(),
                head: article.tokens[head].surface.clone(),
                head_start: article.tokens[head].char_start,
                ner_type: NerType::Person,
            }
        };

        // Person names and pronouns in text order.
        let mut items: Vec<(usize, Mention, Option<&NameRun>)> = Vec::new();
        for (run, _) in runs.iter().zip(&is_person).filter(|(_, p)| **p) {
            items.push((
                run.start,
                mention_for(run.start, run.end, run.end - 1),
                Some(run),
            ));
        }
        for (i, tok) in article.tokens.iter().enumerate() {
            if lexicon::PERSON_PRONOUNS.contains(&tok.surface.to_lowercase().as_str()) {
                items.push((i, mention_for(i, i + 1, i), None));
            }
        }
        items.sort_by_key(|(i, _, _)| *i);

        // Within-document chains.
        let mut chains: Vec<(Vec<Mention>, String, Vec<String>)> = Vec::new();
        let mut last_person: Option<(usize, usize)> = None; // (chain, sentence)
        for (_, mention, run) in items {
            match run {
                Some(run) => {
                    let head = bare(&mention.head);
                    let given = given_names(article, run);
                    let found = chains.iter().position(|(_, h, g)| {
                        *h == head && (g.is_empty() || given.is_empty() || *g == given)
                    });
                    let idx = match found {
                        Some(idx) => {
                            if chains[idx].2.is_empty() {
                                chains[idx].2 = given;
                            }
                            idx
                        }
                        None => {
                            chains.push((Vec::new(), head, given));
                            chains.len() - 1
                        }
                    };
                    last_person = Some((idx, mention.sentence_idx));
                    chains[idx].0.push(mention);
                }
                None => {
                    if let Some((idx, sent)) = last_person {
                        if mention.sentence_idx <= sent + self.pronoun_window {
                            chains[idx].0.push(mention);
                        }
                    }
                }
            }
        }

        let mut mentions = Vec::new();
        let chains = chains
            .into_iter()
            .enumerate()
            .map(|(n, (ms, _, _))| {
                mentions.extend(ms.iter().cloned());
                let representative = super::pick_representative(&ms)
                    .map(|m| m.surface.clone())
                    .unwrap_or_default();
                MentionChain {
                    chain_id: format!("{}:c{n}", article.id),
                    mentions: ms,
                    representative,
                    source: ChainSource::InDocCoref,
                }
            })
            .collect();

        Ok(ProviderOutput {
            pos_tags: Some(tags),
            mentions,
            chains,
        })
    }
}

fn name_runs(article: &Article, tags: &[PosTag]) -> Vec<NameRun> {
    let tokens = &article.tokens;
    let mut runs = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let nameish = |j: usize| {
            tags[j] == PosTag::ProperNoun
                || (is_title(&tokens[j].surface) && is_capitalized(&tokens[j].surface))
        };
        if !nameish(i) {
            i += 1;
            continue;
        }
        let start = i;
        while i < tokens.len() && nameish(i) && tokens[i].sentence_idx == tokens[start].sentence_idx
        {
            i += 1;
        }
        let end = i;
        let name_start = (start..end)
            .rev()
            .find(|&j| is_title(&tokens[j].surface))
            .map_or(start, |j| j + 1);
        runs.push(NameRun {
            start,
            end,
            name_start,
        });
    }
    runs
}

fn name_part<'a>(article: &'a Article, run: &NameRun) -> impl Iterator<Item = &'a str> + 'a {
    article.tokens[run.name_start..run.end]
        .iter()
        .map(|t| t.surface.as_str())
}

fn blocked(article: &Article, run: &NameRun) -> bool {
    name_part(article, run).any(|w| non_person().contains(&bare(w)))
}

fn strong_person(article: &Article, run: &NameRun) -> bool {
    if run.name_start >= run.end || blocked(article, run) {
        return false;
    }
    let has_title = run.name_start > run.start;
    has_title || name_part(article, run).any(is_known_name)
}

fn weak_person(article: &Article, run: &NameRun, known: &HashSet<String>) -> bool {
    run.name_start < run.end
        && !blocked(article, run)
        && known.contains(&bare(&article.tokens[run.end - 1].surface))
}

/// Name tokens before the head, lowercased.
fn given_names(article: &Article, run: &NameRun) -> Vec<String> {
    article.tokens[run.name_start..run.end - 1]
        .iter()
        .map(|t| bare(&t.surface))
        .collect()
}
