use std::collections::BTreeSet;

use biaslens_core::annotate::{ChainSource, Mention, MentionChain, NerType};
use biaslens_core::cdcr::{merge_sieves, CdcrOutput, SieveConfig};
use biaslens_core::embedding::HashEmbedding;
use proptest::prelude::*;

const NAMES: &[&str] = &[
    "Donald Trump",
    "Trump",
    "President Trump",
    "Nancy Pelosi",
    "Pelosi",
    "Speaker Pelosi",
    "Joe Biden",
    "Biden",
    "Hunter Biden",
    "Alexandria Ocasio-Cortez",
    "AOC",
    "Ocasio Cortez",
    "Mitch McConnell",
    "the Senate",
    "White House",
    "Robert Mueller",
    "Mueller",
    "he",
];

fn make_chain(id: usize, reps: &[(usize, bool)]) -> MentionChain {
    let article = format!("a{}", id % 4);
    let mentions: Vec<Mention> = reps
        .iter()
        .enumerate()
        .map(|(k, &(name, person))| {
            let surface = NAMES[name].to_string();
            let head = surface.split_whitespace().last().unwrap().to_string();
            Mention {
                article_id: article.clone(),
                char_start: id * 1000 + k * 50,
                char_end: id * 1000 + k * 50 + surface.len(),
                sentence_idx: k,
                head_start: id * 1000 + k * 50 + surface.len() - head.len(),
                head,
                surface,
                ner_type: if person {
                    NerType::Person
                } else {
                    NerType::Other
                },
            }
        })
        .collect();
    MentionChain {
        chain_id: format!("{article}:c{id}"),
        representative: mentions[0].surface.clone(),
        mentions,
        source: ChainSource::InDocCoref,
    }
}

fn candidates() -> impl Strategy<Value = Vec<MentionChain>> {
    prop::collection::vec(
        prop::collection::vec((0..NAMES.len() - 1, prop::bool::weighted(0.8)), 1..4),
        1..14,
    )
    .prop_map(|cs| {
        cs.iter()
            .enumerate()
            .map(|(i, r)| make_chain(i, r))
            .collect()
    })
}

fn partition(out: &CdcrOutput) -> BTreeSet<BTreeSet<String>> {
    out.concepts
        .iter()
        .map(|c| c.chains.iter().map(|ch| ch.chain_id.clone()).collect())
        .collect()
}

fn run(cands: &[MentionChain], cfg: &SieveConfig) -> CdcrOutput {
    merge_sieves(cands, cfg, Some(&HashEmbedding::default())).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn output_partitions_input(cands in candidates()) {
        let out = run(&cands, &SieveConfig::default());
        let mut seen: Vec<String> = out.concepts.iter().flat_map(|c| c.chains.iter().map(|ch| ch.chain_id.clone())).collect();
        seen.sort();
        let mut ids: Vec<String> = cands.iter().map(|c| c.chain_id.clone()).collect();
        ids.sort();
        prop_assert_eq!(seen, ids);
        let total: usize = cands.iter().map(|c| c.mentions.len()).sum();
        prop_assert_eq!(out.concepts.iter().map(|c| c.mention_count).sum::<usize>(), total);
        for c in &out.concepts {
            prop_assert_eq!(c.mention_count, c.per_article_mentions.values().map(Vec::len).sum::<usize>());
            let largest = c.chains.iter().map(|ch| ch.mentions.len()).max().unwrap();
            prop_assert!(c.chains.iter().any(|ch| ch.mentions.len() == largest && ch.representative == c.canonical_name));
        }
    }

    #[test]
    fn thresholds_are_monotone(cands in candidates()) {
        let sweep = [0.0, 0.25, 0.5, 0.75, 1.0];
        let mut prev = 0;
        for t in sweep {
            let cfg = SieveConfig { mention_similarity_threshold: t, ..SieveConfig::default() };
            let n = run(&cands, &cfg).concepts.len();
            prop_assert!(n >= prev);
            prev = n;
        }
        prev = 0;
        for t in sweep {
            let cfg = SieveConfig { representative_similarity_threshold: t, ..SieveConfig::default() };
            let n = run(&cands, &cfg).concepts.len();
            prop_assert!(n >= prev);
            prev = n;
        }
    }

    #[test]
    fn order_does_not_matter(cands in candidates(), seed in any::<u64>()) {
        let mut shuffled = cands.clone();
        let n = shuffled.len();
        for i in (1..n).rev() {
            shuffled.swap(i, (seed.rotate_left(i as u32) as usize) % (i + 1));
        }
        prop_assert_eq!(partition(&run(&cands, &SieveConfig::default())), partition(&run(&shuffled, &SieveConfig::default())));
    }

    #[test]
    fn types_never_mix_and_exact_reps_always_merge(cands in candidates()) {
        let out = run(&cands, &SieveConfig::default());
        for c in &out.concepts {
            let types: BTreeSet<_> = c.chains.iter().map(MentionChain::ner_type).collect();
            prop_assert_eq!(types.len(), 1);
        }
        let owner = |id: &str| out.concepts.iter().position(|c| c.chains.iter().any(|ch| ch.chain_id == id)).unwrap();
        for a in &cands {
            for b in &cands {
                if a.representative == b.representative && a.ner_type() == b.ner_type() {
                    prop_assert_eq!(owner(&a.chain_id), owner(&b.chain_id));
                }
            }
        }
    }
}
