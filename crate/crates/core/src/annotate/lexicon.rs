//! Word lists backing the built-in annotator.

use std::collections::HashSet;
use std::sync::OnceLock;

fn parse_list(raw: &str) -> HashSet<String> {
    raw.lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .flat_map(str::split_whitespace)
        .map(str::to_lowercase)
        .collect()
}

macro_rules! word_set {
    ($name:ident, $file:literal) => {
        pub fn $name() -> &'static HashSet<String> {
            static SET: OnceLock<HashSet<String>> = OnceLock::new();
            SET.get_or_init(|| parse_list(include_str!(concat!("../../data/", $file))))
        }
    };
}

word_set!(first_names, "first_names.txt");
word_set!(surnames, "surnames.txt");
word_set!(titles, "titles.txt");
word_set!(non_person, "non_person.txt");

/// Lowercased form with a trailing period removed (`Sen.` -> `sen`).
pub fn bare(word: &str) -> String {
    word.trim_end_matches('.').to_lowercase()
}

pub fn is_title(word: &str) -> bool {
    titles().contains(&bare(word))
}

pub fn is_known_name(word: &str) -> bool {
    let w = bare(word);
    first_names().contains(&w) || surnames().contains(&w)
}

pub const DETERMINERS: &[&str] = &[
    "the", "a", "an", "this", "that", "these", "those", "some", "any", "every", "each", "no",
    "all", "both", "another", "such",
];

pub const POSSESSIVE_PRONOUNS: &[&str] = &["his", "her", "their", "its", "our", "my", "your"];

pub const PRONOUNS: &[&str] = &[
    "he",
    "she",
    "they",
    "it",
    "him",
    "them",
    "we",
    "us",
    "i",
    "you",
    "me",
    "himself",
    "herself",
    "themselves",
    "itself",
    "who",
    "whom",
    "hers",
    "theirs",
    "ours",
    "mine",
    "yours",
    "someone",
    "everyone",
    "anyone",
    "nobody",
    "somebody",
];

/// Pronouns that the built-in provider links to a preceding person.
pub const PERSON_PRONOUNS: &[&str] = &[
    "he", "him", "his", "himself", "she", "her", "hers", "herself",
];

pub const PREPOSITIONS: &[&str] = &[
    "of", "in", "on", "at", "by", "for", "with", "about", "against", "between", "into", "through",
    "during", "before", "after", "above", "below", "to", "from", "up", "down", "over", "under",
    "since", "without", "within", "among", "across", "toward", "towards", "despite", "per", "amid",
    "upon", "onto", "via", "like", "near", "off", "out", "around",
];

pub const CONJUNCTIONS: &[&str] = &[
    "and", "or", "but", "nor", "so", "yet", "while", "although", "though", "because", "if", "as",
    "than", "whether", "unless", "when", "where", "whereas",
];

pub const NEGATORS: &[&str] = &["not", "no", "never", "n't"];

pub const ADVERBS: &[&str] = &[
    "not",
    "n't",
    "never",
    "also",
    "very",
    "too",
    "just",
    "only",
    "even",
    "still",
    "already",
    "again",
    "now",
    "then",
    "here",
    "there",
    "today",
    "yesterday",
    "tomorrow",
    "soon",
    "later",
    "almost",
    "often",
    "always",
    "however",
    "instead",
    "rather",
    "quite",
    "perhaps",
];

pub const VERBS: &[&str] = &[
    "is",
    "are",
    "was",
    "were",
    "be",
    "been",
    "being",
    "am",
    "has",
    "have",
    "had",
    "having",
    "do",
    "does",
    "did",
    "done",
    "will",
    "would",
    "shall",
    "should",
    "can",
    "could",
    "may",
    "might",
    "must",
    "said",
    "says",
    "say",
    "told",
    "tell",
    "tells",
    "met",
    "meet",
    "meets",
    "go",
    "goes",
    "went",
    "gone",
    "spoke",
    "speaks",
    "speak",
    "replied",
    "replies",
    "reply",
    "called",
    "calls",
    "call",
    "made",
    "make",
    "makes",
    "took",
    "take",
    "takes",
    "gave",
    "give",
    "gives",
    "came",
    "come",
    "comes",
    "got",
    "get",
    "gets",
    "let",
    "lets",
    "asked",
    "ask",
    "asks",
    "added",
    "argued",
    "announced",
    "voted",
    "vote",
    "signed",
    "sign",
    "passed",
    "pass",
    "urged",
    "urge",
    "warned",
    "warn",
    "claimed",
    "claim",
    "insisted",
    "wrote",
    "noted",
    "stated",
    "believe",
    "believes",
    "believed",
    "think",
    "thinks",
    "thought",
    "know",
    "knows",
    "knew",
    "want",
    "wants",
    "wanted",
    "need",
    "needs",
    "needed",
    "seem",
    "seems",
    "seemed",
    "keep",
    "keeps",
    "kept",
    "look",
    "looks",
    "looked",
    "see",
    "sees",
    "saw",
    "seen",
    "stop",
    "watch",
    "read",
    "listen",
    "remember",
    "consider",
    "leave",
    "left",
    "returned",
    "return",
    "left",
    "held",
    "hold",
    "holds",
    "tried",
    "try",
    "tries",
    // Frequent in headlines, where a bare "-s" form would otherwise pass for a plural noun.
    "blames",
    "blamed",
    "slams",
    "slammed",
    "blasts",
    "blasted",
    "accuse",
    "accuses",
    "accused",
    "attacks",
    "attacked",
    "praises",
    "praised",
    "criticize",
    "criticizes",
    "criticized",
    "deny",
    "denies",
    "denied",
    "defend",
    "defends",
    "defended",
    "reject",
    "rejects",
    "rejected",
    "respond",
    "responds",
    "responded",
    "welcomes",
    "welcomed",
    "thanked",
    "scores",
    "scored",
    "demands",
    "demanded",
    "mocks",
    "mocked",
    "refuse",
    "refuses",
    "refused",
    "releases",
    "released",
    "finds",
    "found",
];

pub const ADJECTIVES: &[&str] = &[
    "new",
    "old",
    "former",
    "top",
    "senior",
    "junior",
    "political",
    "federal",
    "national",
    "local",
    "public",
    "economic",
    "financial",
    "social",
    "military",
    "legal",
    "major",
    "minor",
    "long",
    "short",
    "high",
    "low",
    "big",
    "small",
    "large",
    "great",
    "good",
    "bad",
    "last",
    "next",
    "first",
    "second",
    "third",
    "final",
    "late",
    "early",
    "many",
    "few",
    "several",
    "other",
    "same",
    "different",
    "own",
    "key",
    "main",
    "early",
    "recent",
];
