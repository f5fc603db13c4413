//! Text normalization shared by ranking, seed matching, labeling and the
//! test embedding.

use rust_stemmers::{Algorithm, Stemmer};
use std::sync::OnceLock;

/// Words never used in cluster labels.
pub const STOPWORDS: &[&str] = &[
    "a", "about", "after", "all", "an", "and", "any", "are", "as", "at", "be", "been", "but", "by",
    "for", "from", "had", "has", "have", "he", "her", "his", "i", "if", "in", "into", "is", "it",
    "its", "me", "my", "no", "not", "of", "on", "or", "our", "she", "so", "that", "the", "their",
    "them", "then", "there", "these", "they", "this", "those", "to", "up", "was", "we", "were",
    "what", "when", "which", "who", "will", "with", "you", "your",
];

pub fn is_stopword(word: &str) -> bool {
    STOPWORDS.binary_search(&word).is_ok()
}

/// Lowercases, turns every non-alphanumeric character into a separator and
/// collapses runs of whitespace.
pub fn normalize(text: &str) -> String {
    tokens(text).join(" ")
}

/// Lowercase alphanumeric tokens of `text`.
pub fn tokens(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            cur.extend(ch.to_lowercase());
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// Word-boundary containment: every token of `needle` appears contiguously
/// in `haystack`. Both arguments are token slices.
pub fn contains_words<S: AsRef<str>>(haystack: &[S], needle: &[S]) -> bool {
    if needle.is_empty() || needle.len() > haystack.len() {
        return false;
    }
    haystack
        .windows(needle.len())
        .any(|w| w.iter().zip(needle).all(|(a, b)| a.as_ref() == b.as_ref()))
}

fn english() -> &'static Stemmer {
    static STEMMER: OnceLock<Stemmer> = OnceLock::new();
    STEMMER.get_or_init(|| Stemmer::create(Algorithm::English))
}

/// Snowball English stem of a single lowercase word. Words of three letters
/// or fewer are returned unchanged. The stemmer is applied until it reaches a
/// fixed point so the result is idempotent.
pub fn stem(word: &str) -> String {
    let lower = word.to_lowercase();
    if lower.chars().count() <= 3 {
        return lower;
    }
    let stemmer = english();
    let mut cur = lower;
    // Snowball converges in one or two passes; the bound is a backstop.
    for _ in 0..8 {
        let next = stemmer.stem(&cur).into_owned();
        if next == cur || next.chars().count() <= 3 {
            return next;
        }
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stopwords_sorted_for_binary_search() {
        let mut sorted = STOPWORDS.to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, STOPWORDS);
    }

    #[test]
    fn normalize_strips_punctuation() {
        assert_eq!(
            normalize("  Comet Ping-Pong's   Pizza! "),
            "comet ping pong s pizza"
        );
        assert_eq!(normalize("E-mails"), "e mails");
        assert!(normalize("!!!").is_empty());
    }

    #[test]
    fn word_boundary_matching() {
        let hay = tokens("the ping pong story");
        assert!(contains_words(&hay, &tokens("pong")));
        assert!(contains_words(&hay, &tokens("ping pong")));
        assert!(!contains_words(&hay, &tokens("pong ping")));
        assert!(!contains_words(&tokens("a sponge"), &tokens("pong")));
        assert!(!contains_words(&hay, &Vec::<String>::new()));
    }

    #[test]
    fn stem_short_guard_and_fixed_point() {
        assert_eq!(stem("is"), "is");
        assert_eq!(stem("Has"), "has");
        assert_eq!(stem("trafficking"), "traffick");
        let s = stem("generalizations");
        assert_eq!(stem(&s), s);
    }
}
