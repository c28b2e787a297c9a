//! Function words that never form a dictionary fragment on their own.
//!
//! Negators, intensifiers and contrast markers are left out on purpose so
//! that they can still surface as dictionary rules.

use std::collections::HashSet;
use std::sync::OnceLock;

pub const STOPWORDS_VERSION: &str = "1";

const STOPWORDS: &[&str] = &[
    "a", "about", "above", "after", "again", "all", "am", "an", "and", "any", "are", "as", "at",
    "be", "because", "been", "before", "being", "below", "between", "both", "by", "can", "could",
    "did", "do", "does", "doing", "down", "during", "each", "for", "from", "further", "had",
    "has", "have", "having", "he", "her", "here", "hers", "herself", "him", "himself", "his",
    "how", "i", "if", "in", "into", "is", "it", "its", "itself", "just", "let", "me", "my",
    "myself", "of", "off", "on", "once", "or", "other", "our", "ours", "ourselves", "out",
    "over", "own", "same", "she", "should", "some", "such", "than", "that", "the", "their",
    "theirs", "them", "themselves", "then", "there", "these", "they", "this", "those", "through",
    "to", "under", "until", "up", "us", "was", "we", "were", "what", "when", "where", "which",
    "while", "who", "whom", "why", "will", "with", "would", "you", "your", "yours", "yourself",
    "yourselves", "s", "t", "d", "ll", "m", "re", "ve", "o", "y", "also", "yet", "upon", "onto",
    "within", "without", "whose", "whether", "via", "per", "among", "across", "along", "around",
    "behind", "beside", "besides", "beyond", "towards", "toward", "unto", "thus", "hence", "ever",
    "one", "ones", "may", "might", "must", "shall", "since", "though", "although", "whatever",
    "whoever", "whenever", "wherever", "lrb", "rrb",
];

fn set() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| STOPWORDS.iter().copied().collect())
}

pub fn is_stopword(token: &str) -> bool {
    set().contains(token)
}

pub fn is_punctuation(token: &str) -> bool {
    !token.is_empty() && token.chars().all(|c| c.is_ascii_punctuation() || is_unicode_punct(c))
}

pub(crate) fn is_unicode_punct(c: char) -> bool {
    matches!(c, '‘' | '’' | '“' | '”' | '…' | '–' | '—' | '«' | '»')
}

/// True when every token is a stop word or punctuation.
pub fn is_filler(fragment: &[impl AsRef<str>]) -> bool {
    fragment.iter().all(|t| {
        let t = t.as_ref();
        is_stopword(t) || is_punctuation(t)
    })
}
