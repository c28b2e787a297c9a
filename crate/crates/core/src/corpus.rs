//! Labeled sentence corpora: tokenization, loading, balancing and folds.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::grammar::Polarity;
use crate::stopwords::is_unicode_punct;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("empty sentence")]
    EmptySentence,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation() || is_unicode_punct(c)
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '’'
}

/// Lowercased, NFC-normalized tokens. Leading and trailing punctuation is
/// split off one character per token, and word-internal apostrophes become
/// standalone `'` tokens (`it's` → `it ' s`).
pub fn tokenize(text: &str) -> Result<Vec<String>, CorpusError> {
    let normalized: String = text.nfc().collect::<String>().to_lowercase();
    let mut tokens = Vec::new();
    for chunk in normalized.split_whitespace() {
        let chars: Vec<char> = chunk.chars().collect();
        let start = chars.iter().position(|c| !is_punct(*c)).unwrap_or(chars.len());
        let end = chars.iter().rposition(|c| !is_punct(*c)).map_or(start, |p| p + 1);
        for c in &chars[..start] {
            tokens.push(punct_token(*c));
        }
        let mut word = String::new();
        for &c in &chars[start..end] {
            if is_apostrophe(c) {
                if !word.is_empty() {
                    tokens.push(std::mem::take(&mut word));
                }
                tokens.push("'".to_string());
            } else {
                word.push(c);
            }
        }
        if !word.is_empty() {
            tokens.push(word);
        }
        for c in &chars[end.max(start)..] {
            tokens.push(punct_token(*c));
        }
    }
    if tokens.is_empty() {
        return Err(CorpusError::EmptySentence);
    }
    Ok(tokens)
}

fn punct_token(c: char) -> String {
    if is_apostrophe(c) {
        "'".to_string()
    } else {
        c.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSentence {
    pub tokens: Vec<String>,
    pub label: Polarity,
    pub raw: String,
}

impl LabeledSentence {
    pub fn new(raw: &str, label: Polarity) -> Result<Self, CorpusError> {
        Ok(LabeledSentence { tokens: tokenize(raw)?, label, raw: raw.to_string() })
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    sentences: Vec<LabeledSentence>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    /// `label<TAB>text` per line; `#` lines are comments.
    Tsv,
    /// A directory holding `rt-polarity.pos` and `rt-polarity.neg`
    /// (one Latin-1 sentence per line).
    Pl05,
}

impl std::str::FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tsv" => Ok(CorpusFormat::Tsv),
            "pl05" => Ok(CorpusFormat::Pl05),
            _ => Err(format!("unknown corpus format `{s}` (expected tsv or pl05)")),
        }
    }
}

impl Corpus {
    pub fn new(sentences: Vec<LabeledSentence>) -> Self {
        Corpus { sentences }
    }

    pub fn sentences(&self) -> &[LabeledSentence] {
        &self.sentences
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// `(negative, positive)` counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.sentences.iter().filter(|s| s.label == Polarity::Positive).count();
        (self.sentences.len() - pos, pos)
    }

    pub fn parse_tsv(text: &str) -> Result<Self, CorpusError> {
        let mut sentences = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let lineno = idx + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (label, body) = line.split_once('\t').ok_or_else(|| CorpusError::Parse {
                line: lineno,
                msg: "expected `label<TAB>text`".into(),
            })?;
            let label = match label.trim() {
                "0" | "neg" => Polarity::Negative,
                "1" | "pos" => Polarity::Positive,
                other => {
                    return Err(CorpusError::Parse { line: lineno, msg: format!("unknown label `{other}`") })
                }
            };
            let sentence = LabeledSentence::new(body, label).map_err(|e| CorpusError::Parse {
                line: lineno,
                msg: e.to_string(),
            })?;
            sentences.push(sentence);
        }
        Ok(Corpus { sentences })
    }

    pub fn load(path: impl AsRef<Path>, format: CorpusFormat) -> Result<Self, CorpusError> {
        let path = path.as_ref();
        match format {
            CorpusFormat::Tsv => Corpus::parse_tsv(&fs::read_to_string(path)?),
            CorpusFormat::Pl05 => {
                let mut sentences = Vec::new();
                for (file, label) in [("rt-polarity.neg", Polarity::Negative), ("rt-polarity.pos", Polarity::Positive)] {
                    let bytes = fs::read(path.join(file))?;
                    let text: String = bytes.iter().map(|&b| b as char).collect();
                    for line in text.lines().filter(|l| !l.trim().is_empty()) {
                        sentences.push(LabeledSentence::new(line, label)?);
                    }
                }
                Ok(Corpus { sentences })
            }
        }
    }

    /// Downsamples the majority class to the minority size. Original order
    /// is kept for the surviving sentences.
    pub fn balance(&self, seed: u64) -> Corpus {
        let (neg, pos) = self.class_counts();
        if neg == pos {
            return self.clone();
        }
        let (majority, keep) = if neg > pos { (Polarity::Negative, pos) } else { (Polarity::Positive, neg) };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut candidates: Vec<usize> =
            (0..self.sentences.len()).filter(|&i| self.sentences[i].label == majority).collect();
        candidates.shuffle(&mut rng);
        let mut drop = vec![false; self.sentences.len()];
        for &i in &candidates[keep..] {
            drop[i] = true;
        }
        Corpus {
            sentences: self
                .sentences
                .iter()
                .zip(drop)
                .filter(|(_, d)| !d)
                .map(|(s, _)| s.clone())
                .collect(),
        }
    }

    /// Label-stratified k-fold split. Each entry is `(train, test)`; test
    /// folds are disjoint and together cover the corpus.
    pub fn kfold(&self, k: usize, seed: u64) -> Result<Vec<(Corpus, Corpus)>, CorpusError> {
        if k < 2 {
            return Err(CorpusError::Domain(format!("k = {k}, need at least 2 folds")));
        }
        if k > self.sentences.len() {
            return Err(CorpusError::Domain(format!("k = {k} exceeds corpus size {}", self.sentences.len())));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut assignment = vec![0usize; self.sentences.len()];
        let mut next_fold = 0;
        for label in Polarity::BOTH {
            let mut idx: Vec<usize> = (0..self.sentences.len()).filter(|&i| self.sentences[i].label == label).collect();
            idx.shuffle(&mut rng);
            for i in idx {
                assignment[i] = next_fold;
                next_fold = (next_fold + 1) % k;
            }
        }
        Ok((0..k)
            .map(|fold| {
                let (test, train): (Vec<_>, Vec<_>) =
                    self.sentences.iter().zip(&assignment).partition(|(_, &a)| a == fold);
                (
                    Corpus { sentences: train.into_iter().map(|(s, _)| s.clone()).collect() },
                    Corpus { sentences: test.into_iter().map(|(s, _)| s.clone()).collect() },
                )
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s).unwrap()
    }

    #[test]
    fn tokenizer_examples() {
        assert_eq!(toks("The movie is good."), ["the", "movie", "is", "good", "."]);
        assert_eq!(toks("it's flawed"), ["it", "'", "s", "flawed"]);
        assert_eq!(toks("GOOD!!!"), ["good", "!", "!", "!"]);
        assert_eq!(toks("\"well-done\""), ["\"", "well-done", "\""]);
        assert_eq!(toks("it’s"), ["it", "'", "s"]);
        assert!(matches!(tokenize("   \t "), Err(CorpusError::EmptySentence)));
    }

    #[test]
    fn tsv_loading() {
        let c = Corpus::parse_tsv("# header\n1\tgood movie\n0\tbad movie\n").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.class_counts(), (1, 1));
        assert_eq!(c.sentences()[0].tokens, ["good", "movie"]);
        let c = Corpus::parse_tsv("pos\tfine\nneg\tnot fine\n").unwrap();
        assert_eq!(c.class_counts(), (1, 1));
        match Corpus::parse_tsv("1\tok\nmaybe\thmm\n") {
            Err(CorpusError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    fn synthetic(pos: usize, neg: usize) -> Corpus {
        let mut s = Vec::new();
        for i in 0..pos {
            s.push(LabeledSentence::new(&format!("good {i}"), Polarity::Positive).unwrap());
        }
        for i in 0..neg {
            s.push(LabeledSentence::new(&format!("bad {i}"), Polarity::Negative).unwrap());
        }
        Corpus::new(s)
    }

    #[test]
    fn balance_downsamples() {
        let c = synthetic(6, 4).balance(3);
        assert_eq!(c.class_counts(), (4, 4));
        assert_eq!(c.balance(99), c);
    }

    #[test]
    fn kfold_partitions() {
        let c = synthetic(6, 4);
        let folds = c.kfold(5, 1).unwrap();
        assert_eq!(folds.len(), 5);
        let mut seen: Vec<String> = Vec::new();
        for (train, test) in &folds {
            assert_eq!(test.len(), 2);
            assert_eq!(train.len() + test.len(), 10);
            seen.extend(test.sentences().iter().map(|s| s.raw.clone()));
        }
        seen.sort();
        let mut all: Vec<String> = c.sentences().iter().map(|s| s.raw.clone()).collect();
        all.sort();
        assert_eq!(seen, all);
        assert!(c.kfold(11, 1).is_err());
        assert!(c.kfold(1, 1).is_err());
    }

    proptest! {
        #[test]
        fn kfold_is_stratified(pos in 0usize..40, neg in 0usize..40, k in 2usize..8, seed in 0u64..1000) {
            let c = synthetic(pos, neg);
            prop_assume!(k <= c.len());
            let folds = c.kfold(k, seed).unwrap();
            let total: usize = folds.iter().map(|(_, t)| t.len()).sum();
            prop_assert_eq!(total, c.len());
            for (_, test) in &folds {
                let (n, p) = test.class_counts();
                prop_assert!((n as f64 - neg as f64 / k as f64).abs() <= 1.0);
                prop_assert!((p as f64 - pos as f64 / k as f64).abs() <= 1.0);
            }
        }

        #[test]
        fn tokenize_is_lowercase_and_stable(s in "[A-Za-z ,.!']{1,40}") {
            if let Ok(t) = tokenize(&s) {
                prop_assert_eq!(&t, &tokenize(&s).unwrap());
                prop_assert!(t.iter().all(|w| !w.is_empty() && *w == w.to_lowercase()));
            }
        }
    }
}
