//! Exhaustive fragment counting, the oracle for the pruned counter.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use sentiparse::corpus::{Corpus, LabeledSentence};
use sentiparse::grammar::{CombinationRule, PatternSymbol, Polarity, RuleType};

pub fn negation(pattern: &str) -> CombinationRule {
    CombinationRule {
        lhs: Polarity::Negative,
        pattern: pattern.parse().unwrap(),
        rule_type: RuleType::Negation,
        theta: vec![0.0, 0.0],
        type_counts: Default::default(),
    }
}

/// Slot spans of a pattern matched anywhere, by brute force over start,
/// end and slot boundaries.
pub fn naive_slots(tokens: &[String], rule: &CombinationRule) -> Vec<(usize, usize)> {
    let syms = rule.pattern.symbols();
    let n = tokens.len();
    let mut out = Vec::new();
    // Every assignment of a length to each symbol (terminals length 1).
    fn rec(syms: &[PatternSymbol], tokens: &[String], pos: usize, acc: &mut Vec<(usize, usize)>, out: &mut Vec<(usize, usize)>) {
        let Some(first) = syms.first() else {
            out.extend(acc.iter().copied());
            return;
        };
        match first {
            PatternSymbol::Word(w) => {
                if pos < tokens.len() && &tokens[pos] == w {
                    rec(&syms[1..], tokens, pos + 1, acc, out);
                }
            }
            PatternSymbol::Slot(_) => {
                for end in pos + 1..=tokens.len() {
                    acc.push((pos, end));
                    rec(&syms[1..], tokens, end, acc, out);
                    acc.pop();
                }
            }
        }
    }
    for start in 0..n {
        rec(syms, tokens, start, &mut Vec::new(), &mut out);
    }
    out
}

/// Counts every span of every sentence, no pruning.
pub fn exhaustive(corpus: &Corpus, rules: &[CombinationRule], tau_f: u64, l_max: usize) -> BTreeMap<Vec<String>, (u64, u64)> {
    let mut table: BTreeMap<Vec<String>, (u64, u64)> = BTreeMap::new();
    for s in corpus.sentences() {
        let slots: Vec<(usize, usize)> = rules.iter().flat_map(|r| naive_slots(&s.tokens, r)).collect();
        let mut seen: BTreeMap<Vec<String>, bool> = BTreeMap::new();
        for i in 0..s.tokens.len() {
            for j in i + 1..=(i + l_max).min(s.tokens.len()) {
                let covered = slots.iter().any(|&(a, b)| a <= i && j <= b);
                *seen.entry(s.tokens[i..j].to_vec()).or_insert(false) |= !covered;
            }
        }
        for (f, uncovered) in seen {
            let e = table.entry(f).or_default();
            if uncovered {
                match s.label {
                    Polarity::Negative => e.0 += 1,
                    Polarity::Positive => e.1 += 1,
                }
            }
        }
    }
    table.retain(|_, (n, p)| *n + *p >= tau_f);
    table
}

pub fn random_corpus<R: Rng>(rng: &mut R, max_sentences: usize) -> Corpus {
    let vocab = ["good", "bad", "not", "very", "the", "movie", "fun", "but"];
    let n = rng.gen_range(1..=max_sentences);
    Corpus::new(
        (0..n)
            .map(|_| {
                let len = rng.gen_range(1..=10);
                let text: Vec<&str> = (0..len).map(|_| *vocab.choose(rng).unwrap()).collect();
                let label = if rng.gen_bool(0.5) { Polarity::Positive } else { Polarity::Negative };
                LabeledSentence::new(&text.join(" "), label).unwrap()
            })
            .collect(),
    )
}


/// Positive words seen mostly plain, plus "good" seen mostly under
/// `not`: naive counting makes "good" negative.
pub fn planted_negation_corpus() -> Corpus {
    let subjects = ["the movie is", "the plot is", "this film is", "the cast is"];
    let mut lines = Vec::new();
    for s in subjects {
        for w in ["great", "fun", "superb", "charming", "brilliant", "wonderful"] {
            for _ in 0..4 {
                lines.push((format!("{s} {w}"), Polarity::Positive));
            }
            lines.push((format!("{s} not {w}"), Polarity::Negative));
        }
        // "good" mostly shows up negated.
        lines.push((format!("{s} good"), Polarity::Positive));
        for _ in 0..2 {
            lines.push((format!("{s} not good"), Polarity::Negative));
        }
        for w in ["awful", "dull", "bland", "messy", "tedious", "lame"] {
            for _ in 0..4 {
                lines.push((format!("{s} {w}"), Polarity::Negative));
            }
        }
    }
    Corpus::new(lines.into_iter().map(|(t, l)| LabeledSentence::new(&t, l).unwrap()).collect())
}
