//! Random grammars and an exhaustive derivation enumerator used as an
//! oracle for the chart decoder. The enumerator shares no code with the
//! decoder beyond the rule types and feature names.

#![allow(dead_code)]

pub mod counting;

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;
use sentiparse::grammar::{
    CombinationRule, DictionaryRule, Grammar, Pattern, PatternSymbol, Polarity, PolarityDist, RuleType,
};
use sentiparse::ranking::{comb_rule_feature, dict_rule_feature, Weights, COMB_HIT, DICT_HIT};

pub const VOCAB: &[&str] = &["good", "bad", "not", "very", "but", "fun", "dull", "the"];
pub const OOV: &[&str] = &["zz", "qq"];

/// Multiples of 1/8 keep every sum of scores exact.
pub fn dyadic<R: Rng>(rng: &mut R, max: i32) -> f64 {
    rng.gen_range(-8 * max..=8 * max) as f64 / 8.0
}

fn word<R: Rng>(rng: &mut R) -> String {
    VOCAB.choose(rng).unwrap().to_string()
}

fn polarity<R: Rng>(rng: &mut R) -> Polarity {
    if rng.gen_bool(0.5) {
        Polarity::Positive
    } else {
        Polarity::Negative
    }
}

/// At most 12 rules: 2–7 dictionary rules and 0–5 combination rules.
pub fn random_grammar<R: Rng>(rng: &mut R) -> Grammar {
    let mut dictionary = Vec::new();
    let mut seen = HashSet::new();
    let n_dict = rng.gen_range(2..=7);
    while dictionary.len() < n_dict {
        let len = if rng.gen_bool(0.75) { 1 } else { 2 };
        let fragment: Vec<String> = (0..len).map(|_| word(rng)).collect();
        if !seen.insert(fragment.clone()) {
            continue;
        }
        let lhs = polarity(rng);
        let p = rng.gen_range(0.51..0.99);
        dictionary.push(DictionaryRule { lhs, fragment, dist: PolarityDist::with_prob(lhs, p), count_neg: 0, count_pos: 0 });
    }
    let mut combinations = Vec::new();
    let mut seen = HashSet::new();
    let n_comb = rng.gen_range(0..=5);
    let mut attempts = 0;
    while combinations.len() < n_comb && attempts < 100 {
        attempts += 1;
        let lhs = polarity(rng);
        let x = polarity(rng);
        let slot = PatternSymbol::Slot(x);
        let wd = |rng: &mut R| PatternSymbol::Word(word(rng));
        let (symbols, rule_type) = match rng.gen_range(0..5) {
            0 => (vec![wd(rng), slot], None),
            1 => (vec![slot, wd(rng)], None),
            2 => (vec![wd(rng), wd(rng), slot], None),
            3 => (vec![wd(rng), slot, wd(rng)], None),
            _ => (vec![slot, wd(rng), PatternSymbol::Slot(x.opposite())], Some(RuleType::Contrast)),
        };
        let pattern = Pattern(symbols);
        if !seen.insert((lhs, pattern.clone())) {
            continue;
        }
        let rule_type = rule_type.unwrap_or_else(|| {
            if lhs != x {
                RuleType::Negation
            } else if rng.gen_bool(0.5) {
                RuleType::Strengthen
            } else {
                RuleType::Weaken
            }
        });
        let theta = (0..=pattern.slot_count()).map(|_| dyadic(rng, 6)).collect();
        combinations.push(CombinationRule { lhs, pattern, rule_type, theta, type_counts: BTreeMap::new() });
    }
    let tau_c2 = *[0.5, 0.6, 0.7].choose(rng).unwrap();
    Grammar::new(dictionary, combinations, 7, tau_c2).expect("valid random grammar")
}

pub fn random_sentence<R: Rng>(rng: &mut R, max_len: usize) -> Vec<String> {
    let n = rng.gen_range(1..=max_len);
    (0..n)
        .map(|_| if rng.gen_bool(0.15) { OOV.choose(rng).unwrap().to_string() } else { word(rng) })
        .collect()
}

/// Dyadic weights on the hit features and a random subset of rule features.
pub fn random_weights<R: Rng>(rng: &mut R, grammar: &Grammar) -> Weights {
    let mut w = Weights::new();
    w.set(DICT_HIT, dyadic(rng, 2));
    w.set(COMB_HIT, dyadic(rng, 2));
    for r in grammar.dictionary() {
        if rng.gen_bool(0.7) {
            w.set(&dict_rule_feature(&r.id()), dyadic(rng, 2));
        }
    }
    for r in grammar.combinations() {
        if rng.gen_bool(0.7) {
            w.set(&comb_rule_feature(&r.id()), dyadic(rng, 2));
        }
    }
    w
}

/// One derivation summary: score, rule applications, and polarity.
#[derive(Debug, Clone, Copy)]
pub struct Deriv {
    pub score: f64,
    pub apps: usize,
    /// `(p_neg, p_pos)`; `None` for E.
    pub dist: Option<(f64, f64)>,
}

impl Deriv {
    fn key(&self) -> (u64, usize, Option<(u64, u64)>) {
        (self.score.to_bits(), self.apps, self.dist.map(|(a, b)| (a.to_bits(), b.to_bits())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Sym {
    N,
    P,
    E,
}

fn sym_of(p: Polarity) -> Sym {
    match p {
        Polarity::Negative => Sym::N,
        Polarity::Positive => Sym::P,
    }
}

fn prob(d: (f64, f64), p: Polarity) -> f64 {
    match p {
        Polarity::Negative => d.0,
        Polarity::Positive => d.1,
    }
}

fn with_prob(p: Polarity, v: f64) -> (f64, f64) {
    match p {
        Polarity::Negative => (v, 1.0 - v),
        Polarity::Positive => (1.0 - v, v),
    }
}

fn c1(lhs: Polarity, d: (f64, f64)) -> bool {
    prob(d, lhs) > prob(d, lhs.opposite())
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Every constraint-satisfying derivation of every cell, deduplicated by
/// `(score, applications, dist)`.
pub struct Oracle<'a> {
    grammar: &'a Grammar,
    weights: &'a Weights,
    tokens: &'a [String],
    memo: HashMap<(usize, usize, Sym), Vec<Deriv>>,
}

impl<'a> Oracle<'a> {
    pub fn new(grammar: &'a Grammar, weights: &'a Weights, tokens: &'a [String]) -> Self {
        Oracle { grammar, weights, tokens, memo: HashMap::new() }
    }

    fn unigram(&self, t: &str) -> bool {
        self.grammar.dictionary().iter().any(|r| r.fragment.len() == 1 && r.fragment[0] == t)
    }

    fn derivs(&mut self, i: usize, j: usize, sym: Sym) -> Vec<Deriv> {
        if let Some(v) = self.memo.get(&(i, j, sym)) {
            return v.clone();
        }
        let mut out = Vec::new();
        match sym {
            Sym::E => {
                if self.tokens[i..j].iter().all(|t| !self.unigram(t)) {
                    out.push(Deriv { score: 0.0, apps: 1, dist: None });
                }
            }
            Sym::N | Sym::P => {
                let x = if sym == Sym::N { Polarity::Negative } else { Polarity::Positive };
                self.dictionary(i, j, x, &mut out);
                self.combination(i, j, x, &mut out);
                self.glue(i, j, x, &mut out);
                self.auxiliary(i, j, x, sym, &mut out);
            }
        }
        let mut seen = HashSet::new();
        out.retain(|d| seen.insert(d.key()));
        self.memo.insert((i, j, sym), out.clone());
        out
    }

    fn dictionary(&self, i: usize, j: usize, x: Polarity, out: &mut Vec<Deriv>) {
        for r in self.grammar.dictionary() {
            if r.lhs == x && r.fragment.as_slice() == &self.tokens[i..j] {
                let d = (r.dist.p_neg(), r.dist.p_pos());
                if c1(x, d) {
                    let score = self.weights.get(DICT_HIT) + self.weights.get(&dict_rule_feature(&r.id()));
                    out.push(Deriv { score, apps: 1, dist: Some(d) });
                }
            }
        }
    }

    fn combination(&mut self, i: usize, j: usize, x: Polarity, out: &mut Vec<Deriv>) {
        let tau = self.grammar.tau_c2();
        let rules: Vec<CombinationRule> = self.grammar.combinations().iter().filter(|r| r.lhs == x).cloned().collect();
        for r in rules {
            let local = self.weights.get(COMB_HIT) + self.weights.get(&comb_rule_feature(&r.id()));
            for spans in segmentations(r.pattern.symbols(), self.tokens, i, j) {
                // Cartesian product over the slot derivations passing C2.
                let mut partial: Vec<(f64, usize, Vec<f64>)> = vec![(local, 1, Vec::new())];
                for &(a, b, p) in &spans {
                    let opts: Vec<Deriv> = self
                        .derivs(a, b, sym_of(p))
                        .into_iter()
                        .filter(|d| d.dist.is_some_and(|dd| prob(dd, p) > tau))
                        .collect();
                    let mut next = Vec::new();
                    for (s, n, xs) in &partial {
                        for d in &opts {
                            let mut xs = xs.clone();
                            xs.push(prob(d.dist.unwrap(), p));
                            next.push((s + d.score, n + d.apps, xs));
                        }
                    }
                    partial = next;
                }
                for (score, apps, xs) in partial {
                    let z = r.theta[0] + r.theta[1..].iter().zip(&xs).map(|(t, v)| t * v).sum::<f64>();
                    let d = with_prob(x, sigmoid(z));
                    if c1(x, d) {
                        out.push(Deriv { score, apps, dist: Some(d) });
                    }
                }
            }
        }
    }

    fn glue(&mut self, i: usize, j: usize, x: Polarity, out: &mut Vec<Deriv>) {
        for k in i + 1..j {
            for l in [Polarity::Negative, Polarity::Positive] {
                for r in [Polarity::Negative, Polarity::Positive] {
                    let left = self.derivs(i, k, sym_of(l));
                    let right = self.derivs(k, j, sym_of(r));
                    for a in &left {
                        for b in &right {
                            let (da, db) = (a.dist.unwrap(), b.dist.unwrap());
                            let agree = prob(da, x) * prob(db, x);
                            let disagree = prob(da, x.opposite()) * prob(db, x.opposite());
                            if agree + disagree <= 0.0 {
                                continue;
                            }
                            let d = with_prob(x, agree / (agree + disagree));
                            if c1(x, d) {
                                out.push(Deriv { score: a.score + b.score, apps: a.apps + b.apps + 1, dist: Some(d) });
                            }
                        }
                    }
                }
            }
        }
    }

    fn auxiliary(&mut self, i: usize, j: usize, x: Polarity, sym: Sym, out: &mut Vec<Deriv>) {
        for k in i + 1..j {
            for (e_span, x_span) in [((i, k), (k, j)), ((k, j), (i, k))] {
                let e = self.derivs(e_span.0, e_span.1, Sym::E);
                if e.is_empty() {
                    continue;
                }
                for d in self.derivs(x_span.0, x_span.1, sym) {
                    if c1(x, d.dist.unwrap()) {
                        out.push(Deriv { score: d.score, apps: d.apps + 2, dist: d.dist });
                    }
                }
            }
        }
    }

    /// Best labeled full-span derivation: `(score, applications, label)`,
    /// ties broken toward fewer applications, then N before P.
    pub fn best_labeled(&mut self) -> Option<(f64, usize, Polarity)> {
        let n = self.tokens.len();
        let mut best: Option<(f64, usize, Polarity)> = None;
        for (sym, label) in [(Sym::N, Polarity::Negative), (Sym::P, Polarity::Positive)] {
            for d in self.derivs(0, n, sym) {
                let cand = (d.score, d.apps + 1, label);
                let better = match best {
                    None => true,
                    Some((s, a, _)) => cand.0 > s || (cand.0 == s && cand.1 < a),
                };
                if better {
                    best = Some(cand);
                }
            }
        }
        best
    }

    /// Number of distinct derivation summaries at the full span.
    pub fn full_span_count(&mut self) -> usize {
        let n = self.tokens.len();
        [Sym::N, Sym::P, Sym::E].iter().map(|&s| self.derivs(0, n, s).len()).sum()
    }
}

/// Slot spans for every way `symbols` covers exactly `[i, j)`.
fn segmentations(symbols: &[PatternSymbol], tokens: &[String], i: usize, j: usize) -> Vec<Vec<(usize, usize, Polarity)>> {
    let mut results = Vec::new();
    fn go(
        symbols: &[PatternSymbol],
        tokens: &[String],
        pos: usize,
        end: usize,
        acc: &mut Vec<(usize, usize, Polarity)>,
        results: &mut Vec<Vec<(usize, usize, Polarity)>>,
    ) {
        if symbols.is_empty() {
            if pos == end {
                results.push(acc.clone());
            }
            return;
        }
        match &symbols[0] {
            PatternSymbol::Word(w) => {
                if pos < end && &tokens[pos] == w {
                    go(&symbols[1..], tokens, pos + 1, end, acc, results);
                }
            }
            PatternSymbol::Slot(p) => {
                for q in pos + 1..=end {
                    acc.push((pos, q, *p));
                    go(&symbols[1..], tokens, q, end, acc, results);
                    acc.pop();
                }
            }
        }
    }
    go(symbols, tokens, i, j, &mut Vec::new(), &mut results);
    results
}
