//! Grammar learning from sentence-level labels: negation-aware fragment
//! counting, generalization of dictionary rules into combination rules, and
//! the alternating outer loop that ties them together.

use std::collections::{BTreeMap, HashMap, HashSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::Corpus;
use crate::grammar::{
    CombinationRule, DictionaryRule, Grammar, GrammarError, Pattern, PatternSymbol, Polarity, PolarityDist,
    RuleType, DEFAULT_LMAX, DEFAULT_TAU_C2,
};
use crate::parser::align;
use crate::polarity::{fit_rule_params, CompositionInput, FitConfig, PolarityError};
use crate::stopwords::is_filler;

#[derive(Debug, Error)]
pub enum InductionError {
    #[error("invalid induction config: {0}")]
    Config(String),
    #[error(transparent)]
    Grammar(#[from] GrammarError),
    #[error(transparent)]
    Polarity(#[from] PolarityError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InductionConfig {
    /// Minimum number of sentences containing a fragment.
    pub tau_f: u64,
    /// Slot-polarity confidence a sub-fragment needs to be generalized.
    pub tau_p: f64,
    /// Strengthen/weaken margin.
    pub tau_delta: f64,
    /// A combination rule needs strictly more supporting fragments than this.
    pub tau_r: u64,
    /// Majority-type purity threshold.
    pub tau_c: f64,
    pub l_max: usize,
    pub iterations: usize,
    /// C2 threshold stored in the emitted grammar.
    pub tau_c2: f64,
    pub fit: FitConfig,
}

impl Default for InductionConfig {
    fn default() -> Self {
        InductionConfig {
            tau_f: 4,
            tau_p: 0.7,
            tau_delta: 0.05,
            tau_r: 4,
            tau_c: 0.75,
            l_max: DEFAULT_LMAX,
            iterations: 3,
            tau_c2: DEFAULT_TAU_C2,
            fit: FitConfig::default(),
        }
    }
}

impl InductionConfig {
    pub fn validate(&self) -> Result<(), InductionError> {
        let bad = |msg: &str| Err(InductionError::Config(msg.to_string()));
        if self.tau_f < 1 {
            return bad("tau_f must be at least 1");
        }
        if !(self.tau_p > 0.5 && self.tau_p < 1.0) {
            return bad("tau_p must lie in (0.5, 1)");
        }
        if !(self.tau_delta > 0.0 && self.tau_delta < 0.5) {
            return bad("tau_delta must lie in (0, 0.5)");
        }
        if !(self.tau_c > 0.5 && self.tau_c <= 1.0) {
            return bad("tau_c must lie in (0.5, 1]");
        }
        if self.iterations < 1 {
            return bad("at least one iteration is required");
        }
        if self.l_max < 1 {
            return bad("l_max must be positive");
        }
        if !(self.tau_c2 >= 0.5 && self.tau_c2 < 1.0) {
            return bad("tau_c2 must lie in [0.5, 1)");
        }
        Ok(())
    }
}

/// `P(X|f) = (#(f,X) + 1) / (#(f,N) + #(f,P) + 2)`.
pub fn laplace(count_neg: f64, count_pos: f64) -> PolarityDist {
    let denom = count_neg + count_pos + 2.0;
    PolarityDist::with_prob(Polarity::Positive, (count_pos + 1.0) / denom)
}

/// Slot spans of every match of a negation-typed rule anywhere in the
/// sentence.
pub fn negation_slot_spans(tokens: &[String], rules: &[CombinationRule]) -> Vec<(usize, usize)> {
    let n = tokens.len();
    let present: HashSet<&str> = tokens.iter().map(String::as_str).collect();
    let mut spans = Vec::new();
    for rule in rules.iter().filter(|r| r.rule_type == RuleType::Negation) {
        let symbols = rule.pattern.symbols();
        let terminals_present = symbols.iter().all(|s| match s {
            PatternSymbol::Word(w) => present.contains(w.as_str()),
            PatternSymbol::Slot(_) => true,
        });
        if !terminals_present || symbols.len() > n {
            continue;
        }
        for a in 0..n {
            for b in a + symbols.len()..=n {
                let mut slots = Vec::new();
                let mut found = Vec::new();
                align(symbols, tokens, a, b, &mut slots, &mut found);
                for alignment in found {
                    spans.extend(alignment.into_iter().map(|(s, e, _)| (s, e)));
                }
            }
        }
    }
    spans.sort_unstable();
    spans.dedup();
    spans
}

/// True iff `[i, j)` lies inside a slot of some negation-rule match.
pub fn covered_by_negation(tokens: &[String], span: (usize, usize), rules: &[CombinationRule]) -> bool {
    is_covered(&negation_slot_spans(tokens, rules), span)
}

fn is_covered(slot_spans: &[(usize, usize)], (i, j): (usize, usize)) -> bool {
    slot_spans.iter().any(|&(s, e)| s <= i && j <= e)
}

/// Per-fragment sentence counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FragmentCount {
    /// Sentences containing the fragment, ignoring negation coverage. Drives
    /// the Apriori pruning.
    pub raw: u64,
    /// Sentences with at least one occurrence outside every negation slot,
    /// split by label.
    pub neg: u64,
    pub pos: u64,
}

impl FragmentCount {
    pub fn total(&self) -> u64 {
        self.neg + self.pos
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FragmentCounts {
    table: BTreeMap<Vec<String>, FragmentCount>,
}

impl FragmentCounts {
    pub fn get(&self, fragment: &[String]) -> Option<&FragmentCount> {
        self.table.get(fragment)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[String], &FragmentCount)> {
        self.table.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Fragments whose negation-adjusted count reaches `tau_f`.
    pub fn frequent(&self, tau_f: u64) -> impl Iterator<Item = (&[String], &FragmentCount)> {
        self.iter().filter(move |(_, c)| c.total() >= tau_f)
    }
}

/// Length-ordered counting with Apriori pruning.
///
/// A fragment of length ℓ is only counted when both of its length-(ℓ−1)
/// sub-fragments appeared in at least `tau_f` sentences. Pruning uses the raw
/// containment count, which can only shrink as fragments grow, so the
/// surviving set equals what exhaustive counting would keep.
pub fn count_fragments(corpus: &Corpus, negation_rules: &[CombinationRule], tau_f: u64, l_max: usize) -> FragmentCounts {
    let coverage: Vec<Vec<(usize, usize)>> =
        corpus.sentences().iter().map(|s| negation_slot_spans(&s.tokens, negation_rules)).collect();
    let mut table = BTreeMap::new();
    let mut previous: HashSet<&[String]> = HashSet::new();
    for len in 1..=l_max {
        let mut level: HashMap<&[String], FragmentCount> = HashMap::new();
        for (sentence, covered) in corpus.sentences().iter().zip(&coverage) {
            let tokens = &sentence.tokens;
            if tokens.len() < len {
                continue;
            }
            let mut seen: HashMap<&[String], bool> = HashMap::new();
            for i in 0..=tokens.len() - len {
                let frag = &tokens[i..i + len];
                if len > 1 && !(previous.contains(&frag[..len - 1]) && previous.contains(&frag[1..])) {
                    continue;
                }
                let uncovered = !is_covered(covered, (i, i + len));
                *seen.entry(frag).or_insert(false) |= uncovered;
            }
            for (frag, uncovered) in seen {
                let c = level.entry(frag).or_default();
                c.raw += 1;
                if uncovered {
                    match sentence.label {
                        Polarity::Negative => c.neg += 1,
                        Polarity::Positive => c.pos += 1,
                    }
                }
            }
        }
        previous = level.iter().filter(|(_, c)| c.raw >= tau_f).map(|(f, _)| *f).collect();
        for (frag, c) in level {
            if c.raw >= tau_f {
                table.insert(frag.to_vec(), c);
            }
        }
        if previous.is_empty() {
            break;
        }
    }
    FragmentCounts { table }
}

/// Dictionary rules from sentence-level labels, skipping occurrences inside
/// the slots of `comb_rules`' negation rules.
pub fn mine_dictionary_rules(corpus: &Corpus, comb_rules: &[CombinationRule], config: &InductionConfig) -> Vec<DictionaryRule> {
    if corpus.is_empty() {
        return Vec::new();
    }
    let counts = count_fragments(corpus, comb_rules, config.tau_f, config.l_max);
    let (n_neg, n_pos) = corpus.class_counts();
    // Reweight toward a balanced corpus; identity when balanced.
    let total = (n_neg + n_pos) as f64;
    let w_neg = if n_neg > 0 { total / (2.0 * n_neg as f64) } else { 1.0 };
    let w_pos = if n_pos > 0 { total / (2.0 * n_pos as f64) } else { 1.0 };
    let mut rules = Vec::new();
    for (frag, c) in counts.frequent(config.tau_f) {
        if is_filler(frag) {
            continue;
        }
        let dist = laplace(w_neg * c.neg as f64, w_pos * c.pos as f64);
        let Some(lhs) = dist.argmax() else {
            continue;
        };
        rules.push(DictionaryRule { lhs, fragment: frag.to_vec(), dist, count_neg: c.neg, count_pos: c.pos });
    }
    rules
}

/// How one dictionary fragment generalizes into a pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct Generalization {
    pub lhs: Polarity,
    pub pattern: Pattern,
    /// `None` for a single-slot occurrence within the ±τ_Δ band.
    pub rule_type: Option<RuleType>,
    /// Slot-polarity probabilities of the replaced sub-fragments.
    pub subs: Vec<f64>,
    /// `P(lhs|f)` of the whole fragment.
    pub target: f64,
}

fn pattern_with(fragment: &[String], replaced: &[(usize, usize, Polarity)]) -> Pattern {
    let mut symbols = Vec::new();
    let mut pos = 0;
    for &(i, j, p) in replaced {
        symbols.extend(fragment[pos..i].iter().cloned().map(PatternSymbol::Word));
        symbols.push(PatternSymbol::Slot(p));
        pos = j;
    }
    symbols.extend(fragment[pos..].iter().cloned().map(PatternSymbol::Word));
    Pattern(symbols)
}

/// Every single-slot and contrast generalization of `rule` whose replaced
/// sub-fragments are confident dictionary rules.
pub fn generalizations(
    rule: &DictionaryRule,
    lookup: &HashMap<&[String], &DictionaryRule>,
    tau_p: f64,
    tau_delta: f64,
) -> Vec<Generalization> {
    let f = &rule.fragment;
    let n = f.len();
    let x = rule.lhs;
    let p_f = rule.dist.prob(x);
    // Confident sub-fragments: (i, j, polarity, probability).
    let mut subs = Vec::new();
    for i in 0..n {
        for j in i + 1..=n {
            if i == 0 && j == n {
                continue;
            }
            if let Some(sub) = lookup.get(&f[i..j]) {
                let q = sub.dist.prob(sub.lhs);
                if q > tau_p {
                    subs.push((i, j, sub.lhs, q));
                }
            }
        }
    }
    let mut out = Vec::new();
    for &(i, j, l, q) in &subs {
        let rule_type = if l != x {
            Some(RuleType::Negation)
        } else if p_f > q + tau_delta {
            Some(RuleType::Strengthen)
        } else if p_f < q - tau_delta {
            Some(RuleType::Weaken)
        } else {
            None
        };
        out.push(Generalization { lhs: x, pattern: pattern_with(f, &[(i, j, l)]), rule_type, subs: vec![q], target: p_f });
    }
    for &(i1, j1, l1, q1) in &subs {
        for &(i2, j2, l2, q2) in &subs {
            // Non-adjacent, non-overlapping, differing polarities.
            if j1 < i2 && l1 != l2 {
                out.push(Generalization {
                    lhs: x,
                    pattern: pattern_with(f, &[(i1, j1, l1), (i2, j2, l2)]),
                    rule_type: Some(RuleType::Contrast),
                    subs: vec![q1, q2],
                    target: p_f,
                });
            }
        }
    }
    out
}

fn fragment_index(dict_rules: &[DictionaryRule]) -> HashMap<&[String], &DictionaryRule> {
    dict_rules.iter().map(|r| (r.fragment.as_slice(), r)).collect()
}

#[derive(Default)]
struct Tally {
    total: u64,
    types: BTreeMap<RuleType, u64>,
}

/// Combination rules generalized from the dictionary inventory, each
/// fragment counted once. `theta` is left at zeros.
pub fn mine_combination_rules(dict_rules: &[DictionaryRule], config: &InductionConfig) -> Vec<CombinationRule> {
    let lookup = fragment_index(dict_rules);
    let mut tallies: BTreeMap<(Polarity, Pattern), Tally> = BTreeMap::new();
    for rule in dict_rules {
        for g in generalizations(rule, &lookup, config.tau_p, config.tau_delta) {
            let t = tallies.entry((g.lhs, g.pattern)).or_default();
            t.total += 1;
            if let Some(ty) = g.rule_type {
                *t.types.entry(ty).or_default() += 1;
            }
        }
    }
    let mut rules = Vec::new();
    for ((lhs, pattern), tally) in tallies {
        if tally.total <= config.tau_r {
            continue;
        }
        let typed: u64 = tally.types.values().sum();
        let Some((&rule_type, &top)) = tally.types.iter().max_by_key(|(_, c)| **c) else {
            continue;
        };
        if (top as f64) / (typed as f64) <= config.tau_c {
            continue;
        }
        let rule = CombinationRule {
            lhs,
            theta: vec![0.0; pattern.slot_count() + 1],
            pattern,
            rule_type,
            type_counts: tally.types,
        };
        if rule.validate().is_ok() {
            rules.push(rule);
        }
    }
    rules
}

/// Regression examples for each combination rule, aligned with `comb_rules`:
/// `x = (1, P(L_w|w), ..)`, `y = P(lhs|f)` over every dictionary fragment
/// that generalizes to the rule.
pub fn build_polarity_training(
    dict_rules: &[DictionaryRule],
    comb_rules: &[CombinationRule],
    config: &InductionConfig,
) -> Vec<Vec<CompositionInput>> {
    let lookup = fragment_index(dict_rules);
    let index: HashMap<(Polarity, &Pattern), usize> =
        comb_rules.iter().enumerate().map(|(i, r)| ((r.lhs, &r.pattern), i)).collect();
    let mut data = vec![Vec::new(); comb_rules.len()];
    for rule in dict_rules {
        for g in generalizations(rule, &lookup, config.tau_p, config.tau_delta) {
            if let Some(&i) = index.get(&(g.lhs, &g.pattern)) {
                let mut x = Vec::with_capacity(g.subs.len() + 1);
                x.push(1.0);
                x.extend(&g.subs);
                data[i].push(CompositionInput { x, y: g.target });
            }
        }
    }
    data
}

pub const MIN_TRAINING_PAIRS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct IterationStats {
    pub dictionary_rules: usize,
    pub combination_rules: usize,
    pub negation_rules: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RuleFit {
    pub rule: String,
    pub pairs: usize,
    pub converged: bool,
    pub epochs: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct InductionReport {
    pub iterations: Vec<IterationStats>,
    pub fits: Vec<RuleFit>,
    /// Rules dropped for having fewer than [`MIN_TRAINING_PAIRS`] examples.
    pub dropped: Vec<String>,
}

/// Alternates dictionary and combination mining `iterations` times, then
/// fits every combination rule's θ by SGD.
pub fn learn_grammar(corpus: &Corpus, config: &InductionConfig, seed: u64) -> Result<(Grammar, InductionReport), InductionError> {
    config.validate()?;
    let mut report = InductionReport::default();
    let mut dict = Vec::new();
    let mut comb: Vec<CombinationRule> = Vec::new();
    for t in 0..config.iterations {
        dict = mine_dictionary_rules(corpus, &comb, config);
        comb = mine_combination_rules(&dict, config);
        let stats = IterationStats {
            dictionary_rules: dict.len(),
            combination_rules: comb.len(),
            negation_rules: comb.iter().filter(|r| r.rule_type == RuleType::Negation).count(),
        };
        log::info!(
            "induction iteration {}: {} dictionary rules, {} combination rules ({} negation)",
            t + 1,
            stats.dictionary_rules,
            stats.combination_rules,
            stats.negation_rules
        );
        report.iterations.push(stats);
    }

    let data = build_polarity_training(&dict, &comb, config);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fitted = Vec::with_capacity(comb.len());
    for (mut rule, examples) in comb.into_iter().zip(data) {
        if examples.len() < MIN_TRAINING_PAIRS {
            log::warn!("dropping `{}`: {} training pairs", rule.id(), examples.len());
            report.dropped.push(rule.id());
            continue;
        }
        let fit = fit_rule_params(&examples, &config.fit, &mut rng)?;
        report.fits.push(RuleFit { rule: rule.id(), pairs: examples.len(), converged: fit.converged, epochs: fit.epochs });
        rule.theta = fit.theta;
        fitted.push(rule);
    }
    let grammar = Grammar::new(dict, fitted, config.l_max, config.tau_c2)?;
    Ok((grammar, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::LabeledSentence;

    fn corpus(lines: &[(&str, Polarity)]) -> Corpus {
        Corpus::new(lines.iter().map(|(s, l)| LabeledSentence::new(s, *l).unwrap()).collect())
    }

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    fn negation(pattern: &str) -> CombinationRule {
        CombinationRule {
            lhs: Polarity::Negative,
            pattern: pattern.parse().unwrap(),
            rule_type: RuleType::Negation,
            theta: vec![0.0, 0.0],
            type_counts: Default::default(),
        }
    }

    fn dict(lhs: Polarity, fragment: &str, p: f64) -> DictionaryRule {
        DictionaryRule {
            lhs,
            fragment: toks(fragment),
            dist: PolarityDist::with_prob(lhs, p),
            count_neg: 0,
            count_pos: 0,
        }
    }

    #[test]
    fn negation_coverage_examples() {
        let s = toks("this is not a good movie");
        let rules = vec![negation("not [P]")];
        assert!(covered_by_negation(&s, (4, 5), &rules));
        assert!(!covered_by_negation(&s, (2, 5), &rules));
        assert!(!covered_by_negation(&s, (4, 5), &[]));
    }

    #[test]
    fn laplace_example() {
        let c = corpus(&[
            ("good one", Polarity::Positive),
            ("good two", Polarity::Positive),
            ("good three", Polarity::Positive),
            ("good four", Polarity::Negative),
            ("bad a", Polarity::Negative),
            ("bad b", Polarity::Negative),
        ]);
        let cfg = InductionConfig { tau_f: 4, ..Default::default() };
        let rules = mine_dictionary_rules(&c, &[], &cfg);
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].fragment, ["good"]);
        // 3 positive, 1 negative, reweighted by 6 / (2 * 3) = 1 on each side.
        assert!((rules[0].dist.p_pos() - 2.0 / 3.0).abs() < 1e-12);
        let cfg = InductionConfig { tau_f: 5, ..Default::default() };
        assert!(mine_dictionary_rules(&c, &[], &cfg).is_empty());
    }

    #[test]
    fn per_sentence_counting() {
        let c = corpus(&[("good good good", Polarity::Positive)]);
        let counts = count_fragments(&c, &[], 1, 3);
        assert_eq!(counts.get(&toks("good")).unwrap().pos, 1);
        assert_eq!(counts.get(&toks("good good")).unwrap().raw, 1);
    }

    #[test]
    fn fig7_negation_rule() {
        let mut d = vec![
            dict(Polarity::Positive, "good", 0.9),
            dict(Polarity::Positive, "as expected", 0.85),
            dict(Polarity::Positive, "funny", 0.8),
            dict(Polarity::Positive, "well done", 0.88),
            dict(Polarity::Positive, "fun", 0.9),
            dict(Polarity::Negative, "is not good", 0.8),
            dict(Polarity::Negative, "is not as expected", 0.75),
            dict(Polarity::Negative, "is not funny", 0.7),
            dict(Polarity::Negative, "is not well done", 0.8),
        ];
        let cfg = InductionConfig::default();
        assert!(mine_combination_rules(&d, &cfg).is_empty());
        d.push(dict(Polarity::Negative, "is not fun", 0.8));
        let rules = mine_combination_rules(&d, &cfg);
        let ids: Vec<String> = rules.iter().map(CombinationRule::id).collect();
        assert_eq!(ids, ["N→is not [P]"]);
        assert_eq!(rules[0].rule_type, RuleType::Negation);
        let data = build_polarity_training(&d, &rules, &cfg);
        assert_eq!(data[0].len(), 5);
        assert!(data[0].iter().any(|e| e.x == [1.0, 0.9] && e.y == 0.8));
    }

    #[test]
    fn strengthen_typing() {
        let mut d = Vec::new();
        for (w, q) in [("good", 0.75), ("fun", 0.72), ("great", 0.8), ("nice", 0.71), ("cool", 0.74)] {
            d.push(dict(Polarity::Positive, w, q));
            d.push(dict(Polarity::Positive, &format!("lot of {w}"), q + 0.15));
        }
        let rules = mine_combination_rules(&d, &InductionConfig::default());
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].id(), "P→lot of [P]");
        assert_eq!(rules[0].rule_type, RuleType::Strengthen);
    }

    #[test]
    fn slot_at_threshold_is_not_replaced() {
        let d = vec![dict(Polarity::Positive, "good", 0.7), dict(Polarity::Negative, "not good", 0.8)];
        let lookup = fragment_index(&d);
        assert!(generalizations(&d[1], &lookup, 0.7, 0.05).is_empty());
        assert_eq!(generalizations(&d[1], &lookup, 0.69, 0.05).len(), 1);
    }

    #[test]
    fn contrast_generalization() {
        let d = vec![
            dict(Polarity::Negative, "dull", 0.9),
            dict(Polarity::Positive, "fun", 0.9),
            dict(Polarity::Positive, "dull but fun", 0.8),
        ];
        let lookup = fragment_index(&d);
        let gens = generalizations(&d[2], &lookup, 0.7, 0.05);
        let contrast: Vec<_> = gens.iter().filter(|g| g.rule_type == Some(RuleType::Contrast)).collect();
        assert_eq!(contrast.len(), 1);
        assert_eq!(contrast[0].pattern.to_string(), "[N] but [P]");
        assert_eq!(contrast[0].subs, [0.9, 0.9]);
    }

    #[test]
    fn config_validation() {
        assert!(InductionConfig::default().validate().is_ok());
        assert!(InductionConfig { tau_p: 0.5, ..Default::default() }.validate().is_err());
        assert!(InductionConfig { tau_c: 0.5, ..Default::default() }.validate().is_err());
        assert!(InductionConfig { iterations: 0, ..Default::default() }.validate().is_err());
        assert!(InductionConfig { tau_f: 0, ..Default::default() }.validate().is_err());
    }
}
