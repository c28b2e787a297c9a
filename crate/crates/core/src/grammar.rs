//! Sentiment grammar: symbols, rules and the induced rule inventory.
//!
//! The stored inventory holds dictionary rules (`X → w_0^k`) and combination
//! rules (`X → c` with one or two polarity slots). Glue, OOV, auxiliary and
//! start rules are built in and never stored.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_LMAX: usize = 7;
pub const DEFAULT_TAU_C2: f64 = 0.6;

const HEADER_MAGIC: &str = "sgrammar";
const HEADER_VERSION: &str = "v1";

#[derive(Debug, Error)]
pub enum GrammarError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid grammar: {0}")]
    Validation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Non-terminal of the sentiment grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NonTerminal {
    N,
    P,
    S,
    E,
}

impl NonTerminal {
    pub fn polarity(self) -> Option<Polarity> {
        match self {
            NonTerminal::N => Some(Polarity::Negative),
            NonTerminal::P => Some(Polarity::Positive),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NonTerminal::N => "N",
            NonTerminal::P => "P",
            NonTerminal::S => "S",
            NonTerminal::E => "E",
        }
    }
}

impl fmt::Display for NonTerminal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Binary polarity label. `Negative` pairs with `N`, `Positive` with `P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarity {
    Negative,
    Positive,
}

impl Polarity {
    pub const BOTH: [Polarity; 2] = [Polarity::Negative, Polarity::Positive];

    pub fn opposite(self) -> Polarity {
        match self {
            Polarity::Negative => Polarity::Positive,
            Polarity::Positive => Polarity::Negative,
        }
    }

    pub fn symbol(self) -> NonTerminal {
        match self {
            Polarity::Negative => NonTerminal::N,
            Polarity::Positive => NonTerminal::P,
        }
    }

    /// Short label used on the command line and in output records.
    pub fn short(self) -> &'static str {
        match self {
            Polarity::Negative => "neg",
            Polarity::Positive => "pos",
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol().as_str())
    }
}

impl FromStr for Polarity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "n" | "neg" | "negative" | "0" | "-1" => Ok(Polarity::Negative),
            "p" | "pos" | "positive" | "1" | "+1" => Ok(Polarity::Positive),
            other => Err(format!("unknown polarity label `{other}`")),
        }
    }
}

/// Tolerance on `p_neg + p_pos = 1`.
pub const DIST_TOLERANCE: f64 = 1e-9;

/// Two-outcome distribution over (negative, positive).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarityDist {
    p_neg: f64,
    p_pos: f64,
}

impl PolarityDist {
    pub const NEUTRAL: PolarityDist = PolarityDist { p_neg: 0.5, p_pos: 0.5 };

    pub fn new(p_neg: f64, p_pos: f64) -> Option<Self> {
        let in_range = |p: f64| p.is_finite() && (0.0..=1.0).contains(&p);
        if in_range(p_neg) && in_range(p_pos) && (p_neg + p_pos - 1.0).abs() <= DIST_TOLERANCE {
            Some(PolarityDist { p_neg, p_pos })
        } else {
            None
        }
    }

    /// Distribution assigning `p` to `polarity` and `1 - p` to its opposite.
    ///
    /// Panics if `p` is outside `[0, 1]`.
    pub fn with_prob(polarity: Polarity, p: f64) -> Self {
        assert!((0.0..=1.0).contains(&p), "probability {p} out of range");
        match polarity {
            Polarity::Negative => PolarityDist { p_neg: p, p_pos: 1.0 - p },
            Polarity::Positive => PolarityDist { p_neg: 1.0 - p, p_pos: p },
        }
    }

    pub fn p_neg(&self) -> f64 {
        self.p_neg
    }

    pub fn p_pos(&self) -> f64 {
        self.p_pos
    }

    pub fn prob(&self, polarity: Polarity) -> f64 {
        match polarity {
            Polarity::Negative => self.p_neg,
            Polarity::Positive => self.p_pos,
        }
    }

    /// Strictly dominant polarity, `None` on an exact tie.
    pub fn argmax(&self) -> Option<Polarity> {
        if self.p_pos > self.p_neg {
            Some(Polarity::Positive)
        } else if self.p_neg > self.p_pos {
            Some(Polarity::Negative)
        } else {
            None
        }
    }
}

/// Terminal-only lexicon entry `X → fragment`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DictionaryRule {
    pub lhs: Polarity,
    pub fragment: Vec<String>,
    pub dist: PolarityDist,
    pub count_neg: u64,
    pub count_pos: u64,
}

impl DictionaryRule {
    /// Stable identifier, e.g. `P→the movie is`.
    pub fn id(&self) -> String {
        format!("{}→{}", self.lhs, self.fragment.join(" "))
    }

    pub fn count(&self, polarity: Polarity) -> u64 {
        match polarity {
            Polarity::Negative => self.count_neg,
            Polarity::Positive => self.count_pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PatternSymbol {
    Word(String),
    Slot(Polarity),
}

impl fmt::Display for PatternSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternSymbol::Word(w) => f.write_str(w),
            PatternSymbol::Slot(p) => write!(f, "[{p}]"),
        }
    }
}

/// Right-hand side of a combination rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pattern(pub Vec<PatternSymbol>);

impl Pattern {
    pub fn symbols(&self) -> &[PatternSymbol] {
        &self.0
    }

    pub fn slots(&self) -> impl Iterator<Item = Polarity> + '_ {
        self.0.iter().filter_map(|s| match s {
            PatternSymbol::Slot(p) => Some(*p),
            PatternSymbol::Word(_) => None,
        })
    }

    pub fn slot_count(&self) -> usize {
        self.slots().count()
    }

    pub fn first_terminal(&self) -> Option<&str> {
        self.0.iter().find_map(|s| match s {
            PatternSymbol::Word(w) => Some(w.as_str()),
            PatternSymbol::Slot(_) => None,
        })
    }

    /// At least one terminal, one or two slots, no two slots side by side.
    pub fn validate(&self) -> Result<(), String> {
        if self.first_terminal().is_none() {
            return Err(format!("pattern `{self}` has no terminal"));
        }
        let slots = self.slot_count();
        if !(1..=2).contains(&slots) {
            return Err(format!("pattern `{self}` has {slots} slots, expected 1 or 2"));
        }
        let adjacent = self
            .0
            .windows(2)
            .any(|w| matches!((&w[0], &w[1]), (PatternSymbol::Slot(_), PatternSymbol::Slot(_))));
        if adjacent {
            return Err(format!("pattern `{self}` has adjacent slots"));
        }
        Ok(())
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromStr for Pattern {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let symbols = s
            .split_whitespace()
            .map(|tok| match tok {
                "[N]" => PatternSymbol::Slot(Polarity::Negative),
                "[P]" => PatternSymbol::Slot(Polarity::Positive),
                w => PatternSymbol::Word(w.to_string()),
            })
            .collect::<Vec<_>>();
        if symbols.is_empty() {
            return Err("empty pattern".to_string());
        }
        Ok(Pattern(symbols))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RuleType {
    Negation,
    Strengthen,
    Weaken,
    Contrast,
}

impl RuleType {
    pub const ALL: [RuleType; 4] =
        [RuleType::Negation, RuleType::Strengthen, RuleType::Weaken, RuleType::Contrast];

    pub fn as_str(self) -> &'static str {
        match self {
            RuleType::Negation => "negation",
            RuleType::Strengthen => "strengthen",
            RuleType::Weaken => "weaken",
            RuleType::Contrast => "contrast",
        }
    }
}

impl fmt::Display for RuleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RuleType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RuleType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| format!("unknown rule type `{s}`"))
    }
}

/// `X → pattern` with a logistic composition `h(θ·x)` for the lhs polarity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CombinationRule {
    pub lhs: Polarity,
    pub pattern: Pattern,
    pub rule_type: RuleType,
    pub theta: Vec<f64>,
    pub type_counts: BTreeMap<RuleType, u64>,
}

impl CombinationRule {
    /// Stable identifier, e.g. `N→not [P]`.
    pub fn id(&self) -> String {
        format!("{}→{}", self.lhs, self.pattern)
    }

    pub fn slot_count(&self) -> usize {
        self.pattern.slot_count()
    }

    pub fn validate(&self) -> Result<(), String> {
        self.pattern.validate()?;
        let slots: Vec<Polarity> = self.pattern.slots().collect();
        match self.rule_type {
            RuleType::Contrast => {
                if slots.len() != 2 || slots[0] == slots[1] {
                    return Err(format!(
                        "contrast rule `{}` needs two slots of differing polarity",
                        self.id()
                    ));
                }
            }
            _ => {
                if slots.len() != 1 {
                    return Err(format!(
                        "{} rule `{}` needs exactly one slot",
                        self.rule_type,
                        self.id()
                    ));
                }
            }
        }
        if self.theta.len() != slots.len() + 1 {
            return Err(format!(
                "rule `{}` has {} parameters, expected {}",
                self.id(),
                self.theta.len(),
                slots.len() + 1
            ));
        }
        if self.theta.iter().any(|t| !t.is_finite()) {
            return Err(format!("rule `{}` has non-finite parameters", self.id()));
        }
        Ok(())
    }
}

/// The induced rule inventory plus the parser-side settings it was built with.
///
/// Immutable once built; construct through [`Grammar::new`] so the lookup
/// indexes stay consistent with the rule lists.
#[derive(Debug, Clone)]
pub struct Grammar {
    dictionary: Vec<DictionaryRule>,
    combinations: Vec<CombinationRule>,
    l_max: usize,
    tau_c2: f64,
    by_fragment: HashMap<Vec<String>, usize>,
    by_first_terminal: HashMap<String, Vec<usize>>,
    unigrams: HashSet<String>,
    dict_ids: Vec<String>,
    comb_ids: Vec<String>,
}

impl PartialEq for Grammar {
    fn eq(&self, other: &Self) -> bool {
        self.dictionary == other.dictionary
            && self.combinations == other.combinations
            && self.l_max == other.l_max
            && self.tau_c2.to_bits() == other.tau_c2.to_bits()
    }
}

impl Grammar {
    /// Builds a grammar, sorting rules by identifier so equal inventories
    /// compare and serialize identically.
    pub fn new(
        mut dictionary: Vec<DictionaryRule>,
        mut combinations: Vec<CombinationRule>,
        l_max: usize,
        tau_c2: f64,
    ) -> Result<Self, GrammarError> {
        if l_max == 0 {
            return Err(GrammarError::Validation("l_max must be positive".into()));
        }
        if !(0.5..1.0).contains(&tau_c2) {
            return Err(GrammarError::Validation(format!("tau_c2 {tau_c2} outside [0.5, 1)")));
        }
        dictionary.sort_by(|a, b| a.fragment.cmp(&b.fragment));
        combinations.sort_by(|a, b| (a.lhs, &a.pattern).cmp(&(b.lhs, &b.pattern)));

        let mut by_fragment = HashMap::with_capacity(dictionary.len());
        let mut unigrams = HashSet::new();
        for (idx, rule) in dictionary.iter().enumerate() {
            if rule.fragment.is_empty() || rule.fragment.len() > l_max {
                return Err(GrammarError::Validation(format!(
                    "fragment `{}` length {} outside 1..={l_max}",
                    rule.fragment.join(" "),
                    rule.fragment.len()
                )));
            }
            if rule.dist.argmax() != Some(rule.lhs) {
                return Err(GrammarError::Validation(format!(
                    "dictionary rule `{}` lhs disagrees with its distribution",
                    rule.id()
                )));
            }
            if by_fragment.insert(rule.fragment.clone(), idx).is_some() {
                return Err(GrammarError::Validation(format!(
                    "duplicate dictionary fragment `{}`",
                    rule.fragment.join(" ")
                )));
            }
            if rule.fragment.len() == 1 {
                unigrams.insert(rule.fragment[0].clone());
            }
        }

        let mut by_first_terminal: HashMap<String, Vec<usize>> = HashMap::new();
        let mut seen = HashSet::new();
        for (idx, rule) in combinations.iter().enumerate() {
            rule.validate().map_err(GrammarError::Validation)?;
            if !seen.insert((rule.lhs, rule.pattern.clone())) {
                return Err(GrammarError::Validation(format!(
                    "duplicate combination rule `{}`",
                    rule.id()
                )));
            }
            let first = rule.pattern.first_terminal().expect("validated pattern");
            by_first_terminal.entry(first.to_string()).or_default().push(idx);
        }

        let dict_ids = dictionary.iter().map(DictionaryRule::id).collect();
        let comb_ids = combinations.iter().map(CombinationRule::id).collect();
        Ok(Grammar {
            dictionary,
            combinations,
            l_max,
            tau_c2,
            by_fragment,
            by_first_terminal,
            unigrams,
            dict_ids,
            comb_ids,
        })
    }

    pub fn empty(l_max: usize) -> Self {
        Grammar::new(Vec::new(), Vec::new(), l_max, DEFAULT_TAU_C2).expect("valid empty grammar")
    }

    pub fn dictionary(&self) -> &[DictionaryRule] {
        &self.dictionary
    }

    pub fn combinations(&self) -> &[CombinationRule] {
        &self.combinations
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn tau_c2(&self) -> f64 {
        self.tau_c2
    }

    /// Same rules, different C2 threshold.
    pub fn with_tau_c2(&self, tau_c2: f64) -> Result<Self, GrammarError> {
        Grammar::new(self.dictionary.clone(), self.combinations.clone(), self.l_max, tau_c2)
    }

    pub fn lookup_fragment(&self, tokens: &[impl AsRef<str>]) -> Option<&DictionaryRule> {
        self.lookup_index(tokens).map(|i| &self.dictionary[i])
    }

    pub(crate) fn lookup_index(&self, tokens: &[impl AsRef<str>]) -> Option<usize> {
        if tokens.is_empty() || tokens.len() > self.l_max {
            return None;
        }
        let key: Vec<String> = tokens.iter().map(|t| t.as_ref().to_string()).collect();
        self.by_fragment.get(&key).copied()
    }

    /// Combination rules whose first terminal is `word`.
    pub fn combinations_anchored_at(&self, word: &str) -> &[usize] {
        self.by_first_terminal.get(word).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn find_combination(&self, lhs: Polarity, pattern: &Pattern) -> Option<&CombinationRule> {
        self.combinations.iter().find(|r| r.lhs == lhs && &r.pattern == pattern)
    }

    /// A token is out of vocabulary unless it is a single-token dictionary rule.
    pub fn is_oov_token(&self, token: &str) -> bool {
        !self.unigrams.contains(token)
    }

    pub(crate) fn dict_id(&self, idx: usize) -> &str {
        &self.dict_ids[idx]
    }

    pub(crate) fn comb_id(&self, idx: usize) -> &str {
        &self.comb_ids[idx]
    }

    pub fn save<W: Write>(&self, mut sink: W) -> Result<(), GrammarError> {
        writeln!(sink, "{HEADER_MAGIC} {HEADER_VERSION} lmax={} tau_c2={}", self.l_max, fmt_f64(self.tau_c2))?;
        for rule in &self.dictionary {
            writeln!(
                sink,
                "D {} {} {} {} {}\t{}",
                rule.lhs,
                fmt_f64(rule.dist.p_neg()),
                fmt_f64(rule.dist.p_pos()),
                rule.count_neg,
                rule.count_pos,
                rule.fragment.join(" ")
            )?;
        }
        for rule in &self.combinations {
            let theta = rule.theta.iter().map(|t| fmt_f64(*t)).collect::<Vec<_>>().join(",");
            let counts = rule
                .type_counts
                .iter()
                .map(|(t, c)| format!("{t}={c}"))
                .collect::<Vec<_>>()
                .join(",");
            let counts = if counts.is_empty() { "-".to_string() } else { counts };
            writeln!(sink, "C {} {} {} {}\t{}", rule.lhs, rule.rule_type, theta, counts, rule.pattern)?;
        }
        Ok(())
    }

    pub fn load<R: BufRead>(source: R) -> Result<Self, GrammarError> {
        let mut lines = source.lines().enumerate();
        let (l_max, tau_c2) = match lines.next() {
            Some((_, line)) => parse_header(&line?)?,
            None => return Err(parse_err(1, "missing header")),
        };
        let mut dictionary = Vec::new();
        let mut combinations = Vec::new();
        for (idx, line) in lines {
            let line = line?;
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let (head, body) = line
                .split_once('\t')
                .ok_or_else(|| parse_err(lineno, "missing tab separator"))?;
            let fields: Vec<&str> = head.split(' ').collect();
            match fields[0] {
                "D" => dictionary.push(parse_dictionary_line(lineno, &fields, body)?),
                "C" => combinations.push(parse_combination_line(lineno, &fields, body)?),
                other => return Err(parse_err(lineno, format!("unknown record kind `{other}`"))),
            }
        }
        Grammar::new(dictionary, combinations, l_max, tau_c2)
    }

    pub fn save_to_path(&self, path: impl AsRef<std::path::Path>) -> Result<(), GrammarError> {
        let file = std::fs::File::create(path)?;
        let mut writer = std::io::BufWriter::new(file);
        self.save(&mut writer)?;
        writer.flush()?;
        Ok(())
    }

    pub fn load_from_path(path: impl AsRef<std::path::Path>) -> Result<Self, GrammarError> {
        let file = std::fs::File::open(path)?;
        Grammar::load(std::io::BufReader::new(file))
    }
}

/// 17 significant digits: enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_err(line: usize, msg: impl Into<String>) -> GrammarError {
    GrammarError::Parse { line, msg: msg.into() }
}

fn parse_header(line: &str) -> Result<(usize, f64), GrammarError> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some(HEADER_MAGIC) || parts.next() != Some(HEADER_VERSION) {
        return Err(parse_err(1, format!("bad header `{line}`")));
    }
    let mut l_max = None;
    let mut tau_c2 = DEFAULT_TAU_C2;
    for kv in parts {
        let (k, v) = kv.split_once('=').ok_or_else(|| parse_err(1, format!("bad header field `{kv}`")))?;
        match k {
            "lmax" => l_max = Some(v.parse().map_err(|_| parse_err(1, format!("bad lmax `{v}`")))?),
            "tau_c2" => tau_c2 = v.parse().map_err(|_| parse_err(1, format!("bad tau_c2 `{v}`")))?,
            _ => return Err(parse_err(1, format!("unknown header field `{k}`"))),
        }
    }
    let l_max = l_max.ok_or_else(|| parse_err(1, "header lacks lmax"))?;
    Ok((l_max, tau_c2))
}

fn parse_num<T: FromStr>(line: usize, what: &str, s: &str) -> Result<T, GrammarError> {
    s.parse().map_err(|_| parse_err(line, format!("bad {what} `{s}`")))
}

fn parse_lhs(line: usize, s: &str) -> Result<Polarity, GrammarError> {
    match s {
        "N" => Ok(Polarity::Negative),
        "P" => Ok(Polarity::Positive),
        _ => Err(parse_err(line, format!("bad lhs `{s}`"))),
    }
}

fn parse_dictionary_line(line: usize, fields: &[&str], body: &str) -> Result<DictionaryRule, GrammarError> {
    if fields.len() != 6 {
        return Err(parse_err(line, format!("dictionary record has {} fields, expected 6", fields.len())));
    }
    let lhs = parse_lhs(line, fields[1])?;
    let p_neg: f64 = parse_num(line, "p_neg", fields[2])?;
    let p_pos: f64 = parse_num(line, "p_pos", fields[3])?;
    let dist = PolarityDist::new(p_neg, p_pos)
        .ok_or_else(|| parse_err(line, format!("invalid distribution ({p_neg}, {p_pos})")))?;
    let fragment: Vec<String> = body.split_whitespace().map(str::to_string).collect();
    if fragment.is_empty() {
        return Err(parse_err(line, "empty fragment"));
    }
    Ok(DictionaryRule {
        lhs,
        fragment,
        dist,
        count_neg: parse_num(line, "count_neg", fields[4])?,
        count_pos: parse_num(line, "count_pos", fields[5])?,
    })
}

fn parse_combination_line(line: usize, fields: &[&str], body: &str) -> Result<CombinationRule, GrammarError> {
    if !(4..=5).contains(&fields.len()) {
        return Err(parse_err(line, format!("combination record has {} fields, expected 4 or 5", fields.len())));
    }
    let lhs = parse_lhs(line, fields[1])?;
    let rule_type: RuleType = fields[2].parse().map_err(|e: String| parse_err(line, e))?;
    let theta = fields[3]
        .split(',')
        .map(|t| parse_num::<f64>(line, "theta", t))
        .collect::<Result<Vec<_>, _>>()?;
    let mut type_counts = BTreeMap::new();
    if let Some(counts) = fields.get(4).filter(|c| **c != "-") {
        for kv in counts.split(',') {
            let (k, v) = kv.split_once('=').ok_or_else(|| parse_err(line, format!("bad type count `{kv}`")))?;
            let t: RuleType = k.parse().map_err(|e: String| parse_err(line, e))?;
            type_counts.insert(t, parse_num(line, "type count", v)?);
        }
    }
    let pattern: Pattern = body.parse().map_err(|e: String| parse_err(line, e))?;
    let rule = CombinationRule { lhs, pattern, rule_type, theta, type_counts };
    rule.validate().map_err(GrammarError::Validation)?;
    Ok(rule)
}
