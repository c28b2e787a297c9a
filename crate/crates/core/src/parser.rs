//! Bottom-up chart decoding with per-cell K-best lists.
//!
//! Every cell `(i, j, X)` is filled by lazily merging its candidate rule
//! applications: each application contributes a frontier over the sorted
//! child lists, and a single heap pops derivations in final order until K of
//! them satisfy the constraints. Scores are additive and child lists sorted,
//! so the pop order is exact.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use crate::grammar::{Grammar, NonTerminal, PatternSymbol, Polarity, PolarityDist};
use crate::polarity::{eval_combination, eval_glue};
use crate::ranking::{comb_rule_feature, dict_rule_feature, Weights, COMB_HIT, DICT_HIT};

pub const DEFAULT_BEAM: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecodeConfig {
    pub beam: usize,
    /// Label reported when no N/P item covers the sentence.
    pub fallback: Polarity,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        DecodeConfig { beam: DEFAULT_BEAM, fallback: Polarity::Negative }
    }
}

/// A rule as applied in the chart. Indices point into the grammar's rule lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleRef {
    Dictionary(usize),
    Combination(usize),
    Glue { lhs: Polarity, left: Polarity, right: Polarity },
    Oov,
    /// `X → E X`
    AuxLeft(Polarity),
    /// `X → X E`
    AuxRight(Polarity),
    Start(NonTerminal),
}

impl RuleRef {
    pub fn lhs(&self, grammar: &Grammar) -> NonTerminal {
        match *self {
            RuleRef::Dictionary(i) => grammar.dictionary()[i].lhs.symbol(),
            RuleRef::Combination(i) => grammar.combinations()[i].lhs.symbol(),
            RuleRef::Glue { lhs, .. } | RuleRef::AuxLeft(lhs) | RuleRef::AuxRight(lhs) => lhs.symbol(),
            RuleRef::Oov => NonTerminal::E,
            RuleRef::Start(_) => NonTerminal::S,
        }
    }

    /// Stable identifier used for tie-breaking and output.
    pub fn id<'g>(&self, grammar: &'g Grammar) -> &'g str {
        use NonTerminal::{E, N, P};
        use Polarity::{Negative as Ng, Positive as Ps};
        match *self {
            RuleRef::Dictionary(i) => grammar.dict_id(i),
            RuleRef::Combination(i) => grammar.comb_id(i),
            RuleRef::Glue { lhs, left, right } => match (lhs, left, right) {
                (Ng, Ng, Ng) => "N→[N] [N]",
                (Ng, Ng, Ps) => "N→[N] [P]",
                (Ng, Ps, Ng) => "N→[P] [N]",
                (Ng, Ps, Ps) => "N→[P] [P]",
                (Ps, Ng, Ng) => "P→[N] [N]",
                (Ps, Ng, Ps) => "P→[N] [P]",
                (Ps, Ps, Ng) => "P→[P] [N]",
                (Ps, Ps, Ps) => "P→[P] [P]",
            },
            RuleRef::Oov => "E→<oov>",
            RuleRef::AuxLeft(Ng) => "N→<E> [N]",
            RuleRef::AuxLeft(Ps) => "P→<E> [P]",
            RuleRef::AuxRight(Ng) => "N→[N] <E>",
            RuleRef::AuxRight(Ps) => "P→[P] <E>",
            RuleRef::Start(N) => "S→[N]",
            RuleRef::Start(P) => "S→[P]",
            RuleRef::Start(E) => "S→<E>",
            RuleRef::Start(NonTerminal::S) => unreachable!("no S→S rule"),
        }
    }
}

/// One applicable rule instantiation over a span: the rule plus the
/// `(start, end, symbol)` of each child, left to right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Application {
    pub rule: RuleRef,
    pub children: Vec<(usize, usize, NonTerminal)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChartItem {
    pub start: usize,
    pub end: usize,
    pub symbol: NonTerminal,
    /// Absent for E items and for `S → E`.
    pub dist: Option<PolarityDist>,
    pub score: f64,
    pub rule: RuleRef,
    /// Arena indices of the child items.
    pub children: Vec<usize>,
    /// Rule applications in the whole derivation.
    pub applications: usize,
}

/// `P(X|·) > P(X̄|·)`.
pub fn satisfies_c1(lhs: Polarity, dist: &PolarityDist) -> bool {
    dist.prob(lhs) > dist.prob(lhs.opposite())
}

/// Slot item probability of the slot polarity strictly above `tau`.
pub fn satisfies_c2(slot: Polarity, dist: &PolarityDist, tau: f64) -> bool {
    dist.prob(slot) > tau
}

const SYMBOLS: usize = 4;

fn symbol_slot(s: NonTerminal) -> usize {
    match s {
        NonTerminal::N => 0,
        NonTerminal::P => 1,
        NonTerminal::E => 2,
        NonTerminal::S => 3,
    }
}

/// Filled chart for one sentence. Items live in an arena; each cell lists
/// its items best first.
#[derive(Debug, Clone)]
pub struct Chart<'g> {
    grammar: &'g Grammar,
    tokens: Vec<String>,
    items: Vec<ChartItem>,
    cells: Vec<Vec<usize>>,
}

impl<'g> Chart<'g> {
    fn new(grammar: &'g Grammar, tokens: &[impl AsRef<str>]) -> Self {
        let n = tokens.len();
        Chart {
            grammar,
            tokens: tokens.iter().map(|t| t.as_ref().to_string()).collect(),
            items: Vec::new(),
            cells: vec![Vec::new(); (n + 1) * (n + 1) * SYMBOLS],
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    fn cell_index(&self, i: usize, j: usize, symbol: NonTerminal) -> usize {
        let n = self.tokens.len();
        (i * (n + 1) + j) * SYMBOLS + symbol_slot(symbol)
    }

    /// Arena indices of the items in cell `(i, j, symbol)`, best first.
    pub fn cell(&self, i: usize, j: usize, symbol: NonTerminal) -> &[usize] {
        &self.cells[self.cell_index(i, j, symbol)]
    }

    pub fn item(&self, idx: usize) -> &ChartItem {
        &self.items[idx]
    }

    pub fn items(&self) -> &[ChartItem] {
        &self.items
    }

    /// Materializes the derivation rooted at an arena item.
    pub fn tree(&self, idx: usize) -> SentimentTree {
        let item = &self.items[idx];
        let g = self.grammar;
        let mut children = Vec::new();
        let nodes = |children: &mut Vec<TreeChild>| {
            for &c in &item.children {
                children.push(TreeChild::Node(self.tree(c)));
            }
        };
        let rule = match item.rule {
            RuleRef::Dictionary(_) => {
                children.extend(self.tokens[item.start..item.end].iter().cloned().map(TreeChild::Word));
                AppliedRule::Dictionary(item.rule.id(g).to_string())
            }
            RuleRef::Oov => {
                children.extend(self.tokens[item.start..item.end].iter().cloned().map(TreeChild::Word));
                AppliedRule::Oov
            }
            RuleRef::Combination(r) => {
                let mut pos = item.start;
                let mut slot = 0;
                for sym in g.combinations()[r].pattern.symbols() {
                    match sym {
                        PatternSymbol::Word(w) => {
                            children.push(TreeChild::Word(w.clone()));
                            pos += 1;
                        }
                        PatternSymbol::Slot(_) => {
                            let child = item.children[slot];
                            pos = self.items[child].end;
                            children.push(TreeChild::Node(self.tree(child)));
                            slot += 1;
                        }
                    }
                }
                debug_assert_eq!(pos, item.end);
                AppliedRule::Combination(item.rule.id(g).to_string())
            }
            RuleRef::Glue { .. } => {
                nodes(&mut children);
                AppliedRule::Glue(item.rule.id(g).to_string())
            }
            RuleRef::AuxLeft(_) | RuleRef::AuxRight(_) => {
                nodes(&mut children);
                AppliedRule::Auxiliary(item.rule.id(g).to_string())
            }
            RuleRef::Start(_) => {
                nodes(&mut children);
                AppliedRule::Start(item.rule.id(g).to_string())
            }
        };
        SentimentTree {
            start: item.start,
            end: item.end,
            symbol: item.symbol,
            dist: item.dist,
            score: item.score,
            rule,
            children,
        }
    }
}

/// Rule application recorded in a materialized tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AppliedRule {
    Dictionary(String),
    Combination(String),
    Glue(String),
    Oov,
    Auxiliary(String),
    Start(String),
}

impl AppliedRule {
    pub fn id(&self) -> &str {
        match self {
            AppliedRule::Dictionary(s)
            | AppliedRule::Combination(s)
            | AppliedRule::Glue(s)
            | AppliedRule::Auxiliary(s)
            | AppliedRule::Start(s) => s,
            AppliedRule::Oov => "E→<oov>",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeChild {
    Node(SentimentTree),
    Word(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SentimentTree {
    pub start: usize,
    pub end: usize,
    pub symbol: NonTerminal,
    pub dist: Option<PolarityDist>,
    pub score: f64,
    pub rule: AppliedRule,
    pub children: Vec<TreeChild>,
}

/// Flat per-node view of a tree, pre-order.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeRecord {
    pub start: usize,
    pub end: usize,
    pub symbol: NonTerminal,
    pub rule: String,
    pub p_neg: Option<f64>,
    pub p_pos: Option<f64>,
    pub score: f64,
}

impl SentimentTree {
    /// Polarity of the node below the root for `S` trees, otherwise of the
    /// node itself. `None` for E-rooted trees.
    pub fn label(&self) -> Option<Polarity> {
        if self.symbol == NonTerminal::S {
            return self.children.iter().find_map(|c| match c {
                TreeChild::Node(n) => n.symbol.polarity(),
                TreeChild::Word(_) => None,
            });
        }
        self.symbol.polarity()
    }

    pub fn applications(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(|c| match c {
                TreeChild::Node(n) => n.applications(),
                TreeChild::Word(_) => 0,
            })
            .sum::<usize>()
    }

    /// `(S (P (N not (P good)) ...))`. Parentheses inside tokens are written
    /// as `-LRB-` / `-RRB-`.
    pub fn bracketed(&self) -> String {
        let mut out = String::new();
        self.write_bracketed(&mut out);
        out
    }

    fn write_bracketed(&self, out: &mut String) {
        let _ = write!(out, "({}", self.symbol);
        for c in &self.children {
            out.push(' ');
            match c {
                TreeChild::Node(n) => n.write_bracketed(out),
                TreeChild::Word(w) => out.push_str(&escape_token(w)),
            }
        }
        out.push(')');
    }

    pub fn records(&self) -> Vec<NodeRecord> {
        let mut out = Vec::new();
        self.collect_records(&mut out);
        out
    }

    fn collect_records(&self, out: &mut Vec<NodeRecord>) {
        out.push(NodeRecord {
            start: self.start,
            end: self.end,
            symbol: self.symbol,
            rule: self.rule.id().to_string(),
            p_neg: self.dist.map(|d| d.p_neg()),
            p_pos: self.dist.map(|d| d.p_pos()),
            score: self.score,
        });
        for c in &self.children {
            if let TreeChild::Node(n) = c {
                n.collect_records(out);
            }
        }
    }
}

fn escape_token(w: &str) -> String {
    w.replace('(', "-LRB-").replace(')', "-RRB-")
}

/// Every rule instantiation whose lhs is `target` over span `[i, j)`,
/// independent of which child items exist. Start applications appear only
/// for the full span with `target = S`.
pub fn match_span(
    grammar: &Grammar,
    tokens: &[impl AsRef<str>],
    i: usize,
    j: usize,
    target: NonTerminal,
) -> Vec<Application> {
    let n = tokens.len();
    assert!(i < j && j <= n, "bad span ({i}, {j}) for {n} tokens");
    let mut out = Vec::new();
    match target {
        NonTerminal::S => {
            if i == 0 && j == n {
                for sym in [NonTerminal::N, NonTerminal::P, NonTerminal::E] {
                    out.push(Application { rule: RuleRef::Start(sym), children: vec![(i, j, sym)] });
                }
            }
        }
        NonTerminal::E => {
            if tokens[i..j].iter().all(|t| grammar.is_oov_token(t.as_ref())) {
                out.push(Application { rule: RuleRef::Oov, children: Vec::new() });
            }
        }
        NonTerminal::N | NonTerminal::P => {
            let x = target.polarity().expect("polar target");
            if let Some(idx) = grammar.lookup_index(&tokens[i..j]) {
                if grammar.dictionary()[idx].lhs == x {
                    out.push(Application { rule: RuleRef::Dictionary(idx), children: Vec::new() });
                }
            }
            let mut anchored: Vec<usize> = (i..j)
                .flat_map(|p| grammar.combinations_anchored_at(tokens[p].as_ref()).iter().copied())
                .filter(|&r| grammar.combinations()[r].lhs == x)
                .collect();
            anchored.sort_unstable();
            anchored.dedup();
            for r in anchored {
                let symbols = grammar.combinations()[r].pattern.symbols();
                let mut slots = Vec::new();
                let mut alignments = Vec::new();
                align(symbols, tokens, i, j, &mut slots, &mut alignments);
                for a in alignments {
                    out.push(Application { rule: RuleRef::Combination(r), children: a });
                }
            }
            for k in i + 1..j {
                for left in Polarity::BOTH {
                    for right in Polarity::BOTH {
                        // Two children both opposing the lhs can never satisfy C1.
                        if left == x.opposite() && right == x.opposite() {
                            continue;
                        }
                        out.push(Application {
                            rule: RuleRef::Glue { lhs: x, left, right },
                            children: vec![(i, k, left.symbol()), (k, j, right.symbol())],
                        });
                    }
                }
            }
            for k in i + 1..j {
                out.push(Application {
                    rule: RuleRef::AuxLeft(x),
                    children: vec![(i, k, NonTerminal::E), (k, j, target)],
                });
                out.push(Application {
                    rule: RuleRef::AuxRight(x),
                    children: vec![(i, k, target), (k, j, NonTerminal::E)],
                });
            }
        }
    }
    out
}

/// All ways to lay `symbols` over exactly `[pos, end)`, each slot covering a
/// non-empty sub-span.
pub(crate) fn align(
    symbols: &[PatternSymbol],
    tokens: &[impl AsRef<str>],
    pos: usize,
    end: usize,
    slots: &mut Vec<(usize, usize, NonTerminal)>,
    out: &mut Vec<Vec<(usize, usize, NonTerminal)>>,
) {
    let Some((first, rest)) = symbols.split_first() else {
        if pos == end {
            out.push(slots.clone());
        }
        return;
    };
    if end - pos < symbols.len() {
        return;
    }
    match first {
        PatternSymbol::Word(w) => {
            if tokens[pos].as_ref() == w {
                align(rest, tokens, pos + 1, end, slots, out);
            }
        }
        PatternSymbol::Slot(p) => {
            for q in pos + 1..=end - rest.len() {
                slots.push((pos, q, p.symbol()));
                align(rest, tokens, q, end, slots, out);
                slots.pop();
            }
        }
    }
}

fn local_score(grammar: &Grammar, weights: &Weights, rule: RuleRef) -> f64 {
    match rule {
        RuleRef::Dictionary(i) => weights.get(DICT_HIT) + weights.get(&dict_rule_feature(grammar.dict_id(i))),
        RuleRef::Combination(i) => weights.get(COMB_HIT) + weights.get(&comb_rule_feature(grammar.comb_id(i))),
        _ => 0.0,
    }
}

struct Source<'g> {
    rule: RuleRef,
    rule_id: &'g str,
    local: f64,
    lists: Vec<Vec<usize>>,
}

struct Candidate<'g> {
    score: f64,
    applications: usize,
    rule_id: &'g str,
    children: Vec<usize>,
    source: usize,
    ranks: Vec<usize>,
}

impl Candidate<'_> {
    /// `Greater` means ranked earlier.
    fn rank_cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.applications.cmp(&self.applications))
            .then_with(|| other.rule_id.cmp(self.rule_id))
            .then_with(|| other.children.cmp(&self.children))
            .then_with(|| other.source.cmp(&self.source))
    }
}

impl PartialEq for Candidate<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.rank_cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate<'_> {}

impl PartialOrd for Candidate<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate<'_> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank_cmp(other)
    }
}

impl<'g> Chart<'g> {
    fn candidate(&self, sources: &[Source<'g>], source: usize, ranks: Vec<usize>) -> Candidate<'g> {
        let src = &sources[source];
        let children: Vec<usize> = src.lists.iter().zip(&ranks).map(|(l, &r)| l[r]).collect();
        let score = src.local + children.iter().map(|&c| self.items[c].score).sum::<f64>();
        let applications = 1 + children.iter().map(|&c| self.items[c].applications).sum::<usize>();
        Candidate { score, applications, rule_id: src.rule_id, children, source, ranks }
    }

    /// Polarity of a candidate, or `None` when it violates a constraint.
    fn evaluate(&self, rule: RuleRef, children: &[usize]) -> Option<Option<PolarityDist>> {
        let g = self.grammar;
        let child_dist = |k: usize| self.items[children[k]].dist;
        let polar = |lhs: Polarity, d: PolarityDist| satisfies_c1(lhs, &d).then_some(Some(d));
        match rule {
            RuleRef::Dictionary(i) => {
                let r = &g.dictionary()[i];
                polar(r.lhs, r.dist)
            }
            RuleRef::Combination(i) => {
                let r = &g.combinations()[i];
                let subs: Vec<PolarityDist> = (0..children.len()).map(|k| child_dist(k).expect("polar slot")).collect();
                let d = eval_combination(r, &subs).ok()?;
                polar(r.lhs, d)
            }
            RuleRef::Glue { lhs, .. } => {
                let d = eval_glue(&child_dist(0)?, &child_dist(1)?, lhs).ok()?;
                polar(lhs, d)
            }
            RuleRef::AuxLeft(lhs) => polar(lhs, child_dist(1)?),
            RuleRef::AuxRight(lhs) => polar(lhs, child_dist(0)?),
            RuleRef::Oov => Some(None),
            RuleRef::Start(_) => Some(child_dist(0)),
        }
    }

    fn fill(&mut self, weights: &Weights, i: usize, j: usize, target: NonTerminal, beam: usize) {
        let g = self.grammar;
        let tau = g.tau_c2();
        let mut sources: Vec<Source<'g>> = Vec::new();
        for app in match_span(g, &self.tokens, i, j, target) {
            let slot_polarities: Vec<Option<Polarity>> = match app.rule {
                RuleRef::Combination(r) => g.combinations()[r].pattern.slots().map(Some).collect(),
                _ => vec![None; app.children.len()],
            };
            let mut lists = Vec::with_capacity(app.children.len());
            for (&(a, b, sym), slot) in app.children.iter().zip(slot_polarities) {
                let cell = self.cell(a, b, sym);
                let list: Vec<usize> = match slot {
                    Some(p) => cell
                        .iter()
                        .copied()
                        .filter(|&c| self.items[c].dist.is_some_and(|d| satisfies_c2(p, &d, tau)))
                        .collect(),
                    None => cell.to_vec(),
                };
                lists.push(list);
            }
            if lists.iter().any(Vec::is_empty) {
                continue;
            }
            sources.push(Source {
                rule: app.rule,
                rule_id: app.rule.id(g),
                local: local_score(g, weights, app.rule),
                lists,
            });
        }

        let mut heap = BinaryHeap::with_capacity(sources.len());
        for s in 0..sources.len() {
            let ranks = vec![0; sources[s].lists.len()];
            heap.push(self.candidate(&sources, s, ranks));
        }
        let mut kept = Vec::new();
        while let Some(cand) = heap.pop() {
            let src = &sources[cand.source];
            // Each rank vector is generated exactly once: advance the last
            // coordinate always, earlier ones only while later ones are zero.
            for d in 0..cand.ranks.len() {
                if cand.ranks[d + 1..].iter().any(|&r| r != 0) {
                    continue;
                }
                if cand.ranks[d] + 1 < src.lists[d].len() {
                    let mut next = cand.ranks.clone();
                    next[d] += 1;
                    heap.push(self.candidate(&sources, cand.source, next));
                }
            }
            let Some(dist) = self.evaluate(src.rule, &cand.children) else {
                continue;
            };
            let idx = self.items.len();
            self.items.push(ChartItem {
                start: i,
                end: j,
                symbol: target,
                dist,
                score: cand.score,
                rule: src.rule,
                children: cand.children,
                applications: cand.applications,
            });
            kept.push(idx);
            if kept.len() == beam {
                break;
            }
        }
        let cell = self.cell_index(i, j, target);
        self.cells[cell] = kept;
    }
}

/// Fills the chart for `tokens` bottom-up by span length.
pub fn build_chart<'g>(
    grammar: &'g Grammar,
    weights: &Weights,
    tokens: &[impl AsRef<str>],
    beam: usize,
) -> Chart<'g> {
    let beam = beam.max(1);
    let mut chart = Chart::new(grammar, tokens);
    let n = tokens.len();
    for len in 1..=n {
        for i in 0..=n - len {
            let j = i + len;
            for target in [NonTerminal::E, NonTerminal::N, NonTerminal::P] {
                chart.fill(weights, i, j, target, beam);
            }
        }
    }
    if n > 0 {
        chart.fill(weights, 0, n, NonTerminal::S, beam);
    }
    chart
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decoded {
    pub label: Polarity,
    /// No N/P item covers the whole sentence; `label` is the fallback.
    pub no_evidence: bool,
    /// Best labeled tree (`S → N` or `S → P`), else the `S → E` tree.
    pub best: Option<SentimentTree>,
    /// Top-K trees rooted at S, best first.
    pub k_best: Vec<SentimentTree>,
}

impl Decoded {
    pub fn dist(&self) -> Option<PolarityDist> {
        self.best.as_ref().and_then(|t| t.dist)
    }
}

pub fn decode(grammar: &Grammar, weights: &Weights, tokens: &[impl AsRef<str>], config: &DecodeConfig) -> Decoded {
    let chart = build_chart(grammar, weights, tokens, config.beam);
    decode_chart(&chart, config)
}

/// Reads the label and trees off a filled chart.
pub fn decode_chart(chart: &Chart<'_>, config: &DecodeConfig) -> Decoded {
    let n = chart.len();
    if n == 0 {
        return Decoded { label: config.fallback, no_evidence: true, best: None, k_best: Vec::new() };
    }
    let roots = chart.cell(0, n, NonTerminal::S);
    let k_best: Vec<SentimentTree> = roots.iter().map(|&r| chart.tree(r)).collect();
    // Best S item routed through N or P; S items are sorted, so the first
    // labeled one wins. Falls back to the N/P cells when the S beam holds
    // only `S → E`.
    let labeled = roots
        .iter()
        .position(|&r| chart.item(r).rule != RuleRef::Start(NonTerminal::E))
        .map(|p| k_best[p].clone());
    let best = labeled.or_else(|| {
        let top = |sym| chart.cell(0, n, sym).first().copied();
        let pick = match (top(NonTerminal::N), top(NonTerminal::P)) {
            (Some(a), Some(b)) => Some(if item_cmp(chart.item(a), chart.item(b), chart) == Ordering::Greater { a } else { b }),
            (a, b) => a.or(b),
        }?;
        let child = chart.tree(pick);
        Some(SentimentTree {
            start: 0,
            end: n,
            symbol: NonTerminal::S,
            dist: child.dist,
            score: child.score,
            rule: AppliedRule::Start(RuleRef::Start(child.symbol).id(chart.grammar).to_string()),
            children: vec![TreeChild::Node(child)],
        })
    });
    match best.as_ref().and_then(SentimentTree::label) {
        Some(label) => Decoded { label, no_evidence: false, best, k_best },
        None => {
            let best = best.or_else(|| k_best.first().cloned());
            Decoded { label: config.fallback, no_evidence: true, best, k_best }
        }
    }
}

/// `Greater` means ranked earlier.
fn item_cmp(a: &ChartItem, b: &ChartItem, chart: &Chart<'_>) -> Ordering {
    let g = chart.grammar;
    a.score
        .total_cmp(&b.score)
        .then_with(|| b.applications.cmp(&a.applications))
        .then_with(|| b.rule.id(g).cmp(a.rule.id(g)))
        .then_with(|| b.children.cmp(&a.children))
}

pub fn classify(grammar: &Grammar, weights: &Weights, tokens: &[impl AsRef<str>], config: &DecodeConfig) -> Polarity {
    decode(grammar, weights, tokens, config).label
}
