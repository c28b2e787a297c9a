//! Log-linear ranking of sentiment trees: rule-identity features, the
//! marginal log-likelihood objective over beam candidates, and AdaGrad.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::Corpus;
use crate::grammar::{fmt_f64, Grammar};
use crate::parser::{decode, AppliedRule, DecodeConfig, SentimentTree, TreeChild};

pub const COMB_HIT: &str = "CombHit";
pub const DICT_HIT: &str = "DictHit";

pub fn comb_rule_feature(rule_id: &str) -> String {
    format!("CombRule|{rule_id}")
}

pub fn dict_rule_feature(rule_id: &str) -> String {
    format!("DictRule|{rule_id}")
}

#[derive(Debug, Error)]
pub enum RankingError {
    #[error("log-partition over an empty candidate set")]
    EmptyCandidates,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Sparse feature counts keyed by stable feature identifiers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureVector(BTreeMap<String, f64>);

impl FeatureVector {
    pub fn new() -> Self {
        FeatureVector(BTreeMap::new())
    }

    pub fn add(&mut self, feature: &str, value: f64) {
        if let Some(v) = self.0.get_mut(feature) {
            *v += value;
        } else {
            self.0.insert(feature.to_string(), value);
        }
    }

    pub fn get(&self, feature: &str) -> f64 {
        self.0.get(feature).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add_scaled(&mut self, other: &FeatureVector, scale: f64) {
        for (k, v) in other.iter() {
            self.add(k, scale * v);
        }
    }
}

impl FromIterator<(String, f64)> for FeatureVector {
    fn from_iter<I: IntoIterator<Item = (String, f64)>>(iter: I) -> Self {
        let mut f = FeatureVector::new();
        for (k, v) in iter {
            f.add(&k, v);
        }
        f
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct WeightEntry {
    pub psi: f64,
    /// AdaGrad sum of squared gradients.
    pub g: f64,
}

/// Ranking parameters ψ with their AdaGrad accumulators.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Weights {
    entries: BTreeMap<String, WeightEntry>,
}

impl Weights {
    pub fn new() -> Self {
        Weights::default()
    }

    pub fn get(&self, feature: &str) -> f64 {
        self.entries.get(feature).map_or(0.0, |e| e.psi)
    }

    pub fn entry(&self, feature: &str) -> Option<&WeightEntry> {
        self.entries.get(feature)
    }

    pub fn set(&mut self, feature: &str, psi: f64) {
        self.entries.entry(feature.to_string()).or_default().psi = psi;
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &WeightEntry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn squared_norm(&self) -> f64 {
        self.entries.values().map(|e| e.psi * e.psi).sum()
    }

    /// One `<feature-id>\t<psi>\t<G>` line per feature, sorted by id.
    pub fn save<W: Write>(&self, mut sink: W) -> Result<(), RankingError> {
        for (k, e) in &self.entries {
            writeln!(sink, "{k}\t{}\t{}", fmt_f64(e.psi), fmt_f64(e.g))?;
        }
        Ok(())
    }

    pub fn load<R: BufRead>(source: R) -> Result<Self, RankingError> {
        let mut entries = BTreeMap::new();
        for (idx, line) in source.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let err = |msg: String| RankingError::Parse { line: idx + 1, msg };
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 3 {
                return Err(err(format!("expected 3 tab-separated fields, found {}", fields.len())));
            }
            let psi: f64 = fields[1].parse().map_err(|_| err(format!("bad weight `{}`", fields[1])))?;
            let g: f64 = fields[2].parse().map_err(|_| err(format!("bad accumulator `{}`", fields[2])))?;
            if !psi.is_finite() || g.is_nan() || g < 0.0 {
                return Err(err("weight must be finite and accumulator non-negative".into()));
            }
            entries.insert(fields[0].to_string(), WeightEntry { psi, g });
        }
        Ok(Weights { entries })
    }

    pub fn save_to_path(&self, path: impl AsRef<std::path::Path>) -> Result<(), RankingError> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.save(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load_from_path(path: impl AsRef<std::path::Path>) -> Result<Self, RankingError> {
        Weights::load(std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

/// Counts of dictionary and combination rule applications in a tree.
/// Glue, OOV, auxiliary and start applications carry no features.
pub fn extract_features(tree: &SentimentTree) -> FeatureVector {
    let mut f = FeatureVector::new();
    accumulate_features(tree, &mut f);
    f
}

fn accumulate_features(node: &SentimentTree, f: &mut FeatureVector) {
    match &node.rule {
        AppliedRule::Dictionary(id) => {
            f.add(DICT_HIT, 1.0);
            f.add(&dict_rule_feature(id), 1.0);
        }
        AppliedRule::Combination(id) => {
            f.add(COMB_HIT, 1.0);
            f.add(&comb_rule_feature(id), 1.0);
        }
        _ => {}
    }
    for child in &node.children {
        if let TreeChild::Node(n) = child {
            accumulate_features(n, f);
        }
    }
}

pub fn score(features: &FeatureVector, weights: &Weights) -> f64 {
    features.iter().map(|(k, v)| v * weights.get(k)).sum()
}

/// `log Σ exp(s_i)` with max subtraction.
pub fn log_sum_exp(scores: &[f64]) -> Result<f64, RankingError> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if scores.is_empty() {
        return Err(RankingError::EmptyCandidates);
    }
    let sum: f64 = scores.iter().map(|s| (s - max).exp()).sum();
    Ok(max + sum.ln())
}

pub fn log_partition(candidates: &[FeatureVector], weights: &Weights) -> Result<f64, RankingError> {
    let scores: Vec<f64> = candidates.iter().map(|c| score(c, weights)).collect();
    log_sum_exp(&scores)
}

/// Beam candidates for one training sentence: every tree's features and
/// whether its root label matches the gold label.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CandidateSet {
    pub features: Vec<FeatureVector>,
    pub correct: Vec<bool>,
}

impl CandidateSet {
    pub fn has_correct(&self) -> bool {
        self.correct.iter().any(|c| *c)
    }
}

/// Which weights the L2 term touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularization {
    /// Every stored weight.
    Full,
    /// Only features firing in the batch's candidates.
    Active,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveValue {
    pub objective: f64,
    pub gradient: FeatureVector,
    pub skipped: usize,
}

/// `O = Σ [A(ψ; T̃^L) − A(ψ; T̃)] − λ/2 ‖ψ‖²` and its gradient
/// `Σ [E_{T̃^L} φ − E_{T̃} φ] − λψ`. Instances without a correct candidate are
/// skipped.
pub fn objective_and_gradient(
    batch: &[CandidateSet],
    weights: &Weights,
    lambda: f64,
    regularization: Regularization,
) -> Result<ObjectiveValue, RankingError> {
    let mut objective = 0.0;
    let mut gradient = FeatureVector::new();
    let mut skipped = 0;
    let mut active = std::collections::BTreeSet::new();
    for inst in batch {
        if !inst.has_correct() {
            skipped += 1;
            continue;
        }
        let scores: Vec<f64> = inst.features.iter().map(|f| score(f, weights)).collect();
        let correct_scores: Vec<f64> =
            scores.iter().zip(&inst.correct).filter(|(_, c)| **c).map(|(s, _)| *s).collect();
        let a_all = log_sum_exp(&scores)?;
        let a_correct = log_sum_exp(&correct_scores)?;
        objective += a_correct - a_all;
        for ((f, s), c) in inst.features.iter().zip(&scores).zip(&inst.correct) {
            let p_all = (s - a_all).exp();
            let p_correct = if *c { (s - a_correct).exp() } else { 0.0 };
            gradient.add_scaled(f, p_correct - p_all);
            if regularization == Regularization::Active {
                active.extend(f.iter().map(|(k, _)| k.to_string()));
            }
        }
    }
    if lambda != 0.0 {
        match regularization {
            Regularization::Full => {
                for (k, e) in weights.iter() {
                    if e.psi != 0.0 {
                        gradient.add(k, -lambda * e.psi);
                    }
                }
                objective -= 0.5 * lambda * weights.squared_norm();
            }
            Regularization::Active => {
                for k in &active {
                    let psi = weights.get(k);
                    gradient.add(k, -lambda * psi);
                    objective -= 0.5 * lambda * psi * psi;
                }
            }
        }
    }
    Ok(ObjectiveValue { objective, gradient, skipped })
}

/// Diagonal AdaGrad ascent step: `G_j += g_j²; ψ_j += α g_j / √G_j` for
/// every non-zero `g_j`.
pub fn adagrad_step(weights: &mut Weights, gradient: &FeatureVector, alpha: f64) {
    for (k, g) in gradient.iter() {
        if g == 0.0 {
            continue;
        }
        let entry = weights.entries.entry(k.to_string()).or_default();
        entry.g += g * g;
        entry.psi += alpha * g / entry.g.sqrt();
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub beam: usize,
    /// Number of single-instance updates.
    pub steps: usize,
    pub alpha: f64,
    pub lambda: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { beam: 30, steps: 0, alpha: 0.1, lambda: 0.01, seed: 42 }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainStats {
    pub steps: usize,
    pub skipped: usize,
    /// Mean single-instance objective per pass over the corpus.
    pub objective_trace: Vec<f64>,
}

/// Builds the candidate set for one sentence from its k-best trees.
pub fn candidate_set(trees: &[SentimentTree], gold: crate::grammar::Polarity) -> CandidateSet {
    CandidateSet {
        features: trees.iter().map(extract_features).collect(),
        correct: trees.iter().map(|t| t.label() == Some(gold)).collect(),
    }
}

/// Stochastic training of ψ from zeros: sample a sentence, decode its
/// K-best trees under the current weights, take one AdaGrad step on that
/// sentence's objective.
pub fn train_ranker(grammar: &Grammar, corpus: &Corpus, config: &TrainConfig) -> (Weights, TrainStats) {
    let mut weights = Weights::new();
    let mut stats = TrainStats::default();
    if corpus.is_empty() {
        return (weights, stats);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let decode_cfg = DecodeConfig { beam: config.beam, ..DecodeConfig::default() };
    let epoch = corpus.len();
    let mut epoch_sum = 0.0;
    let mut epoch_n = 0usize;
    for step in 0..config.steps {
        let sentence = &corpus.sentences()[rng.gen_range(0..corpus.len())];
        let decoded = decode(grammar, &weights, &sentence.tokens, &decode_cfg);
        let candidates = candidate_set(&decoded.k_best, sentence.label);
        if !candidates.has_correct() {
            stats.skipped += 1;
        } else {
            let value = objective_and_gradient(&[candidates], &weights, config.lambda, Regularization::Active)
                .expect("non-empty candidate set");
            epoch_sum += value.objective;
            epoch_n += 1;
            adagrad_step(&mut weights, &value.gradient, config.alpha);
        }
        stats.steps += 1;
        if (step + 1) % epoch == 0 || step + 1 == config.steps {
            stats.objective_trace.push(if epoch_n > 0 { epoch_sum / epoch_n as f64 } else { 0.0 });
            epoch_sum = 0.0;
            epoch_n = 0;
        }
    }
    (weights, stats)
}
