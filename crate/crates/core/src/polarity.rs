//! Polarity model: how each rule category computes the polarity
//! distribution of a span from its parts, and how combination-rule
//! composition parameters are fitted.

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::grammar::{CombinationRule, DictionaryRule, Polarity, PolarityDist};

#[derive(Debug, Error, PartialEq)]
pub enum PolarityError {
    #[error("glue of contradictory certain inputs")]
    DegenerateGlue,
    #[error("rule `{rule}` expects {expected} sub-spans, got {found}")]
    ArityMismatch { rule: String, expected: usize, found: usize },
    #[error("rule `{rule}` has {found} parameters, expected {expected}")]
    ThetaLength { rule: String, expected: usize, found: usize },
    #[error("no training data")]
    EmptyData,
    #[error("training instance has {found} inputs, expected {expected}")]
    InputLength { expected: usize, found: usize },
}

/// `1 / (1 + e^-x)`, evaluated without overflow for large `|x|`.
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn eval_dictionary(rule: &DictionaryRule) -> PolarityDist {
    rule.dist
}

/// Normalized product of the two sides, reported for `lhs`.
pub fn eval_glue(left: &PolarityDist, right: &PolarityDist, lhs: Polarity) -> Result<PolarityDist, PolarityError> {
    let agree = left.prob(lhs) * right.prob(lhs);
    let disagree = left.prob(lhs.opposite()) * right.prob(lhs.opposite());
    let denom = agree + disagree;
    if denom <= 0.0 {
        return Err(PolarityError::DegenerateGlue);
    }
    Ok(PolarityDist::with_prob(lhs, agree / denom))
}

/// The OOV side contributes nothing.
pub fn eval_auxiliary(inner: &PolarityDist) -> PolarityDist {
    *inner
}

/// Input vector `(1, P(X_1|sub_1), ..)` for a combination rule, where each
/// entry is the probability of the corresponding slot's polarity.
pub fn composition_input(rule: &CombinationRule, subs: &[PolarityDist]) -> Result<Vec<f64>, PolarityError> {
    let slots: Vec<Polarity> = rule.pattern.slots().collect();
    if subs.len() != slots.len() {
        return Err(PolarityError::ArityMismatch { rule: rule.id(), expected: slots.len(), found: subs.len() });
    }
    let mut x = Vec::with_capacity(slots.len() + 1);
    x.push(1.0);
    x.extend(slots.iter().zip(subs).map(|(slot, d)| d.prob(*slot)));
    Ok(x)
}

pub fn eval_combination(rule: &CombinationRule, subs: &[PolarityDist]) -> Result<PolarityDist, PolarityError> {
    let x = composition_input(rule, subs)?;
    if rule.theta.len() != x.len() {
        return Err(PolarityError::ThetaLength { rule: rule.id(), expected: x.len(), found: rule.theta.len() });
    }
    Ok(PolarityDist::with_prob(rule.lhs, logistic(dot(&rule.theta, &x))))
}

/// One regression example for a combination rule: `x[0]` is the bias input.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositionInput {
    pub x: Vec<f64>,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    pub alpha: f64,
    pub epsilon: f64,
    pub max_epochs: usize,
    /// The epoch cap is not enforced until at least this many single-instance
    /// updates have run, so rules with few examples still move off zero.
    pub min_updates: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig { alpha: 0.01, epsilon: 1e-8, max_epochs: 200, min_updates: 20_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub theta: Vec<f64>,
    pub converged: bool,
    pub epochs: usize,
}

/// `J(θ) = ½ Σ (h_θ(x) − y)²`.
pub fn squared_loss(theta: &[f64], data: &[CompositionInput]) -> f64 {
    data.iter()
        .map(|d| {
            let r = logistic(dot(theta, &d.x)) - d.y;
            0.5 * r * r
        })
        .sum()
}

/// `∂J/∂θ_j = Σ (h − y) h (1 − h) x_j`.
pub fn squared_loss_gradient(theta: &[f64], data: &[CompositionInput]) -> Vec<f64> {
    let mut grad = vec![0.0; theta.len()];
    for d in data {
        let h = logistic(dot(theta, &d.x));
        let scale = (h - d.y) * h * (1.0 - h);
        for (g, x) in grad.iter_mut().zip(&d.x) {
            *g += scale * x;
        }
    }
    grad
}

/// Stochastic gradient descent on the squared residual, starting from zeros.
///
/// Each epoch visits every instance once in an order drawn from `rng`; the
/// fit stops once an epoch moves θ by less than `epsilon` (squared L2).
/// Hitting the iteration cap returns the last θ with `converged = false`.
pub fn fit_rule_params<R: Rng + ?Sized>(
    data: &[CompositionInput],
    config: &FitConfig,
    rng: &mut R,
) -> Result<FitResult, PolarityError> {
    let dim = data.first().ok_or(PolarityError::EmptyData)?.x.len();
    if let Some(bad) = data.iter().find(|d| d.x.len() != dim) {
        return Err(PolarityError::InputLength { expected: dim, found: bad.x.len() });
    }
    let mut theta = vec![0.0; dim];
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut epochs = 0;
    let mut updates = 0;
    loop {
        let start = theta.clone();
        order.shuffle(rng);
        for &i in &order {
            sgd_update(&mut theta, &data[i], config.alpha);
        }
        epochs += 1;
        updates += data.len();
        let moved: f64 = theta.iter().zip(&start).map(|(a, b)| (a - b) * (a - b)).sum();
        if moved < config.epsilon {
            return Ok(FitResult { theta, converged: true, epochs });
        }
        if epochs >= config.max_epochs && updates >= config.min_updates {
            log::warn!("polarity fit stopped after {epochs} epochs without converging");
            return Ok(FitResult { theta, converged: false, epochs });
        }
    }
}

/// `θ_j ← θ_j − α (h − y) h (1 − h) x_j`
pub fn sgd_update(theta: &mut [f64], datum: &CompositionInput, alpha: f64) {
    let h = logistic(dot(theta, &datum.x));
    let scale = alpha * (h - datum.y) * h * (1.0 - h);
    for (t, x) in theta.iter_mut().zip(&datum.x) {
        *t -= scale * x;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
