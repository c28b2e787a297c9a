//! Run configuration shared by all subcommands, and its `key=value`
//! snapshot written next to every output file.

use std::fmt::Write as _;
use std::path::PathBuf;

use sentiparse::polarity::FitConfig;
use sentiparse::{InductionConfig, Polarity};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub induction: InductionConfig,
    pub beam: usize,
    /// Ranker budget in sampled instances; overrides `epochs` when set.
    pub iters: Option<usize>,
    pub epochs: usize,
    pub alpha: f64,
    pub lambda: f64,
    pub seed: u64,
    pub fallback: Polarity,
    pub folds: usize,
    pub corpus: Option<PathBuf>,
    pub grammar: Option<PathBuf>,
    pub weights: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

pub const DEFAULT_EPOCHS: usize = 10;
pub const DEFAULT_FOLDS: usize = 10;

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            induction: InductionConfig::default(),
            beam: sentiparse::parser::DEFAULT_BEAM,
            iters: None,
            epochs: DEFAULT_EPOCHS,
            alpha: 0.1,
            lambda: 0.01,
            seed: 42,
            fallback: Polarity::Negative,
            folds: DEFAULT_FOLDS,
            corpus: None,
            grammar: None,
            weights: None,
            out: None,
        }
    }
}

impl RunConfig {
    /// Ranker steps for a corpus of `n` sentences.
    pub fn ranker_steps(&self, n: usize) -> usize {
        self.iters.unwrap_or(self.epochs * n)
    }

    pub fn snapshot(&self) -> String {
        let i = &self.induction;
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k}={v}");
        };
        kv("tau_f", i.tau_f.to_string());
        kv("tau_p", i.tau_p.to_string());
        kv("tau_delta", i.tau_delta.to_string());
        kv("tau_r", i.tau_r.to_string());
        kv("tau_c", i.tau_c.to_string());
        kv("lmax", i.l_max.to_string());
        kv("induction_iters", i.iterations.to_string());
        kv("tau_c2", i.tau_c2.to_string());
        kv("fit_alpha", i.fit.alpha.to_string());
        kv("fit_epsilon", i.fit.epsilon.to_string());
        kv("fit_max_epochs", i.fit.max_epochs.to_string());
        kv("fit_min_updates", i.fit.min_updates.to_string());
        kv("beam", self.beam.to_string());
        kv("iters", self.iters.map(|n| n.to_string()).unwrap_or_default());
        kv("epochs", self.epochs.to_string());
        kv("alpha", self.alpha.to_string());
        kv("lambda", self.lambda.to_string());
        kv("seed", self.seed.to_string());
        kv("fallback_label", self.fallback.short().to_string());
        kv("folds", self.folds.to_string());
        kv("corpus", path(&self.corpus));
        kv("grammar", path(&self.grammar));
        kv("weights", path(&self.weights));
        kv("out", path(&self.out));
        s
    }

    pub fn from_snapshot(text: &str) -> Result<Self, String> {
        let mut c = RunConfig::default();
        let mut fit = FitConfig::default();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key=value", n + 1))?;
            let bad = |e: &dyn std::fmt::Display| format!("line {}: `{k}`: {e}", n + 1);
            let path = |v: &str| (!v.is_empty()).then(|| PathBuf::from(v));
            let i = &mut c.induction;
            match k {
                "tau_f" => i.tau_f = v.parse().map_err(|e| bad(&e))?,
                "tau_p" => i.tau_p = v.parse().map_err(|e| bad(&e))?,
                "tau_delta" => i.tau_delta = v.parse().map_err(|e| bad(&e))?,
                "tau_r" => i.tau_r = v.parse().map_err(|e| bad(&e))?,
                "tau_c" => i.tau_c = v.parse().map_err(|e| bad(&e))?,
                "lmax" => i.l_max = v.parse().map_err(|e| bad(&e))?,
                "induction_iters" => i.iterations = v.parse().map_err(|e| bad(&e))?,
                "tau_c2" => i.tau_c2 = v.parse().map_err(|e| bad(&e))?,
                "fit_alpha" => fit.alpha = v.parse().map_err(|e| bad(&e))?,
                "fit_epsilon" => fit.epsilon = v.parse().map_err(|e| bad(&e))?,
                "fit_max_epochs" => fit.max_epochs = v.parse().map_err(|e| bad(&e))?,
                "fit_min_updates" => fit.min_updates = v.parse().map_err(|e| bad(&e))?,
                "beam" => c.beam = v.parse().map_err(|e| bad(&e))?,
                "iters" if v.is_empty() => c.iters = None,
                "iters" => c.iters = Some(v.parse().map_err(|e| bad(&e))?),
                "epochs" => c.epochs = v.parse().map_err(|e| bad(&e))?,
                "alpha" => c.alpha = v.parse().map_err(|e| bad(&e))?,
                "lambda" => c.lambda = v.parse().map_err(|e| bad(&e))?,
                "seed" => c.seed = v.parse().map_err(|e| bad(&e))?,
                "fallback_label" => c.fallback = v.parse().map_err(|e| bad(&e))?,
                "folds" => c.folds = v.parse().map_err(|e| bad(&e))?,
                "corpus" => c.corpus = path(v),
                "grammar" => c.grammar = path(v),
                "weights" => c.weights = path(v),
                "out" => c.out = path(v),
                _ => return Err(format!("line {}: unknown key `{k}`", n + 1)),
            }
        }
        c.induction.fit = fit;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), String> {
        self.induction.validate().map_err(|e| e.to_string())?;
        if self.beam == 0 {
            return Err("beam must be at least 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err("alpha must be positive".into());
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err("lambda must be non-negative".into());
        }
        Ok(())
    }
}
