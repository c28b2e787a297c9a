//! Python bindings: corpora, grammar induction, ranker training and
//! decoding.

use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use sentiparse::induction::InductionConfig;
use sentiparse::ranking::TrainConfig;
use sentiparse::synthetic::{generate, SyntheticConfig};
use sentiparse::{CorpusFormat, DecodeConfig, LabeledSentence, Polarity};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_label(label: &str) -> PyResult<Polarity> {
    label.parse().map_err(value_err)
}

#[pyfunction]
fn tokenize(text: &str) -> PyResult<Vec<String>> {
    sentiparse::tokenize(text).map_err(value_err)
}

/// Labeled sentences.
#[pyclass(name = "Corpus", module = "sentiparse_py")]
struct PyCorpus {
    inner: sentiparse::Corpus,
}

#[pymethods]
impl PyCorpus {
    /// From `(label, text)` pairs; labels are `pos`/`neg` (or `1`/`0`).
    #[new]
    fn new(pairs: Vec<(String, String)>) -> PyResult<Self> {
        let sentences = pairs
            .iter()
            .map(|(label, text)| LabeledSentence::new(text, parse_label(label)?).map_err(value_err))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(PyCorpus { inner: sentiparse::Corpus::new(sentences) })
    }

    /// A TSV file or a directory with `rt-polarity.pos` / `rt-polarity.neg`.
    #[staticmethod]
    #[pyo3(signature = (path, format=None))]
    fn load(path: PathBuf, format: Option<&str>) -> PyResult<Self> {
        let format = match format {
            Some(f) => f.parse::<CorpusFormat>().map_err(value_err)?,
            None if path.is_dir() => CorpusFormat::Pl05,
            None => CorpusFormat::Tsv,
        };
        let inner = sentiparse::Corpus::load(&path, format).map_err(|e| PyIOError::new_err(e.to_string()))?;
        Ok(PyCorpus { inner })
    }

    /// Planted-lexicon corpus; `mix` is `training`, `compositional` or
    /// `negation`.
    #[staticmethod]
    #[pyo3(signature = (n, seed=42, mix="training"))]
    fn synthetic(n: usize, seed: u64, mix: &str) -> PyResult<Self> {
        let cfg = match mix {
            "training" => SyntheticConfig::training(),
            "compositional" => SyntheticConfig::compositional(),
            "negation" => SyntheticConfig::negation(),
            other => return Err(value_err(format!("unknown mix `{other}`"))),
        };
        Ok(PyCorpus { inner: generate(n, seed, &cfg) })
    }

    /// `(label, text)` pairs.
    fn pairs(&self) -> Vec<(String, String)> {
        self.inner.sentences().iter().map(|s| (s.label.short().to_string(), s.raw.clone())).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

#[pyclass(name = "Grammar", module = "sentiparse_py")]
struct PyGrammar {
    inner: sentiparse::Grammar,
}

#[pymethods]
impl PyGrammar {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let inner = sentiparse::Grammar::load_from_path(&path).map_err(|e| PyIOError::new_err(e.to_string()))?;
        Ok(PyGrammar { inner })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save_to_path(&path).map_err(|e| PyIOError::new_err(e.to_string()))
    }

    #[getter]
    fn l_max(&self) -> usize {
        self.inner.l_max()
    }

    #[getter]
    fn tau_c2(&self) -> f64 {
        self.inner.tau_c2()
    }

    fn dictionary_size(&self) -> usize {
        self.inner.dictionary().len()
    }

    /// `(id, type, theta)` per combination rule.
    fn combination_rules(&self) -> Vec<(String, String, Vec<f64>)> {
        self.inner
            .combinations()
            .iter()
            .map(|r| (r.id(), r.rule_type.as_str().to_string(), r.theta.clone()))
            .collect()
    }

    /// `(lhs, p_neg, p_pos)` of a dictionary fragment, or `None`.
    fn lookup(&self, fragment: &str) -> PyResult<Option<(String, f64, f64)>> {
        let tokens = sentiparse::tokenize(fragment).map_err(value_err)?;
        Ok(self
            .inner
            .lookup_fragment(&tokens)
            .map(|r| (r.lhs.short().to_string(), r.dist.p_neg(), r.dist.p_pos())))
    }

    fn __len__(&self) -> usize {
        self.inner.dictionary().len() + self.inner.combinations().len()
    }
}

/// Ranking weights ψ.
#[pyclass(name = "Weights", module = "sentiparse_py")]
#[derive(Default)]
struct PyWeights {
    inner: sentiparse::Weights,
}

#[pymethods]
impl PyWeights {
    #[new]
    fn new() -> Self {
        PyWeights::default()
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let inner = sentiparse::Weights::load_from_path(&path).map_err(|e| PyIOError::new_err(e.to_string()))?;
        Ok(PyWeights { inner })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save_to_path(&path).map_err(|e| PyIOError::new_err(e.to_string()))
    }

    fn get(&self, feature: &str) -> f64 {
        self.inner.get(feature)
    }

    fn set(&mut self, feature: &str, psi: f64) {
        self.inner.set(feature, psi);
    }

    fn items(&self) -> Vec<(String, f64)> {
        self.inner.iter().map(|(k, e)| (k.to_string(), e.psi)).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Result of decoding one sentence.
#[pyclass(name = "Decoded", module = "sentiparse_py", get_all)]
struct PyDecoded {
    label: String,
    no_evidence: bool,
    p_neg: Option<f64>,
    p_pos: Option<f64>,
    tree: Option<String>,
    /// `(score, bracketed tree)`, best first.
    k_best: Vec<(f64, String)>,
}

#[pymethods]
impl PyDecoded {
    fn __repr__(&self) -> String {
        format!("Decoded(label={:?}, no_evidence={}, tree={:?})", self.label, self.no_evidence, self.tree)
    }
}

#[pyfunction]
#[pyo3(signature = (corpus, *, tau_f=4, tau_p=0.7, tau_delta=0.05, tau_r=4, tau_c=0.75, l_max=7, iterations=3, tau_c2=0.6, seed=42))]
#[allow(clippy::too_many_arguments)]
fn learn_grammar(
    py: Python<'_>,
    corpus: &PyCorpus,
    tau_f: u64,
    tau_p: f64,
    tau_delta: f64,
    tau_r: u64,
    tau_c: f64,
    l_max: usize,
    iterations: usize,
    tau_c2: f64,
    seed: u64,
) -> PyResult<PyGrammar> {
    let cfg = InductionConfig { tau_f, tau_p, tau_delta, tau_r, tau_c, l_max, iterations, tau_c2, ..Default::default() };
    let corpus = &corpus.inner;
    let (inner, _) = py.detach(|| sentiparse::learn_grammar(corpus, &cfg, seed)).map_err(value_err)?;
    Ok(PyGrammar { inner })
}

/// `steps` sampled instances, or `epochs` passes when `steps` is None.
#[pyfunction]
#[pyo3(signature = (grammar, corpus, *, beam=30, steps=None, epochs=10, alpha=0.1, lambda_=0.01, seed=42))]
#[allow(clippy::too_many_arguments)]
fn train_ranker(
    py: Python<'_>,
    grammar: &PyGrammar,
    corpus: &PyCorpus,
    beam: usize,
    steps: Option<usize>,
    epochs: usize,
    alpha: f64,
    lambda_: f64,
    seed: u64,
) -> PyResult<PyWeights> {
    if beam == 0 || alpha <= 0.0 || lambda_ < 0.0 {
        return Err(value_err("need beam ≥ 1, alpha > 0, lambda ≥ 0"));
    }
    let steps = steps.unwrap_or(epochs * corpus.inner.len());
    let cfg = TrainConfig { beam, steps, alpha, lambda: lambda_, seed };
    let (g, c) = (&grammar.inner, &corpus.inner);
    let (inner, _) = py.detach(|| sentiparse::train_ranker(g, c, &cfg));
    Ok(PyWeights { inner })
}

#[pyfunction]
#[pyo3(signature = (grammar, weights, text, *, beam=30, fallback="neg"))]
fn decode(grammar: &PyGrammar, weights: &PyWeights, text: &str, beam: usize, fallback: &str) -> PyResult<PyDecoded> {
    if beam == 0 {
        return Err(value_err("beam must be at least 1"));
    }
    let tokens = sentiparse::tokenize(text).map_err(value_err)?;
    let cfg = DecodeConfig { beam, fallback: parse_label(fallback)? };
    let d = sentiparse::decode(&grammar.inner, &weights.inner, &tokens, &cfg);
    let dist = if d.no_evidence { None } else { d.dist() };
    Ok(PyDecoded {
        label: d.label.short().to_string(),
        no_evidence: d.no_evidence,
        p_neg: dist.map(|x| x.p_neg()),
        p_pos: dist.map(|x| x.p_pos()),
        tree: d.best.as_ref().map(|t| t.bracketed()),
        k_best: d.k_best.iter().map(|t| (t.score, t.bracketed())).collect(),
    })
}

/// `pos` or `neg`.
#[pyfunction]
#[pyo3(signature = (grammar, weights, text, *, beam=30, fallback="neg"))]
fn classify(grammar: &PyGrammar, weights: &PyWeights, text: &str, beam: usize, fallback: &str) -> PyResult<String> {
    decode(grammar, weights, text, beam, fallback).map(|d| d.label)
}

#[pymodule]
fn sentiparse_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCorpus>()?;
    m.add_class::<PyGrammar>()?;
    m.add_class::<PyWeights>()?;
    m.add_class::<PyDecoded>()?;
    m.add_function(wrap_pyfunction!(tokenize, m)?)?;
    m.add_function(wrap_pyfunction!(learn_grammar, m)?)?;
    m.add_function(wrap_pyfunction!(train_ranker, m)?)?;
    m.add_function(wrap_pyfunction!(decode, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    Ok(())
}
