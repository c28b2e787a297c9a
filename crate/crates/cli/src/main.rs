//! `sentiparse`: learn sentiment grammars, train the ranker, classify and
//! evaluate.
//!
//! Exit codes: 0 success, 2 input or parse error, 3 configuration error,
//! 4 internal invariant breach.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use rayon::prelude::*;

use sentiparse_cli::config::{RunConfig, DEFAULT_EPOCHS, DEFAULT_FOLDS};
use sentiparse::grammar::fmt_f64;
use sentiparse::induction::{count_fragments, laplace, InductionReport};
use sentiparse::polarity::logistic;
use sentiparse::ranking::TrainConfig;
use sentiparse::synthetic::{generate, SyntheticConfig};
use sentiparse::{
    decode, learn_grammar, tokenize, train_ranker, Corpus, CorpusFormat, DecodeConfig, Decoded, Grammar,
    InductionConfig, Polarity, RuleType, Weights,
};

#[derive(Debug)]
enum CliError {
    Input(String),
    Config(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Config(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<sentiparse::CorpusError> for CliError {
    fn from(e: sentiparse::CorpusError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<sentiparse::InductionError> for CliError {
    fn from(e: sentiparse::InductionError) -> Self {
        match e {
            sentiparse::InductionError::Config(m) => CliError::Config(m),
            other => CliError::Internal(other.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(name = "sentiparse", version, about = "Sentiment grammar induction and parsing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine a sentiment grammar from a labeled corpus.
    LearnGrammar(LearnArgs),
    /// Train ranking weights for a grammar.
    Train(TrainArgs),
    /// Label sentences, one per input line.
    Classify(ClassifyArgs),
    /// Cross-validate the full pipeline on a corpus.
    Evaluate(EvaluateArgs),
    /// Show a dictionary fragment or combination rule.
    Inspect(InspectArgs),
    /// Write a synthetic planted-lexicon corpus.
    Synth(SynthArgs),
}

#[derive(Args, Clone)]
struct CorpusArgs {
    /// TSV file (`label<TAB>text`) or a directory with rt-polarity.{pos,neg}.
    #[arg(long)]
    corpus: PathBuf,
    /// Corpus format; guessed from the path when omitted.
    #[arg(long)]
    format: Option<CorpusFormat>,
}

#[derive(Args, Clone)]
struct InductionArgs {
    #[arg(long = "tau-f", default_value_t = 4)]
    tau_f: u64,
    #[arg(long = "tau-p", default_value_t = 0.7)]
    tau_p: f64,
    #[arg(long = "tau-delta", default_value_t = 0.05)]
    tau_delta: f64,
    #[arg(long = "tau-r", default_value_t = 4)]
    tau_r: u64,
    #[arg(long = "tau-c", default_value_t = 0.75)]
    tau_c: f64,
    #[arg(long, default_value_t = sentiparse::grammar::DEFAULT_LMAX)]
    lmax: usize,
    /// C2 slot-confidence threshold stored in the grammar.
    #[arg(long = "tau-c2", default_value_t = sentiparse::grammar::DEFAULT_TAU_C2)]
    tau_c2: f64,
    /// Outer dictionary/combination mining iterations (T).
    #[arg(long = "induction-iters", default_value_t = 3)]
    induction_iters: usize,
}

impl InductionArgs {
    fn config(&self) -> InductionConfig {
        InductionConfig {
            tau_f: self.tau_f,
            tau_p: self.tau_p,
            tau_delta: self.tau_delta,
            tau_r: self.tau_r,
            tau_c: self.tau_c,
            l_max: self.lmax,
            iterations: self.induction_iters,
            tau_c2: self.tau_c2,
            ..InductionConfig::default()
        }
    }
}

#[derive(Args, Clone)]
struct RankerArgs {
    /// Beam size K.
    #[arg(long, default_value_t = sentiparse::parser::DEFAULT_BEAM)]
    beam: usize,
    /// Ranker budget S in sampled instances (overrides --epochs).
    #[arg(long)]
    iters: Option<usize>,
    /// Ranker budget in passes over the training corpus.
    #[arg(long, default_value_t = DEFAULT_EPOCHS)]
    epochs: usize,
    /// AdaGrad step size.
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    /// L2 regularization strength.
    #[arg(long, default_value_t = 0.01)]
    lambda: f64,
}

#[derive(Args)]
struct LearnArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[command(flatten)]
    induction: InductionArgs,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Grammar file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long)]
    grammar: PathBuf,
    #[command(flatten)]
    ranker: RankerArgs,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Weights file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    grammar: PathBuf,
    /// Weights file; zero weights when omitted.
    #[arg(long)]
    weights: Option<PathBuf>,
    /// Input text, one sentence per line; stdin when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = sentiparse::parser::DEFAULT_BEAM)]
    beam: usize,
    /// Override the grammar's C2 threshold.
    #[arg(long = "tau-c2")]
    tau_c2: Option<f64>,
    /// Label for sentences without polarity evidence.
    #[arg(long = "fallback-label", default_value = "neg")]
    fallback_label: Polarity,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Append the bracketed best tree to each record.
    #[arg(long)]
    trees: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Fixed test set; disables k-fold.
    #[arg(long = "test-corpus")]
    test_corpus: Option<PathBuf>,
    #[command(flatten)]
    induction: InductionArgs,
    #[command(flatten)]
    ranker: RankerArgs,
    #[arg(long, default_value_t = DEFAULT_FOLDS)]
    folds: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long = "fallback-label", default_value = "neg")]
    fallback_label: Polarity,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Metrics file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct InspectArgs {
    #[arg(long)]
    grammar: PathBuf,
    /// Corpus for the naive (coverage-free) counts of a fragment.
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    format: Option<CorpusFormat>,
    /// A fragment (`are fun`) or a rule id (`N→is not [P]`, `->` accepted).
    query: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 2000)]
    n: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// `training` (mixed, noisy), `compositional` (clean not/very/but) or
    /// `negation` (plain and not X).
    #[arg(long, default_value = "training")]
    mix: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(3),
            };
        }
    };
    let outcome = std::panic::catch_unwind(|| run(cli));
    let result = outcome.unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(CliError::Internal(msg))
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sentiparse: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::LearnGrammar(a) => cmd_learn_grammar(a),
        Command::Train(a) => cmd_train(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Inspect(a) => cmd_inspect(a),
        Command::Synth(a) => cmd_synth(a),
    }
}

fn load_corpus(path: &Path, format: Option<CorpusFormat>) -> Result<Corpus> {
    let format = format.unwrap_or(if path.is_dir() { CorpusFormat::Pl05 } else { CorpusFormat::Tsv });
    let corpus =
        Corpus::load(path, format).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if corpus.is_empty() {
        return Err(CliError::Input(format!("{}: empty corpus", path.display())));
    }
    let (neg, pos) = corpus.class_counts();
    info!("loaded {} sentences ({neg} neg, {pos} pos) from {}", corpus.len(), path.display());
    Ok(corpus)
}

fn load_grammar(path: &Path) -> Result<Grammar> {
    Grammar::load_from_path(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_weights(path: &Path) -> Result<Weights> {
    Weights::load_from_path(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Writes `bytes` to `out`, or stdout.
fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::Input(format!("{}: {e}", p.display()))),
        None => io::stdout().write_all(bytes).map_err(|e| CliError::Input(e.to_string())),
    }
}

/// `grammar.txt` → `grammar.txt.<suffix>`.
fn sidecar(out: &Path, suffix: &str) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}

fn write_sidecar(out: Option<&Path>, suffix: &str, text: &str) -> Result<()> {
    if let Some(out) = out {
        let path = sidecar(out, suffix);
        fs::write(&path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    if threads == 0 {
        return Err(CliError::Config("threads must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))
}

fn rule_counts(grammar: &Grammar) -> String {
    let mut s = format!(
        "dictionary_rules={}\ncombination_rules={}\n",
        grammar.dictionary().len(),
        grammar.combinations().len()
    );
    for ty in [RuleType::Negation, RuleType::Strengthen, RuleType::Weaken, RuleType::Contrast] {
        let n = grammar.combinations().iter().filter(|r| r.rule_type == ty).count();
        s.push_str(&format!("{}_rules={n}\n", ty.as_str()));
    }
    s
}

fn diagnostics(report: &InductionReport) -> String {
    let mut s = String::new();
    for (t, it) in report.iterations.iter().enumerate() {
        s.push_str(&format!(
            "iteration={} dictionary_rules={} combination_rules={} negation_rules={}\n",
            t + 1,
            it.dictionary_rules,
            it.combination_rules,
            it.negation_rules
        ));
    }
    for f in &report.fits {
        s.push_str(&format!("fit\t{}\tpairs={}\tconverged={}\tepochs={}\n", f.rule, f.pairs, f.converged, f.epochs));
    }
    for d in &report.dropped {
        s.push_str(&format!("dropped\t{d}\n"));
    }
    s
}

fn cmd_learn_grammar(a: LearnArgs) -> Result<()> {
    let cfg = RunConfig {
        induction: a.induction.config(),
        seed: a.seed,
        corpus: Some(a.corpus.corpus.clone()),
        out: a.out.clone(),
        ..RunConfig::default()
    };
    cfg.validate().map_err(CliError::Config)?;
    let corpus = load_corpus(&a.corpus.corpus, a.corpus.format)?;
    let (grammar, report) = learn_grammar(&corpus, &cfg.induction, cfg.seed)?;
    let mut buf = Vec::new();
    grammar.save(&mut buf).map_err(|e| CliError::Internal(e.to_string()))?;
    emit(a.out.as_deref(), &buf)?;
    write_sidecar(a.out.as_deref(), "diag", &diagnostics(&report))?;
    write_sidecar(a.out.as_deref(), "config", &cfg.snapshot())?;
    let counts = rule_counts(&grammar);
    if a.out.is_some() {
        print!("{counts}");
    } else {
        eprint!("{counts}");
    }
    Ok(())
}

fn decode_all(grammar: &Grammar, weights: &Weights, sentences: &[Vec<String>], cfg: &DecodeConfig, pool: &rayon::ThreadPool) -> Vec<Decoded> {
    pool.install(|| sentences.par_iter().map(|s| decode(grammar, weights, s, cfg)).collect())
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let cfg = RunConfig {
        beam: a.ranker.beam,
        iters: a.ranker.iters,
        epochs: a.ranker.epochs,
        alpha: a.ranker.alpha,
        lambda: a.ranker.lambda,
        seed: a.seed,
        corpus: Some(a.corpus.corpus.clone()),
        grammar: Some(a.grammar.clone()),
        out: a.out.clone(),
        ..RunConfig::default()
    };
    cfg.validate().map_err(CliError::Config)?;
    let grammar = load_grammar(&a.grammar)?;
    let corpus = load_corpus(&a.corpus.corpus, a.corpus.format)?;
    let train_cfg = TrainConfig {
        beam: cfg.beam,
        steps: cfg.ranker_steps(corpus.len()),
        alpha: cfg.alpha,
        lambda: cfg.lambda,
        seed: cfg.seed,
    };
    info!("training ranker: {} steps ({:.2} epochs)", train_cfg.steps, train_cfg.steps as f64 / corpus.len() as f64);
    let (weights, stats) = train_ranker(&grammar, &corpus, &train_cfg);

    let decode_cfg = DecodeConfig { beam: cfg.beam, fallback: cfg.fallback };
    let tokens: Vec<Vec<String>> = corpus.sentences().iter().map(|s| s.tokens.clone()).collect();
    let decoded = decode_all(&grammar, &weights, &tokens, &decode_cfg, &thread_pool(1)?);
    let correct = decoded.iter().zip(corpus.sentences()).filter(|(d, s)| d.label == s.label).count();

    let mut log_text = format!(
        "steps={}\nepochs={}\nskipped={}\nfeatures={}\ntraining_accuracy={}\n",
        stats.steps,
        fmt_f64(stats.steps as f64 / corpus.len() as f64),
        stats.skipped,
        weights.len(),
        fmt_f64(correct as f64 / corpus.len() as f64)
    );
    for (e, v) in stats.objective_trace.iter().enumerate() {
        log_text.push_str(&format!("epoch={} objective={}\n", e + 1, fmt_f64(*v)));
    }
    let mut buf = Vec::new();
    weights.save(&mut buf).map_err(|e| CliError::Internal(e.to_string()))?;
    emit(a.out.as_deref(), &buf)?;
    write_sidecar(a.out.as_deref(), "log", &log_text)?;
    write_sidecar(a.out.as_deref(), "config", &cfg.snapshot())?;
    eprint!("{log_text}");
    Ok(())
}

fn fmt_prob(p: Option<f64>) -> String {
    p.map_or_else(|| "-".to_string(), |p| format!("{p:.6}"))
}

fn cmd_classify(a: ClassifyArgs) -> Result<()> {
    if a.beam == 0 {
        return Err(CliError::Config("beam must be at least 1".into()));
    }
    let mut grammar = load_grammar(&a.grammar)?;
    if let Some(t) = a.tau_c2 {
        grammar = grammar.with_tau_c2(t).map_err(|e| CliError::Config(e.to_string()))?;
    }
    let weights = match &a.weights {
        Some(p) => load_weights(p)?,
        None => Weights::new(),
    };
    let pool = thread_pool(a.threads)?;
    let reader: Box<dyn BufRead> = match &a.input {
        Some(p) => Box::new(io::BufReader::new(
            fs::File::open(p).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdin().lock()),
    };
    let mut sentences = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| CliError::Input(e.to_string()))?;
        match tokenize(&line) {
            Ok(t) => sentences.push(t),
            Err(_) => warn!("line {}: empty, skipped", n + 1),
        }
    }
    let cfg = DecodeConfig { beam: a.beam, fallback: a.fallback_label };
    let decoded = decode_all(&grammar, &weights, &sentences, &cfg, &pool);
    let mut out = String::new();
    for d in &decoded {
        let dist = if d.no_evidence { None } else { d.dist() };
        out.push_str(&format!(
            "{}\t{}\t{}\t{}",
            d.label.short(),
            fmt_prob(dist.map(|x| x.p_neg())),
            fmt_prob(dist.map(|x| x.p_pos())),
            if d.no_evidence { "no-evidence" } else { "ok" }
        ));
        if a.trees {
            out.push('\t');
            out.push_str(&d.best.as_ref().map_or_else(|| "-".to_string(), |t| t.bracketed()));
        }
        out.push('\n');
    }
    emit(a.out.as_deref(), out.as_bytes())
}

#[derive(Default, Clone, Copy)]
struct Confusion {
    /// `[gold][predicted]`, negative first.
    counts: [[usize; 2]; 2],
    no_evidence: usize,
}

impl Confusion {
    fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    fn accuracy(&self) -> f64 {
        (self.counts[0][0] + self.counts[1][1]) as f64 / self.total().max(1) as f64
    }

    fn add(&mut self, other: &Confusion) {
        for g in 0..2 {
            for p in 0..2 {
                self.counts[g][p] += other.counts[g][p];
            }
        }
        self.no_evidence += other.no_evidence;
    }
}

fn idx(p: Polarity) -> usize {
    match p {
        Polarity::Negative => 0,
        Polarity::Positive => 1,
    }
}

/// Majority label of `train` applied to every sentence in `test`; ties
/// go to the fallback label.
fn majority_accuracy(train: &Corpus, test: &Corpus, fallback: Polarity) -> f64 {
    let (neg, pos) = train.class_counts();
    let label = match neg.cmp(&pos) {
        std::cmp::Ordering::Greater => Polarity::Negative,
        std::cmp::Ordering::Less => Polarity::Positive,
        std::cmp::Ordering::Equal => fallback,
    };
    test.sentences().iter().filter(|s| s.label == label).count() as f64 / test.len().max(1) as f64
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<()> {
    let cfg = RunConfig {
        induction: a.induction.config(),
        beam: a.ranker.beam,
        iters: a.ranker.iters,
        epochs: a.ranker.epochs,
        alpha: a.ranker.alpha,
        lambda: a.ranker.lambda,
        seed: a.seed,
        fallback: a.fallback_label,
        folds: a.folds,
        corpus: Some(a.corpus.corpus.clone()),
        out: a.out.clone(),
        ..RunConfig::default()
    };
    cfg.validate().map_err(CliError::Config)?;
    let pool = thread_pool(a.threads)?;
    let corpus = load_corpus(&a.corpus.corpus, a.corpus.format)?;
    let splits = match &a.test_corpus {
        Some(p) => vec![(corpus, load_corpus(p, a.corpus.format)?)],
        None => corpus.kfold(cfg.folds, cfg.seed).map_err(|e| CliError::Config(e.to_string()))?,
    };

    let mut total = Confusion::default();
    let mut rows = String::new();
    let mut accs = Vec::new();
    let mut majority = Vec::new();
    for (fold, (train, test)) in splits.iter().enumerate() {
        let (grammar, _) = learn_grammar(train, &cfg.induction, cfg.seed)?;
        let train_cfg = TrainConfig {
            beam: cfg.beam,
            steps: cfg.ranker_steps(train.len()),
            alpha: cfg.alpha,
            lambda: cfg.lambda,
            seed: cfg.seed,
        };
        let (weights, stats) = train_ranker(&grammar, train, &train_cfg);
        let decode_cfg = DecodeConfig { beam: cfg.beam, fallback: cfg.fallback };
        let tokens: Vec<Vec<String>> = test.sentences().iter().map(|s| s.tokens.clone()).collect();
        let decoded = decode_all(&grammar, &weights, &tokens, &decode_cfg, &pool);
        let mut c = Confusion::default();
        for (d, s) in decoded.iter().zip(test.sentences()) {
            c.counts[idx(s.label)][idx(d.label)] += 1;
            c.no_evidence += usize::from(d.no_evidence);
        }
        let maj = majority_accuracy(train, test, cfg.fallback);
        info!("fold {}: accuracy {:.4} (majority {:.4})", fold + 1, c.accuracy(), maj);
        rows.push_str(&format!(
            "fold={} train={} test={} accuracy={} majority_accuracy={} no_evidence={} dictionary_rules={} combination_rules={} skipped={}\n",
            fold + 1,
            train.len(),
            test.len(),
            fmt_f64(c.accuracy()),
            fmt_f64(maj),
            c.no_evidence,
            grammar.dictionary().len(),
            grammar.combinations().len(),
            stats.skipped
        ));
        accs.push(c.accuracy());
        majority.push(maj);
        total.add(&c);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let m = mean(&accs);
    let std = (accs.iter().map(|a| (a - m).powi(2)).sum::<f64>() / accs.len() as f64).sqrt();
    let mut report = format!(
        "folds={}\nsentences={}\naccuracy={}\naccuracy_std={}\nmajority_accuracy={}\nno_evidence_rate={}\nneg_as_neg={}\nneg_as_pos={}\npos_as_neg={}\npos_as_pos={}\n",
        splits.len(),
        total.total(),
        fmt_f64(m),
        fmt_f64(std),
        fmt_f64(mean(&majority)),
        fmt_f64(total.no_evidence as f64 / total.total().max(1) as f64),
        total.counts[0][0],
        total.counts[0][1],
        total.counts[1][0],
        total.counts[1][1]
    );
    report.push_str(&rows);
    emit(a.out.as_deref(), report.as_bytes())?;
    write_sidecar(a.out.as_deref(), "config", &cfg.snapshot())
}

fn cmd_inspect(a: InspectArgs) -> Result<()> {
    let grammar = load_grammar(&a.grammar)?;
    let query = a.query.replace("->", "→");
    let query = match query.split_once('→') {
        Some((lhs, rhs)) => format!("{}→{}", lhs.trim(), rhs.trim()),
        None => query,
    };
    let mut out = String::new();
    if query.contains('→') {
        let Some(rule) = grammar.combinations().iter().find(|r| r.id() == query) else {
            println!("not found: {query}");
            return Ok(());
        };
        out.push_str(&format!("rule={}\ntype={}\n", rule.id(), rule.rule_type));
        for (ty, n) in &rule.type_counts {
            out.push_str(&format!("type_count {}={n}\n", ty.as_str()));
        }
        let theta: Vec<String> = rule.theta.iter().map(|t| fmt_f64(*t)).collect();
        out.push_str(&format!("theta={}\n", theta.join(" ")));
        // Response h(θ·x) with every slot probability set to x.
        for k in 0..=10 {
            let x = k as f64 / 10.0;
            let z = rule.theta[0] + rule.theta[1..].iter().map(|t| t * x).sum::<f64>();
            out.push_str(&format!("curve x={x:.1} h={:.6}\n", logistic(z)));
        }
    } else {
        let tokens = tokenize(&query).map_err(|e| CliError::Input(e.to_string()))?;
        let Some(rule) = grammar.lookup_fragment(&tokens) else {
            println!("not found: {query}");
            return Ok(());
        };
        out.push_str(&format!("fragment={}\n", tokens.join(" ")));
        out.push_str(&format!(
            "corrected lhs={} p_neg={:.6} p_pos={:.6} count_neg={} count_pos={}\n",
            rule.lhs,
            rule.dist.p_neg(),
            rule.dist.p_pos(),
            rule.count_neg,
            rule.count_pos
        ));
        match &a.corpus {
            Some(path) => {
                let corpus = load_corpus(path, a.format)?;
                let counts = count_fragments(&corpus, &[], 1, tokens.len().max(grammar.l_max()));
                let (neg, pos) = counts.get(&tokens).map_or((0, 0), |c| (c.neg, c.pos));
                let d = laplace(neg as f64, pos as f64);
                let lhs = if d.p_pos() > d.p_neg() { Polarity::Positive } else { Polarity::Negative };
                out.push_str(&format!(
                    "naive lhs={} p_neg={:.6} p_pos={:.6} count_neg={neg} count_pos={pos}\n",
                    lhs,
                    d.p_neg(),
                    d.p_pos()
                ));
            }
            None => out.push_str("naive unavailable (pass --corpus)\n"),
        }
    }
    emit(a.out.as_deref(), out.as_bytes())
}

fn cmd_synth(a: SynthArgs) -> Result<()> {
    let mix = match a.mix.as_str() {
        "training" => SyntheticConfig::training(),
        "compositional" => SyntheticConfig::compositional(),
        "negation" => SyntheticConfig::negation(),
        other => return Err(CliError::Config(format!("unknown mix `{other}`"))),
    };
    let corpus = generate(a.n, a.seed, &mix);
    let mut out = String::new();
    for s in corpus.sentences() {
        out.push_str(&format!("{}\t{}\n", s.label.short(), s.raw));
    }
    emit(a.out.as_deref(), out.as_bytes())
}
