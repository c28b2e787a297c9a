//! Planted-lexicon corpus generator for grammar-recovery experiments.
//!
//! Sentences are `<subject> <verb> <phrase>` where the phrase is a plain
//! polar word, `not X`, `very X`, or `X but Y`. Labels follow the intended
//! composition, optionally flipped with template-specific noise.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, LabeledSentence};
use crate::grammar::Polarity;

pub const POSITIVE_WORDS: &[&str] =
    &["great", "good", "excellent", "wonderful", "brilliant", "superb", "delightful", "charming", "fun", "moving"];
pub const NEGATIVE_WORDS: &[&str] =
    &["awful", "bad", "terrible", "boring", "dull", "weak", "tedious", "bland", "lame", "messy"];
const SUBJECTS: &[&str] =
    &["the movie", "the film", "the plot", "the acting", "the story", "the script", "the cast", "this movie"];
const VERBS: &[&str] = &["is", "was", "seems"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Template {
    Plain,
    Negated,
    Intensified,
    Contrast,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticConfig {
    /// Template mixture, in [`Template`] order.
    pub weights: [f64; 4],
    /// Label flip probability per template, in [`Template`] order.
    pub noise: [f64; 4],
}

impl SyntheticConfig {
    /// Mixed training data with noisy plain sentences.
    pub fn training() -> Self {
        SyntheticConfig { weights: [0.7, 0.1, 0.15, 0.05], noise: [0.15, 0.01, 0.0, 0.01] }
    }

    /// Plain and `not X` sentences only, noise-free. Small corpora of this
    /// mix are enough to plant a negation rule.
    pub fn negation() -> Self {
        SyntheticConfig { weights: [0.75, 0.25, 0.0, 0.0], noise: [0.0; 4] }
    }

    /// Noise-free `not X` / `very X` / `X but Y` sentences.
    pub fn compositional() -> Self {
        SyntheticConfig { weights: [0.0, 1.0, 1.0, 1.0], noise: [0.0; 4] }
    }
}

fn words(p: Polarity) -> &'static [&'static str] {
    match p {
        Polarity::Positive => POSITIVE_WORDS,
        Polarity::Negative => NEGATIVE_WORDS,
    }
}

fn pick<R: Rng>(rng: &mut R, list: &'static [&'static str]) -> &'static str {
    list.choose(rng).expect("non-empty word list")
}

/// One sentence with its (possibly noisy) label.
pub fn sample_sentence<R: Rng>(rng: &mut R, config: &SyntheticConfig) -> (String, Polarity, Template) {
    let templates = [Template::Plain, Template::Negated, Template::Intensified, Template::Contrast];
    let total: f64 = config.weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    let mut t = 0;
    while t < 3 && u >= config.weights[t] {
        u -= config.weights[t];
        t += 1;
    }
    let template = templates[t];
    let label = if rng.gen_bool(0.5) { Polarity::Positive } else { Polarity::Negative };
    let subject = pick(rng, SUBJECTS);
    let verb = pick(rng, VERBS);
    let phrase = match template {
        Template::Plain => pick(rng, words(label)).to_string(),
        Template::Negated => format!("not {}", pick(rng, words(label.opposite()))),
        Template::Intensified => format!("very {}", pick(rng, words(label))),
        Template::Contrast => {
            format!("{} but {}", pick(rng, words(label.opposite())), pick(rng, words(label)))
        }
    };
    let noisy = if rng.gen_bool(config.noise[t]) { label.opposite() } else { label };
    (format!("{subject} {verb} {phrase}"), noisy, template)
}

pub fn generate(n: usize, seed: u64, config: &SyntheticConfig) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Corpus::new(
        (0..n)
            .map(|_| {
                let (text, label, _) = sample_sentence(&mut rng, config);
                LabeledSentence::new(&text, label).expect("generated sentences are non-empty")
            })
            .collect(),
    )
}
