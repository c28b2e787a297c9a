//! Sentiment grammar induction and K-best chart parsing.
//!
//! A sentiment grammar has polarity non-terminals `N` and `P`, dictionary
//! rules that map text fragments to polarities, and combination rules such
//! as `N → not [P]` whose polarity is a logistic function of their
//! sub-spans. [`induction::learn_grammar`] mines such a grammar from
//! sentence-level labels, [`ranking::train_ranker`] learns a log-linear
//! model over derivations, and [`parser::decode`] finds the best tree.

pub mod corpus;
pub mod grammar;
pub mod induction;
pub mod parser;
pub mod polarity;
pub mod ranking;
pub mod stopwords;
pub mod synthetic;

pub use corpus::{tokenize, Corpus, CorpusError, CorpusFormat, LabeledSentence};
pub use grammar::{
    CombinationRule, DictionaryRule, Grammar, GrammarError, NonTerminal, Pattern, PatternSymbol, Polarity,
    PolarityDist, RuleType,
};
pub use induction::{learn_grammar, InductionConfig, InductionError};
pub use parser::{classify, decode, DecodeConfig, Decoded, SentimentTree};
pub use ranking::{train_ranker, FeatureVector, TrainConfig, Weights};
