//! Explainable sentiment lexicons.
//!
//! The crate turns per-token attribution exports (one signed weight per token
//! occurrence) into a word-level sentiment lexicon, merges it with the
//! Loughran-McDonald positive/negative word lists, and scores sentences with a
//! small, interpretable lexicon model.
//!
//! Pipeline overview:
//!
//! 1. [`attribution`]: parse attribution CSV files, split tokens by sign and
//!    accumulate per-word statistics over absolute weights, then drop words
//!    that are too short, not English or stopwords.
//! 2. [`lexicon`]: lemmatize and merge duplicates, resolve words that occur in
//!    both polarities, compute ratio features and merge into one lexicon.
//! 3. [`merge`]: turn LM word lists into lexicon entries, outer-join both
//!    lexicons into a prefixed combined table and derive the normalized copy.
//! 4. [`engine`]: score words and sentences with the coefficient-weighted
//!    cumulative values of the selected lexicon(s).
//! 5. [`evaluation`]: metrics, LM-recall-constrained subsets, coefficient
//!    grid search and the throughput benchmark.
//!
//! Batch work (sentence classification, grid cells) runs on rayon when the
//! default `parallel` feature is enabled and sequentially otherwise. Results
//! are identical either way.

pub mod attribution;
pub mod engine;
pub mod error;
pub mod evaluation;
mod fmt;
pub mod lexicon;
pub mod merge;
pub mod par;
mod sum;
pub mod textprep;

pub use attribution::{AttributionRecord, WordStats, WordTable};
pub use engine::{
    Classifier, Coefficients, DecisionFeatures, LexiconSelector, ModelConfig, Polarity,
    SentenceVerdict,
};
pub use error::{Error, Result};
pub use evaluation::{EvalReport, GridResult, Label, LabeledSentence};
pub use lexicon::{Category, Lexicon, LexiconEntry, Source};
pub use merge::{CombinedEntry, CombinedLexicon};
pub use textprep::{LanguageResources, Token};

/// Version of the lexicon CSV layouts written by this crate.
pub const LEXICON_FORMAT_VERSION: u32 = 1;
