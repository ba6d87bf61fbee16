use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use xlex::engine::{Coefficients, DecisionFeatures, LexiconSelector};

/// Build explainable sentiment lexicons from token attributions and classify
/// sentences with them.
///
/// Exit codes: 0 success, 2 missing file, 64 usage or invalid flags,
/// 65 malformed or inconsistent data.
#[derive(Debug, Parser)]
#[command(name = "xlex")]
pub struct Cli {
    /// TOML file with default flag values; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads for classification and grid search [default: all cores].
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    /// Directory holding lemmas.tsv, english.txt and stopwords.txt
    /// [default: bundled tables].
    #[arg(long, global = true, value_name = "DIR")]
    pub resources: Option<PathBuf>,

    /// Write a JSON run manifest (inputs, outputs, settings, wall time) here
    /// after the command finishes.
    #[arg(long, global = true, value_name = "FILE")]
    pub manifest: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an XLex lexicon CSV from attribution CSV files.
    Build(BuildArgs),
    /// Combine an XLex lexicon with LM word lists into `<prefix>.csv` and
    /// `<prefix>.norm.csv`.
    MergeLm(MergeArgs),
    /// Score sentences and write `sentence_index,value,polarity,matched_words`.
    Classify(ClassifyArgs),
    /// Score a labeled dataset and print accuracy, F1 and MCC.
    Evaluate(EvaluateArgs),
    /// Search the coefficient grid over one or more lexicons and datasets.
    Grid(GridArgs),
    /// Time repeated classification of a sentence file.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Attribution CSV files (`sentence_id,token,value`).
    #[arg(required = true, value_name = "ATTRIBUTIONS")]
    pub inputs: Vec<PathBuf>,

    /// Output lexicon CSV.
    #[arg(short, long, value_name = "PATH")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MergeArgs {
    /// XLex lexicon CSV written by `build`.
    #[arg(long, value_name = "PATH")]
    pub xlex: PathBuf,

    /// LM positive word list, one word per line.
    #[arg(long, value_name = "PATH")]
    pub lm_pos: PathBuf,

    /// LM negative word list, one word per line.
    #[arg(long, value_name = "PATH")]
    pub lm_neg: PathBuf,

    /// Output prefix; `.csv` and `.norm.csv` are appended.
    #[arg(long, value_name = "PREFIX")]
    pub out_prefix: PathBuf,

    /// Source dataset name stored in the sidecars [default: prefix file name].
    #[arg(long, value_name = "NAME")]
    pub source: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Combined lexicon CSV.
    #[arg(long, value_name = "PATH")]
    pub lexicon: Option<PathBuf>,

    /// Use the normalized lexicon (`foo.csv` becomes `foo.norm.csv`).
    #[arg(long)]
    pub normalized: bool,

    /// Lexicon groups consulted: xlex, lm or combined [default: combined].
    #[arg(long, value_name = "NAME")]
    pub selector: Option<LexiconSelector>,

    /// Decision features summed per word, from avg, ratio, count [default: avg].
    #[arg(long, value_name = "LIST")]
    pub features: Option<DecisionFeatures>,

    /// Weights c_xlp,c_xlo,c_lmp,c_lmo [default: 0.3,0.1,0.1,0.5].
    #[arg(long, value_name = "A,B,C,D", allow_hyphen_values = true)]
    pub coeffs: Option<Coefficients>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Sentences, one per line, or a CSV with a `sentence,label` header.
    /// Blank lines are skipped.
    #[arg(value_name = "INPUT")]
    pub input: PathBuf,

    #[command(flatten)]
    pub model: ModelArgs,

    /// Output CSV [default: stdout].
    #[arg(short, long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Labeled CSV with a `sentence,label` header.
    #[arg(value_name = "DATA")]
    pub data: PathBuf,

    #[command(flatten)]
    pub model: ModelArgs,

    /// Only score sentences the LM-only model gives a non-neutral verdict.
    #[arg(long)]
    pub lm_constrained: bool,

    /// Also write the report as JSON.
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Combined lexicon CSV; repeat for several. Lexicons are grouped by the
    /// source name in their sidecar, or by file name without `.norm`.
    #[arg(long = "lexicon", value_name = "PATH")]
    pub lexicons: Vec<PathBuf>,

    /// Labeled CSV dataset; repeat for several.
    #[arg(long = "data", required = true, value_name = "PATH")]
    pub data: Vec<PathBuf>,

    /// Use the normalized counterpart of every lexicon.
    #[arg(long)]
    pub normalized: bool,

    /// Candidate values for c_xlp, c_xlo and c_lmp.
    #[arg(long, value_name = "LIST", value_delimiter = ',', default_value = "0.1,0.3,0.5,0.7,0.9")]
    pub values: Vec<f64>,

    /// Fixed c_lmo.
    #[arg(long, value_name = "X", default_value_t = 0.5)]
    pub lmo: f64,

    /// Decision features [default: avg].
    #[arg(long, value_name = "LIST")]
    pub features: Option<DecisionFeatures>,

    /// Selectors scored in every cell.
    #[arg(long, value_name = "LIST", value_delimiter = ',', default_value = "xlex,combined")]
    pub selectors: Vec<LexiconSelector>,

    /// Results CSV [default: stdout].
    #[arg(short, long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Sentences, one per line, or a labeled CSV.
    #[arg(value_name = "INPUT")]
    pub input: PathBuf,

    #[command(flatten)]
    pub model: ModelArgs,

    /// Timed repetitions [default: 10].
    #[arg(long, value_name = "N")]
    pub reps: Option<usize>,

    /// Also write the timings as JSON.
    #[arg(long, value_name = "PATH")]
    pub json: Option<PathBuf>,
}
