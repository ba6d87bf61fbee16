//! Evaluation of the lexicon model on labeled sentences.
//!
//! Ground truth is binary (positive/negative) while predictions are ternary:
//! a sentence whose value is exactly zero is *unanswered* (neutral). Neutral
//! predictions count as wrong for accuracy, as false negatives of the true
//! class for F1, and as an extra predicted class for MCC.

use std::fmt::{self, Write as _};
use std::fs::{self, File};
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::engine::{Classifier, Coefficients, CumulativeValues, DecisionFeatures, LexiconSelector, ModelConfig, Polarity};
use crate::error::{Error, Result};
use crate::merge::CombinedLexicon;
use crate::sum::ExactSum;
use crate::textprep::LanguageResources;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    fn index(self) -> usize {
        match self {
            Label::Positive => 0,
            Label::Negative => 1,
        }
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" => Ok(Label::Positive),
            "negative" => Ok(Label::Negative),
            other => Err(format!("label must be positive or negative, got `{other}`")),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Positive => "positive",
            Label::Negative => "negative",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledSentence {
    pub sentence: String,
    pub label: Label,
}

/// Reads a `sentence,label` CSV with a header row.
pub fn read_labeled<R: Read>(reader: R) -> Result<Vec<LabeledSentence>> {
    let mut rdr = csv::Reader::from_reader(reader);
    if rdr.headers()?.iter().map(str::trim).ne(["sentence", "label"]) {
        return Err(Error::malformed(1, "expected header `sentence,label`"));
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != 2 {
            return Err(Error::malformed(line, "expected 2 fields"));
        }
        let label = row[1].parse().map_err(|m| Error::malformed(line, m))?;
        out.push(LabeledSentence {
            sentence: row[0].to_owned(),
            label,
        });
    }
    Ok(out)
}

pub fn read_labeled_path(path: impl AsRef<Path>) -> Result<Vec<LabeledSentence>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_labeled(std::io::BufReader::new(file))
}

/// Rows: true positive/negative. Columns: predicted positive/negative/neutral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Confusion {
    pub counts: [[u64; 3]; 2],
}

impl Confusion {
    pub fn from_predictions(truth: &[Label], predicted: &[Polarity]) -> Self {
        let mut c = Confusion::default();
        for (t, p) in truth.iter().zip(predicted) {
            c.add(*t, *p);
        }
        c
    }

    pub fn add(&mut self, truth: Label, predicted: Polarity) {
        let col = match predicted {
            Polarity::Positive => 0,
            Polarity::Negative => 1,
            Polarity::Neutral => 2,
        };
        self.counts[truth.index()][col] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn support(&self, label: Label) -> u64 {
        self.counts[label.index()].iter().sum()
    }

    pub fn correct(&self) -> u64 {
        self.counts[0][0] + self.counts[1][1]
    }

    pub fn unanswered(&self) -> u64 {
        self.counts[0][2] + self.counts[1][2]
    }

    pub fn accuracy(&self) -> f64 {
        match self.total() {
            0 => 0.0,
            n => self.correct() as f64 / n as f64,
        }
    }

    pub fn class_metrics(&self, label: Label) -> ClassMetrics {
        let k = label.index();
        let other = 1 - k;
        let tp = self.counts[k][k] as f64;
        let fp = self.counts[other][k] as f64;
        let support = self.support(label);
        let fneg = support as f64 - tp;
        let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
        ClassMetrics {
            precision: ratio(tp, tp + fp),
            recall: ratio(tp, tp + fneg),
            f1: ratio(2.0 * tp, 2.0 * tp + fp + fneg),
            support,
        }
    }

    /// Matthews correlation over the 3x3 table whose true-neutral row is empty.
    /// A degenerate table scores 1 when every prediction is correct, else 0.
    pub fn mcc(&self) -> f64 {
        let s = self.total() as f64;
        let c = self.correct() as f64;
        let t = [self.support(Label::Positive) as f64, self.support(Label::Negative) as f64, 0.0];
        let p: [f64; 3] = std::array::from_fn(|j| (self.counts[0][j] + self.counts[1][j]) as f64);
        let pt: f64 = (0..3).map(|k| p[k] * t[k]).sum();
        let pp: f64 = p.iter().map(|x| x * x).sum();
        let tt: f64 = t.iter().map(|x| x * x).sum();
        let den = ((s * s - pp) * (s * s - tt)).sqrt();
        if den == 0.0 {
            return if s > 0.0 && c == s { 1.0 } else { 0.0 };
        }
        ((c * s - pt) / den).clamp(-1.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n: u64,
    pub accuracy: f64,
    pub positive: ClassMetrics,
    pub negative: ClassMetrics,
    pub f1_macro: f64,
    pub mcc: f64,
    pub confusion: Confusion,
    pub unanswered: u64,
}

impl EvalReport {
    pub fn from_predictions(truth: &[Label], predicted: &[Polarity]) -> Result<Self> {
        if truth.is_empty() {
            return Err(Error::EmptyDataset);
        }
        assert_eq!(truth.len(), predicted.len(), "one prediction per sentence");
        Ok(Self::from_confusion(Confusion::from_predictions(truth, predicted)))
    }

    pub fn from_confusion(confusion: Confusion) -> Self {
        let positive = confusion.class_metrics(Label::Positive);
        let negative = confusion.class_metrics(Label::Negative);
        EvalReport {
            n: confusion.total(),
            accuracy: confusion.accuracy(),
            positive,
            negative,
            f1_macro: (positive.f1 + negative.f1) / 2.0,
            mcc: confusion.mcc(),
            confusion,
            unanswered: confusion.unanswered(),
        }
    }

    pub fn f1_per_class(&self) -> [(Label, f64); 2] {
        [(Label::Positive, self.positive.f1), (Label::Negative, self.negative.f1)]
    }

    /// Text report with per-class precision/recall/F1/support and macro and
    /// support-weighted averages.
    pub fn classification_report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:>14}{:>11}{:>10}{:>10}{:>10}\n", "", "precision", "recall", "f1-score", "support");
        for (name, m) in [("positive", &self.positive), ("negative", &self.negative)] {
            let _ = writeln!(out, "{name:>14}{:>11.2}{:>10.2}{:>10.2}{:>10}", m.precision, m.recall, m.f1, m.support);
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "{:>14}{:>11}{:>10}{:>10.2}{:>10}", "accuracy", "", "", self.accuracy, self.n);
        let (p, n) = (&self.positive, &self.negative);
        let _ = writeln!(
            out,
            "{:>14}{:>11.2}{:>10.2}{:>10.2}{:>10}",
            "macro avg",
            (p.precision + n.precision) / 2.0,
            (p.recall + n.recall) / 2.0,
            self.f1_macro,
            self.n
        );
        let w = |a: f64, b: f64| {
            if self.n == 0 {
                0.0
            } else {
                (a * p.support as f64 + b * n.support as f64) / self.n as f64
            }
        };
        let _ = writeln!(
            out,
            "{:>14}{:>11.2}{:>10.2}{:>10.2}{:>10}",
            "weighted avg",
            w(p.precision, n.precision),
            w(p.recall, n.recall),
            w(p.f1, n.f1),
            self.n
        );
        let _ = writeln!(out);
        let _ = writeln!(out, "mcc: {:.4}", self.mcc);
        let pct = if self.n == 0 { 0.0 } else { 100.0 * self.unanswered as f64 / self.n as f64 };
        let _ = writeln!(out, "unanswered: {} ({pct:.1}%)", self.unanswered);
        let _ = writeln!(out, "confusion (rows: true positive/negative; cols: predicted positive/negative/neutral):");
        for (name, row) in [("positive", self.confusion.counts[0]), ("negative", self.confusion.counts[1])] {
            let _ = writeln!(out, "{name:>14}{:>10}{:>10}{:>10}", row[0], row[1], row[2]);
        }
        out
    }
}

pub fn evaluate(
    sentences: &[LabeledSentence],
    lexicon: &CombinedLexicon,
    config: &ModelConfig,
    res: &LanguageResources,
) -> Result<EvalReport> {
    if sentences.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let clf = Classifier::new(lexicon, *config, res);
    let predicted: Vec<Polarity> = crate::par::map(sentences, |s| clf.classify(&s.sentence).polarity);
    let truth: Vec<Label> = sentences.iter().map(|s| s.label).collect();
    EvalReport::from_predictions(&truth, &predicted)
}

/// Keeps the sentences the LM-only model answers (non-neutral prediction).
pub fn lm_constrained_subset(
    sentences: &[LabeledSentence],
    lm_only_config: &ModelConfig,
    lexicon: &CombinedLexicon,
    res: &LanguageResources,
) -> Result<Vec<LabeledSentence>> {
    if lm_only_config.selector != LexiconSelector::LM {
        return Err(Error::InvalidConfig("LM-constrained subset needs the LM selector".into()));
    }
    let clf = Classifier::new(lexicon, *lm_only_config, res);
    let answered = crate::par::map(sentences, |s| clf.classify(&s.sentence).polarity != Polarity::Neutral);
    Ok(sentences
        .iter()
        .zip(answered)
        .filter(|(_, keep)| *keep)
        .map(|(s, _)| s.clone())
        .collect())
}

/// Lexicons built from one source dataset (typically standard + normalized).
#[derive(Debug, Clone)]
pub struct GridSource {
    pub name: String,
    pub lexicons: Vec<CombinedLexicon>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    /// Candidate values for `c_xlp`, `c_xlo` and `c_lmp`.
    pub values: Vec<f64>,
    /// Fixed `c_lmo`; LM entries have no opposite stats so it never matters.
    pub lmo: f64,
    pub features: DecisionFeatures,
    pub selectors: Vec<LexiconSelector>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            values: vec![0.1, 0.3, 0.5, 0.7, 0.9],
            lmo: 0.5,
            features: DecisionFeatures::shap_avg_only(),
            selectors: vec![LexiconSelector::XLex, LexiconSelector::Combined],
        }
    }
}

/// Metrics of one (source, selector) cell averaged over the source's
/// lexicons and all evaluation datasets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub source: String,
    pub selector: LexiconSelector,
    pub accuracy: f64,
    pub f1_macro: f64,
    pub mcc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub coefficients: Coefficients,
    pub cells: Vec<GridCell>,
    pub aggregated_average: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub best: Coefficients,
    pub aggregated_average: f64,
    /// One row per quadruple, in lexicographic coefficient order.
    pub rows: Vec<GridRow>,
}

impl GridResult {
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = ["c_xlp", "c_xlo", "c_lmp", "c_lmo", "aggregated_average"]
            .map(String::from)
            .to_vec();
        if let Some(row) = self.rows.first() {
            for cell in &row.cells {
                for metric in ["accuracy", "f1", "mcc"] {
                    header.push(format!("{}_{}_{metric}", cell.source, cell.selector));
                }
            }
        }
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec: Vec<String> = row.coefficients.as_array().iter().map(f64::to_string).collect();
            rec.push(crate::fmt::real(row.aggregated_average));
            for cell in &row.cells {
                for v in [cell.accuracy, cell.f1_macro, cell.mcc] {
                    rec.push(crate::fmt::real(v));
                }
            }
            w.write_record(&rec)?;
        }
        w.flush().map_err(|e| Error::io("<grid writer>", e))?;
        Ok(())
    }
}

/// Per-sentence cumulative values of the tokens a lexicon knows, in token
/// order, plus the true label.
struct ScoredDataset {
    sentences: Vec<Vec<CumulativeValues>>,
    truth: Vec<Label>,
}

impl ScoredDataset {
    fn new(
        lemmas: &[(Vec<String>, Label)],
        lexicon: &CombinedLexicon,
        features: &DecisionFeatures,
    ) -> Self {
        let table: std::collections::HashMap<&str, CumulativeValues> = lexicon
            .iter()
            .map(|e| (e.word.as_str(), CumulativeValues::of(Some(e), features)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        let sentences = lemmas
            .iter()
            .map(|(words, _)| words.iter().filter_map(|w| table.get(w.as_str()).copied()).collect())
            .collect();
        ScoredDataset {
            sentences,
            truth: lemmas.iter().map(|(_, l)| *l).collect(),
        }
    }

    fn confusion(&self, config: &ModelConfig) -> Confusion {
        let mut c = Confusion::default();
        for (words, truth) in self.sentences.iter().zip(&self.truth) {
            let mut value = ExactSum::new();
            for v in words {
                value.add(config.weigh(v));
            }
            let value = value.value();
            c.add(*truth, Polarity::of_value(value));
        }
        c
    }
}

/// Exhaustive search over `(c_xlp, c_xlo, c_lmp)` with `c_lmo` fixed. The
/// winner maximizes the sum of all cell metrics; ties go to the
/// lexicographically smallest quadruple.
pub fn grid_search(
    sources: &[GridSource],
    datasets: &[Vec<LabeledSentence>],
    spec: &GridSpec,
    res: &LanguageResources,
) -> Result<GridResult> {
    let mut values = spec.values.clone();
    values.sort_by(f64::total_cmp);
    values.dedup();
    if values.is_empty() {
        return Err(Error::InvalidConfig("grid needs at least one coefficient value".into()));
    }
    if spec.selectors.is_empty() {
        return Err(Error::InvalidConfig("grid needs at least one lexicon selector".into()));
    }
    if sources.is_empty() || sources.iter().any(|s| s.lexicons.is_empty()) {
        return Err(Error::InvalidConfig("every grid source needs at least one lexicon".into()));
    }
    if datasets.is_empty() || datasets.iter().any(Vec::is_empty) {
        return Err(Error::EmptyDataset);
    }

    let mut quads = Vec::with_capacity(values.len().pow(3));
    for &xlp in &values {
        for &xlo in &values {
            for &lmp in &values {
                quads.push(Coefficients::new(xlp, xlo, lmp, spec.lmo)?);
            }
        }
    }

    let lemmatized: Vec<Vec<(Vec<String>, Label)>> = datasets
        .iter()
        .map(|d| {
            crate::par::map(d, |s| {
                (crate::engine::sentence_lemmas(&s.sentence, res).collect(), s.label)
            })
        })
        .collect();

    // scored[source][lexicon * datasets + dataset]
    let scored: Vec<Vec<ScoredDataset>> = sources
        .iter()
        .map(|src| {
            src.lexicons
                .iter()
                .flat_map(|lex| lemmatized.iter().map(move |d| ScoredDataset::new(d, lex, &spec.features)))
                .collect()
        })
        .collect();

    let rows = crate::par::map(&quads, |coefficients| {
        let mut cells = Vec::with_capacity(sources.len() * spec.selectors.len());
        for (src, runs) in sources.iter().zip(&scored) {
            for &selector in &spec.selectors {
                let config = ModelConfig::new(selector, spec.features, *coefficients);
                let (mut acc, mut f1, mut mcc) = (0.0, 0.0, 0.0);
                for run in runs {
                    let report = EvalReport::from_confusion(run.confusion(&config));
                    acc += report.accuracy;
                    f1 += report.f1_macro;
                    mcc += report.mcc;
                }
                let k = runs.len() as f64;
                cells.push(GridCell {
                    source: src.name.clone(),
                    selector,
                    accuracy: acc / k,
                    f1_macro: f1 / k,
                    mcc: mcc / k,
                });
            }
        }
        let aggregated_average = cells.iter().fold(0.0, |s, c| s + c.accuracy + c.f1_macro + c.mcc);
        GridRow {
            coefficients: *coefficients,
            cells,
            aggregated_average,
        }
    });

    let mut best = 0;
    for (i, row) in rows.iter().enumerate().skip(1) {
        if row.aggregated_average > rows[best].aggregated_average {
            best = i;
        }
    }
    Ok(GridResult {
        best: rows[best].coefficients,
        aggregated_average: rows[best].aggregated_average,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub sentences: usize,
    pub repetitions: usize,
    /// Wall-clock seconds of each repetition.
    pub timings: Vec<f64>,
    pub mean: f64,
    pub sentences_per_second: f64,
    pub lexicon_bytes: u64,
    pub lexicon_words: usize,
    /// Seconds spent reading the lexicon file.
    pub load: f64,
    pub parallel: bool,
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "sentences:      {}", self.sentences)?;
        writeln!(f, "repetitions:    {}", self.repetitions)?;
        for (i, t) in self.timings.iter().enumerate() {
            writeln!(f, "  run {:>3}:     {:.6} s", i + 1, t)?;
        }
        writeln!(f, "mean:           {:.6} s", self.mean)?;
        writeln!(f, "throughput:     {:.0} sentences/s", self.sentences_per_second)?;
        writeln!(f, "lexicon:        {} words, {} bytes ({:.1} KB)", self.lexicon_words, self.lexicon_bytes, self.lexicon_bytes as f64 / 1024.0)?;
        writeln!(f, "lexicon load:   {:.6} s", self.load)?;
        write!(f, "parallel:       {}", self.parallel)
    }
}

/// Loads the lexicon at `lexicon_path` and classifies `sentences`
/// `repetitions` times, timing each pass.
pub fn benchmark<S: AsRef<str> + Sync>(
    sentences: &[S],
    lexicon_path: &Path,
    config: &ModelConfig,
    repetitions: usize,
    res: &LanguageResources,
) -> Result<BenchReport> {
    if repetitions == 0 {
        return Err(Error::InvalidConfig("repetitions must be at least 1".into()));
    }
    let lexicon_bytes = fs::metadata(lexicon_path)
        .map_err(|e| Error::io(lexicon_path, e))?
        .len();
    let start = Instant::now();
    let lexicon = CombinedLexicon::read_path(lexicon_path)?;
    let load = start.elapsed().as_secs_f64();

    let clf = Classifier::new(&lexicon, *config, res);
    let timings: Vec<f64> = (0..repetitions)
        .map(|_| {
            let start = Instant::now();
            std::hint::black_box(clf.classify_batch(sentences));
            start.elapsed().as_secs_f64()
        })
        .collect();
    let mean = timings.iter().sum::<f64>() / repetitions as f64;
    let sentences_per_second = if sentences.is_empty() || mean <= 0.0 {
        0.0
    } else {
        sentences.len() as f64 / mean
    };
    Ok(BenchReport {
        sentences: sentences.len(),
        repetitions,
        timings,
        mean,
        sentences_per_second,
        lexicon_bytes,
        lexicon_words: lexicon.len(),
        load,
        parallel: crate::par::is_parallel(),
    })
}
