//! Lexicon-based sentence scoring.
//!
//! A word's *cumulative value* for one lexicon group and one role is the sum
//! of its selected decision features, signed by the category the values
//! belong to: the primary role uses the word's category, the opposite role
//! uses the other category. A positive-selected word therefore has a
//! non-negative primary term and a non-positive opposite term.
//!
//! The word sentiment is the coefficient-weighted sum of the four cumulative
//! values (or the two of a single lexicon), and a sentence scores the sum over
//! its token occurrences. The sign of that sum is the predicted polarity.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::merge::{CombinedEntry, CombinedLexicon, Feature, Side};
use crate::sum::ExactSum;
use crate::textprep::{self, LanguageResources};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DecisionFeature {
    ShapAvg,
    ShapRatio,
    Count,
}

impl DecisionFeature {
    fn column(self, role: Role) -> Feature {
        match (self, role) {
            (DecisionFeature::ShapAvg, Role::Primary) => Feature::ShapAvg,
            (DecisionFeature::ShapRatio, Role::Primary) => Feature::ShapRatio,
            (DecisionFeature::Count, Role::Primary) => Feature::Count,
            (DecisionFeature::ShapAvg, Role::Opposite) => Feature::ShapAvgOpp,
            (DecisionFeature::ShapRatio, Role::Opposite) => Feature::ShapRatioOpp,
            (DecisionFeature::Count, Role::Opposite) => Feature::CountOpp,
        }
    }
}

/// Non-empty subset of the decision features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DecisionFeatures {
    shap_avg: bool,
    shap_ratio: bool,
    count: bool,
}

impl DecisionFeatures {
    pub fn new(shap_avg: bool, shap_ratio: bool, count: bool) -> Result<Self> {
        if !(shap_avg || shap_ratio || count) {
            return Err(Error::InvalidConfig("at least one decision feature is required".into()));
        }
        Ok(DecisionFeatures { shap_avg, shap_ratio, count })
    }

    pub fn shap_avg_only() -> Self {
        DecisionFeatures {
            shap_avg: true,
            shap_ratio: false,
            count: false,
        }
    }

    pub fn contains(&self, f: DecisionFeature) -> bool {
        match f {
            DecisionFeature::ShapAvg => self.shap_avg,
            DecisionFeature::ShapRatio => self.shap_ratio,
            DecisionFeature::Count => self.count,
        }
    }

    /// Selected features in fixed summation order: avg, ratio, count.
    pub fn iter(&self) -> impl Iterator<Item = DecisionFeature> + '_ {
        [DecisionFeature::ShapAvg, DecisionFeature::ShapRatio, DecisionFeature::Count]
            .into_iter()
            .filter(|f| self.contains(*f))
    }
}

impl Default for DecisionFeatures {
    fn default() -> Self {
        Self::shap_avg_only()
    }
}

impl FromStr for DecisionFeatures {
    type Err = Error;

    /// Parses a comma-separated list such as `avg,ratio,count`.
    fn from_str(s: &str) -> Result<Self> {
        let (mut avg, mut ratio, mut count) = (false, false, false);
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match part {
                "avg" | "shap_avg" => avg = true,
                "ratio" | "shap_ratio" => ratio = true,
                "count" => count = true,
                other => return Err(Error::InvalidConfig(format!("unknown decision feature `{other}`"))),
            }
        }
        Self::new(avg, ratio, count)
    }
}

impl fmt::Display for DecisionFeatures {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self
            .iter()
            .map(|x| match x {
                DecisionFeature::ShapAvg => "avg",
                DecisionFeature::ShapRatio => "ratio",
                DecisionFeature::Count => "count",
            })
            .collect();
        f.write_str(&names.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LexiconSelector {
    XLex,
    LM,
    Combined,
}

impl LexiconSelector {
    pub fn as_str(self) -> &'static str {
        match self {
            LexiconSelector::XLex => "xlex",
            LexiconSelector::LM => "lm",
            LexiconSelector::Combined => "combined",
        }
    }
}

impl fmt::Display for LexiconSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LexiconSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "xlex" => Ok(LexiconSelector::XLex),
            "lm" => Ok(LexiconSelector::LM),
            "combined" | "xlex+lm" => Ok(LexiconSelector::Combined),
            other => Err(Error::InvalidConfig(format!("unknown lexicon selector `{other}`"))),
        }
    }
}

/// `(c_xlp, c_xlo, c_lmp, c_lmo)`: weights of the XLex primary/opposite and
/// LM primary/opposite cumulative values.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Coefficients {
    pub xlp: f64,
    pub xlo: f64,
    pub lmp: f64,
    pub lmo: f64,
}

impl Coefficients {
    pub fn new(xlp: f64, xlo: f64, lmp: f64, lmo: f64) -> Result<Self> {
        let c = Coefficients { xlp, xlo, lmp, lmo };
        if c.as_array().iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::InvalidConfig(format!("coefficients must be positive and finite: {c}")));
        }
        Ok(c)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.xlp, self.xlo, self.lmp, self.lmo]
    }

    pub fn scaled(&self, k: f64) -> Result<Self> {
        Self::new(self.xlp * k, self.xlo * k, self.lmp * k, self.lmo * k)
    }
}

impl Default for Coefficients {
    /// The grid-search optimum `(0.3, 0.1, 0.1, 0.5)`.
    fn default() -> Self {
        Coefficients {
            xlp: 0.3,
            xlo: 0.1,
            lmp: 0.1,
            lmo: 0.5,
        }
    }
}

impl fmt::Display for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.xlp, self.xlo, self.lmp, self.lmo)
    }
}

impl FromStr for Coefficients {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| Error::InvalidConfig(format!("coefficients `{s}` are not numbers")))?;
        match parts[..] {
            [a, b, c, d] => Self::new(a, b, c, d),
            _ => Err(Error::InvalidConfig(format!("expected four coefficients, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub selector: LexiconSelector,
    pub features: DecisionFeatures,
    pub coefficients: Coefficients,
}

impl ModelConfig {
    pub fn new(selector: LexiconSelector, features: DecisionFeatures, coefficients: Coefficients) -> Self {
        ModelConfig {
            selector,
            features,
            coefficients,
        }
    }

    /// Coefficient-weighted word sentiment from precomputed cumulative values.
    pub fn weigh(&self, v: &CumulativeValues) -> f64 {
        let c = &self.coefficients;
        match self.selector {
            LexiconSelector::Combined => c.xlp * v.xl + c.xlo * v.xl_opp + c.lmp * v.lm + c.lmo * v.lm_opp,
            LexiconSelector::XLex => c.xlp * v.xl + c.xlo * v.xl_opp,
            LexiconSelector::LM => c.lmp * v.lm + c.lmo * v.lm_opp,
        }
    }
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig::new(LexiconSelector::Combined, DecisionFeatures::default(), Coefficients::default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Primary,
    Opposite,
}

/// Signed cumulative value of one (group, role) of a lexicon row.
pub fn cumulative_value(
    entry: Option<&CombinedEntry>,
    side: Side,
    role: Role,
    features: &DecisionFeatures,
) -> f64 {
    let Some(entry) = entry else { return 0.0 };
    let group = entry.group(side);
    let Some(category) = group.category else { return 0.0 };
    let sum: f64 = features.iter().map(|f| group.values[f.column(role)]).sum();
    let sign = match role {
        Role::Primary => category.sign(),
        Role::Opposite => category.opposite().sign(),
    };
    sign * sum
}

/// The four cumulative values of a word, independent of the coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CumulativeValues {
    pub xl: f64,
    pub xl_opp: f64,
    pub lm: f64,
    pub lm_opp: f64,
}

impl CumulativeValues {
    pub fn of(entry: Option<&CombinedEntry>, features: &DecisionFeatures) -> Self {
        CumulativeValues {
            xl: cumulative_value(entry, Side::XLex, Role::Primary, features),
            xl_opp: cumulative_value(entry, Side::XLex, Role::Opposite, features),
            lm: cumulative_value(entry, Side::Lm, Role::Primary, features),
            lm_opp: cumulative_value(entry, Side::Lm, Role::Opposite, features),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.xl == 0.0 && self.xl_opp == 0.0 && self.lm == 0.0 && self.lm_opp == 0.0
    }
}

pub fn word_sentiment(word: &str, lexicon: &CombinedLexicon, config: &ModelConfig) -> f64 {
    config.weigh(&CumulativeValues::of(lexicon.get(word), &config.features))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
    Neutral,
}

impl Polarity {
    pub fn of_value(value: f64) -> Self {
        if value > 0.0 {
            Polarity::Positive
        } else if value < 0.0 {
            Polarity::Negative
        } else {
            Polarity::Neutral
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
            Polarity::Neutral => "neutral",
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SentenceVerdict {
    pub value: f64,
    pub polarity: Polarity,
    pub matched_words: usize,
}

impl SentenceVerdict {
    fn from_scores(scores: impl Iterator<Item = f64>) -> Self {
        let mut value = ExactSum::new();
        let mut matched_words = 0;
        for s in scores {
            if s != 0.0 {
                value.add(s);
                matched_words += 1;
            }
        }
        let value = value.value();
        SentenceVerdict {
            value,
            polarity: Polarity::of_value(value),
            matched_words,
        }
    }
}

/// Lowercased lemmas of the tokens of `text`, in order.
pub fn sentence_lemmas<'r>(text: &'r str, res: &'r LanguageResources) -> impl Iterator<Item = String> + 'r {
    textprep::split_words(text).map(move |w| {
        let lower = w.to_lowercase();
        res.lemmatize(&lower).to_owned()
    })
}

/// Scores one sentence by direct lexicon lookups.
pub fn sentence_sentiment(
    text: &str,
    lexicon: &CombinedLexicon,
    config: &ModelConfig,
    res: &LanguageResources,
) -> SentenceVerdict {
    SentenceVerdict::from_scores(sentence_lemmas(text, res).map(|lemma| word_sentiment(&lemma, lexicon, config)))
}

/// Precomputes word sentiments for a lexicon and configuration so that
/// sentence scoring is a lookup per token. Produces the same values as
/// [`sentence_sentiment`].
#[derive(Debug, Clone)]
pub struct Classifier<'a> {
    scores: HashMap<&'a str, f64>,
    res: &'a LanguageResources,
    config: ModelConfig,
}

impl<'a> Classifier<'a> {
    pub fn new(lexicon: &'a CombinedLexicon, config: ModelConfig, res: &'a LanguageResources) -> Self {
        let scores = lexicon
            .iter()
            .map(|e| (e.word.as_str(), config.weigh(&CumulativeValues::of(Some(e), &config.features))))
            .filter(|(_, s)| *s != 0.0)
            .collect();
        Classifier { scores, res, config }
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn word_score(&self, lemma: &str) -> f64 {
        self.scores.get(lemma).copied().unwrap_or(0.0)
    }

    pub fn classify(&self, text: &str) -> SentenceVerdict {
        SentenceVerdict::from_scores(textprep::split_words(text).map(|w| {
            let lower = w.to_lowercase();
            self.word_score(self.res.lemmatize(&lower))
        }))
    }

    /// Classifies a batch, in parallel when the `parallel` feature is on.
    pub fn classify_batch<S: AsRef<str> + Sync>(&self, sentences: &[S]) -> Vec<SentenceVerdict> {
        crate::par::map(sentences, |s| self.classify(s.as_ref()))
    }

    pub fn classify_batch_sequential<S: AsRef<str>>(&self, sentences: &[S]) -> Vec<SentenceVerdict> {
        crate::par::map_sequential(sentences, |s| self.classify(s.as_ref()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attribution::WordStats;
    use crate::lexicon::{Category, Lexicon, LexiconEntry};
    use crate::merge::{combine, prepare_lm};

    fn features(avg: bool, ratio: bool, count: bool) -> DecisionFeatures {
        DecisionFeatures::new(avg, ratio, count).unwrap()
    }

    fn entry(word: &str, category: Category, avg: f64, ratio: f64) -> LexiconEntry {
        let s = WordStats {
            word: word.into(),
            count: 1,
            shap_sum: avg,
            shap_avg: avg,
            shap_max: avg,
            shap_min: avg,
        };
        LexiconEntry {
            shap_ratio: ratio,
            shap_ratio_opp: 1.0 - ratio,
            ..LexiconEntry::single(&s, category)
        }
    }

    fn coeffs() -> Coefficients {
        Coefficients::new(0.3, 0.1, 0.1, 0.5).unwrap()
    }

    #[test]
    fn cumulative_sign_rule() {
        let f = features(true, true, false);
        let pos = combine(&Lexicon::from_entries([entry("up", Category::Positive, 0.2, 0.8)]).unwrap(), &Lexicon::default());
        let e = pos.get("up");
        assert!((cumulative_value(e, Side::XLex, Role::Primary, &f) - 1.0).abs() < 1e-15);

        let neg = combine(&Lexicon::from_entries([entry("up", Category::Negative, 0.2, 0.8)]).unwrap(), &Lexicon::default());
        assert!((cumulative_value(neg.get("up"), Side::XLex, Role::Primary, &f) + 1.0).abs() < 1e-15);
        // opposite of a negative word holds positive-category stats: 0 + 0.2
        assert!((cumulative_value(neg.get("up"), Side::XLex, Role::Opposite, &f) - 0.2).abs() < 1e-15);

        assert_eq!(cumulative_value(None, Side::XLex, Role::Primary, &f), 0.0);
        assert_eq!(cumulative_value(e, Side::Lm, Role::Primary, &f), 0.0);
    }

    #[test]
    fn word_sentiment_by_selector() {
        let res = LanguageResources::default();
        let xlex = Lexicon::from_entries([entry("gain", Category::Positive, 0.2, 1.0)]).unwrap();
        let lm = prepare_lm(Vec::<&str>::new(), ["loss"], &res).unwrap();
        let lex = combine(&xlex, &lm);
        let f = features(true, false, false);

        let xl = ModelConfig::new(LexiconSelector::XLex, f, coeffs());
        assert!((word_sentiment("gain", &lex, &xl) - 0.06).abs() < 1e-15);

        let lmc = ModelConfig::new(LexiconSelector::LM, f, coeffs());
        assert!((word_sentiment("loss", &lex, &lmc) + 0.1).abs() < 1e-15);

        for sel in [LexiconSelector::XLex, LexiconSelector::LM, LexiconSelector::Combined] {
            assert_eq!(word_sentiment("unknown", &lex, &ModelConfig::new(sel, f, coeffs())), 0.0);
        }
    }

    #[test]
    fn sentence_sum_and_polarity() {
        let res = LanguageResources::default();
        let xlex = Lexicon::from_entries([entry("gain", Category::Positive, 0.2, 1.0)]).unwrap();
        let lm = prepare_lm(Vec::<&str>::new(), ["loss"], &res).unwrap();
        let lex = combine(&xlex, &lm);
        let cfg = ModelConfig::new(LexiconSelector::Combined, features(true, false, false), coeffs());

        let v = sentence_sentiment("Gain, loss and foo.", &lex, &cfg, &res);
        assert!((v.value - (0.06 - 0.1)).abs() < 1e-15);
        assert_eq!(v.polarity, Polarity::Negative);
        assert_eq!(v.matched_words, 2);

        let v = sentence_sentiment("nothing here", &lex, &cfg, &res);
        assert_eq!((v.value, v.polarity, v.matched_words), (0.0, Polarity::Neutral, 0));

        let v = sentence_sentiment("gain gain", &lex, &cfg, &res);
        assert_eq!(v.polarity, Polarity::Positive);
        assert_eq!(v.matched_words, 2);

        let clf = Classifier::new(&lex, cfg, &res);
        for s in ["Gain, loss and foo.", "nothing", "GAIN!", ""] {
            assert_eq!(clf.classify(s), sentence_sentiment(s, &lex, &cfg, &res));
        }
    }

    #[test]
    fn parse_config_parts() {
        assert_eq!("avg,ratio".parse::<DecisionFeatures>().unwrap(), features(true, true, false));
        assert!("".parse::<DecisionFeatures>().is_err());
        assert!("avg,bogus".parse::<DecisionFeatures>().is_err());
        assert_eq!("0.3,0.1,0.1,0.5".parse::<Coefficients>().unwrap(), Coefficients::default());
        assert!("0.3,0.1,0.1".parse::<Coefficients>().is_err());
        assert!("0.3,0,0.1,0.5".parse::<Coefficients>().is_err());
        assert_eq!("XLex+LM".parse::<LexiconSelector>().unwrap(), LexiconSelector::Combined);
    }
}
