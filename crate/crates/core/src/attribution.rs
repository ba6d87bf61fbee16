//! Attribution CSV ingest and per-word statistics.
//!
//! An attribution file has one row per token occurrence:
//!
//! ```text
//! sentence_id,token,value
//! 0,Profit,0.31
//! 0,fell,-0.12
//! ```
//!
//! Positive values push the model toward the positive class. Tokens are split
//! by sign, lowercased and aggregated over the absolute values.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::{parse_count, parse_real};
use crate::sum::exact_sum;
use crate::textprep::LanguageResources;

pub const ATTRIBUTION_HEADER: [&str; 3] = ["sentence_id", "token", "value"];

/// Values may exceed the unit interval by this much before being rejected.
const RANGE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionRecord {
    pub sentence_id: u64,
    pub token: String,
    pub value: f64,
}

/// Aggregate over the absolute attribution values of one word.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordStats {
    pub word: String,
    pub count: u64,
    pub shap_sum: f64,
    pub shap_avg: f64,
    pub shap_max: f64,
    pub shap_min: f64,
}

/// Word-keyed statistics, iterated in ascending word order.
pub type WordTable = BTreeMap<String, WordStats>;

/// A lowercased word with its absolute attribution.
pub type RawWord = (String, f64);

pub fn parse_attribution_file<R: Read>(reader: R) -> Result<Vec<AttributionRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);

    let header = rdr.headers()?.clone();
    if header.iter().map(str::trim).ne(ATTRIBUTION_HEADER) {
        // an empty stream has no header row at all
        if header.is_empty() {
            return Ok(Vec::new());
        }
        return Err(Error::malformed(
            1,
            format!("expected header `{}`", ATTRIBUTION_HEADER.join(",")),
        ));
    }

    let mut records = Vec::new();
    let mut row = csv::StringRecord::new();
    loop {
        match rdr.read_record(&mut row) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                return Err(Error::malformed(line, e.to_string()));
            }
        }
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != 3 {
            return Err(Error::malformed(line, format!("expected 3 fields, found {}", row.len())));
        }
        let sentence_id = parse_count(&row[0], line, "sentence_id")?;
        let token = row[1].to_owned();
        if token.is_empty() {
            return Err(Error::malformed(line, "empty token"));
        }
        let value = parse_real(&row[2], line, "value")?;
        if value.abs() > 1.0 + RANGE_SLACK {
            return Err(Error::ValueOutOfRange { line, value });
        }
        records.push(AttributionRecord {
            sentence_id,
            token,
            value,
        });
    }
    Ok(records)
}

pub fn read_attribution_path(path: impl AsRef<Path>) -> Result<Vec<AttributionRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_attribution_file(std::io::BufReader::new(file))
}

/// Splits records into positive and negative raw word lists. Zero weights are
/// dropped; tokens are lowercased and values replaced by their magnitude.
pub fn split_by_polarity(records: &[AttributionRecord]) -> (Vec<RawWord>, Vec<RawWord>) {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for r in records {
        if r.value > 0.0 {
            pos.push((r.token.to_lowercase(), r.value));
        } else if r.value < 0.0 {
            neg.push((r.token.to_lowercase(), -r.value));
        }
    }
    (pos, neg)
}

/// Groups raw words and computes count, sum, mean, max and min.
///
/// Sums are correctly rounded, so the table is bit-identical for any
/// permutation of `raw`.
pub fn accumulate_word_stats(raw: &[RawWord]) -> WordTable {
    let mut groups: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for (word, value) in raw {
        groups.entry(word.as_str()).or_default().push(*value);
    }
    groups
        .into_iter()
        .map(|(word, values)| {
            let count = values.len() as u64;
            let shap_sum = exact_sum(&values);
            let stats = WordStats {
                word: word.to_owned(),
                count,
                shap_sum,
                shap_avg: shap_sum / count as f64,
                shap_max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                shap_min: values.iter().copied().fold(f64::INFINITY, f64::min),
            };
            (word.to_owned(), stats)
        })
        .collect()
}

/// Keeps only rows whose word passes [`LanguageResources::is_valid_word`].
pub fn postprocess(table: &WordTable, res: &LanguageResources) -> WordTable {
    table
        .iter()
        .filter(|(word, _)| res.is_valid_word(word))
        .map(|(w, s)| (w.clone(), s.clone()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(id: u64, token: &str, value: f64) -> AttributionRecord {
        AttributionRecord {
            sentence_id: id,
            token: token.into(),
            value,
        }
    }

    #[test]
    fn parse_single_row() {
        let recs = parse_attribution_file("sentence_id,token,value\n0,profit,0.31\n".as_bytes()).unwrap();
        assert_eq!(recs, vec![rec(0, "profit", 0.31)]);
    }

    #[test]
    fn parse_keeps_file_order() {
        let csv = "sentence_id,token,value\n0,a,0.1\n0,b,-0.2\n0,c,0\n1,d,0.5\n1,\"e,f\",-1\n1,g,1.0\n";
        let recs = parse_attribution_file(csv.as_bytes()).unwrap();
        let tokens: Vec<_> = recs.iter().map(|r| r.token.as_str()).collect();
        assert_eq!(tokens, ["a", "b", "c", "d", "e,f", "g"]);
        assert_eq!(recs[4].sentence_id, 1);
    }

    #[test]
    fn parse_out_of_range() {
        let err = parse_attribution_file("sentence_id,token,value\n0,profit,1.5\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::ValueOutOfRange { line: 2, .. }), "{err}");
        // slack within 1e-9 is accepted
        parse_attribution_file("sentence_id,token,value\n0,x,-1.0000000001\n".as_bytes()).unwrap();
    }

    #[test]
    fn parse_malformed_rows_report_line() {
        for body in ["0,profit\n", "x,profit,0.1\n", "0,profit,abc\n", "0,,0.1\n", "0,a,NaN\n"] {
            let csv = format!("sentence_id,token,value\n0,ok,0.1\n{body}");
            match parse_attribution_file(csv.as_bytes()) {
                Err(Error::MalformedRow { line, .. }) => assert_eq!(line, 3, "{body}"),
                other => panic!("{body}: {other:?}"),
            }
        }
    }

    #[test]
    fn parse_bad_header_and_empty() {
        assert!(matches!(
            parse_attribution_file("id,token,value\n".as_bytes()),
            Err(Error::MalformedRow { line: 1, .. })
        ));
        assert!(parse_attribution_file("".as_bytes()).unwrap().is_empty());
        assert!(parse_attribution_file("sentence_id,token,value\n".as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn split_sign_and_abs() {
        let (pos, neg) = split_by_polarity(&[rec(0, "Gain", 0.2), rec(0, "loss", -0.3)]);
        assert_eq!(pos, vec![("gain".to_owned(), 0.2)]);
        assert_eq!(neg, vec![("loss".to_owned(), 0.3)]);
        let (pos, neg) = split_by_polarity(&[rec(0, "flat", 0.0)]);
        assert!(pos.is_empty() && neg.is_empty());
    }

    #[test]
    fn accumulate_hand_values() {
        let t = accumulate_word_stats(&[("gain".into(), 0.2), ("gain".into(), 0.4)]);
        let g = &t["gain"];
        assert_eq!(g.count, 2);
        assert!((g.shap_sum - 0.6).abs() < 1e-15);
        assert!((g.shap_avg - 0.3).abs() < 1e-15);
        assert_eq!((g.shap_max, g.shap_min), (0.4, 0.2));

        let t = accumulate_word_stats(&[("x".into(), 0.5)]);
        let x = &t["x"];
        assert_eq!((x.count, x.shap_sum, x.shap_avg, x.shap_max, x.shap_min), (1, 0.5, 0.5, 0.5, 0.5));

        assert!(accumulate_word_stats(&[]).is_empty());
    }

    #[test]
    fn postprocess_filters() {
        let res = LanguageResources::bundled();
        let t = accumulate_word_stats(&[("of".into(), 0.1), ("profit".into(), 0.2), ("qx".into(), 0.3)]);
        let kept = postprocess(&t, res);
        assert_eq!(kept.keys().collect::<Vec<_>>(), ["profit"]);
        assert_eq!(kept["profit"], t["profit"]);
    }

    #[test]
    fn postprocess_ten_words_four_invalid() {
        let res = LanguageResources::bundled();
        let words = [
            "profit", "market", "growth", "loss", "company", "revenue", // valid
            "the", "of", "zzzxq", "22",                                  // invalid
        ];
        let raw: Vec<RawWord> = words.iter().enumerate().map(|(i, w)| (w.to_string(), 0.05 * (i + 1) as f64)).collect();
        let t = accumulate_word_stats(&raw);
        let kept = postprocess(&t, res);
        assert_eq!(kept.len(), 6);
        for (w, s) in &kept {
            assert_eq!(s, &t[w]);
        }
    }

    fn raw_words() -> impl Strategy<Value = Vec<RawWord>> {
        prop::collection::vec(("[a-e]{1,2}", 0.0f64..1.0), 0..200)
    }

    proptest! {
        #[test]
        fn stats_invariants(raw in raw_words()) {
            for s in accumulate_word_stats(&raw).values() {
                prop_assert!(s.count >= 1);
                prop_assert!(s.shap_min <= s.shap_avg + 1e-15 && s.shap_avg <= s.shap_max + 1e-15);
                prop_assert!((s.shap_avg * s.count as f64 - s.shap_sum).abs() <= 1e-9 * s.shap_sum.max(1.0));
            }
        }

        #[test]
        fn accumulate_matches_group_by(raw in raw_words()) {
            let table = accumulate_word_stats(&raw);
            let mut words: Vec<&str> = raw.iter().map(|(w, _)| w.as_str()).collect();
            words.sort();
            words.dedup();
            prop_assert_eq!(table.len(), words.len());
            for w in words {
                let vals: Vec<f64> = raw.iter().filter(|(x, _)| x == w).map(|(_, v)| *v).collect();
                let s = &table[w];
                prop_assert_eq!(s.count as usize, vals.len());
                let sum: f64 = vals.iter().sum();
                prop_assert!((s.shap_sum - sum).abs() <= 1e-12 * sum.max(1.0));
                prop_assert_eq!(s.shap_max, vals.iter().cloned().fold(f64::MIN, f64::max));
                prop_assert_eq!(s.shap_min, vals.iter().cloned().fold(f64::MAX, f64::min));
            }
        }

        #[test]
        fn accumulate_permutation_invariant(raw in raw_words(), seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let mut shuffled = raw.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            prop_assert_eq!(accumulate_word_stats(&raw), accumulate_word_stats(&shuffled));
        }

        #[test]
        fn split_conserves(values in prop::collection::vec(prop_oneof![Just(0.0), -1.0f64..1.0], 0..100)) {
            let recs: Vec<_> = values.iter().map(|&v| rec(0, "w", v)).collect();
            let (pos, neg) = split_by_polarity(&recs);
            let zeros = values.iter().filter(|&&v| v == 0.0).count();
            prop_assert_eq!(pos.len() + neg.len() + zeros, values.len());
            prop_assert!(pos.iter().chain(&neg).all(|(_, v)| *v > 0.0));
        }

        #[test]
        fn postprocess_idempotent(raw in prop::collection::vec(("(the|of|profit|gain|loss|qx|market)", 0.0f64..1.0), 0..50)) {
            let res = LanguageResources::bundled();
            let once = postprocess(&accumulate_word_stats(&raw), res);
            prop_assert_eq!(postprocess(&once, res), once);
        }
    }
}
