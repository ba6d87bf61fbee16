//! Lexicon construction from per-polarity word statistics.
//!
//! Three steps run on the positive and negative tables produced by
//! [`crate::attribution`]:
//!
//! * [`lemmatize_and_dedupe`] folds inflected forms into their lemma. Counts
//!   and sums add, max/min take extrema, and the mean is recomputed from the
//!   merged sum and count.
//! * [`resolve_cross_duplicates`] assigns words found in both tables to the
//!   side with the larger SHAP sum (ties go negative) and records the other
//!   side as `_opp` features plus the SHAP ratio.
//! * [`merge_polarities`] concatenates the two disjoint tables into one
//!   [`Lexicon`] with a category column.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::attribution::{self, AttributionRecord, WordStats, WordTable};
use crate::error::{Error, Result};
use crate::fmt::{parse_count, parse_real, real};
use crate::sum::exact_sum;
use crate::textprep::LanguageResources;

pub const LEXICON_HEADER: [&str; 16] = [
    "word",
    "category",
    "count",
    "shap_sum",
    "shap_avg",
    "shap_max",
    "shap_min",
    "count_total",
    "count_opp",
    "shap_sum_opp",
    "shap_avg_opp",
    "shap_max_opp",
    "shap_min_opp",
    "shap_ratio",
    "shap_ratio_opp",
    "src",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Positive,
    Negative,
}

impl Category {
    pub fn opposite(self) -> Self {
        match self {
            Category::Positive => Category::Negative,
            Category::Negative => Category::Positive,
        }
    }

    /// `+1.0` for positive, `-1.0` for negative.
    pub fn sign(self) -> f64 {
        match self {
            Category::Positive => 1.0,
            Category::Negative => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Positive => "positive",
            Category::Negative => "negative",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positive" => Ok(Category::Positive),
            "negative" => Ok(Category::Negative),
            other => Err(format!("unknown category `{other}`")),
        }
    }
}

/// Which lexicon a row originates from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Source {
    XLex,
    LM,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::XLex => "XLex",
            Source::LM => "LM",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Source {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "XLex" => Ok(Source::XLex),
            "LM" => Ok(Source::LM),
            other => Err(format!("unknown source `{other}`")),
        }
    }
}

/// One lexicon word with its selected-category and opposite-category stats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub word: String,
    pub category: Category,
    pub count: u64,
    pub shap_sum: f64,
    pub shap_avg: f64,
    pub shap_max: f64,
    pub shap_min: f64,
    pub count_opp: u64,
    pub shap_sum_opp: f64,
    pub shap_avg_opp: f64,
    pub shap_max_opp: f64,
    pub shap_min_opp: f64,
    pub count_total: u64,
    pub shap_ratio: f64,
    pub shap_ratio_opp: f64,
    pub src: Source,
}

impl LexiconEntry {
    /// Entry for a word seen in a single polarity.
    pub fn single(stats: &WordStats, category: Category) -> Self {
        LexiconEntry {
            word: stats.word.clone(),
            category,
            count: stats.count,
            shap_sum: stats.shap_sum,
            shap_avg: stats.shap_avg,
            shap_max: stats.shap_max,
            shap_min: stats.shap_min,
            count_opp: 0,
            shap_sum_opp: 0.0,
            shap_avg_opp: 0.0,
            shap_max_opp: 0.0,
            shap_min_opp: 0.0,
            count_total: stats.count,
            shap_ratio: 1.0,
            shap_ratio_opp: 0.0,
            src: Source::XLex,
        }
    }

    /// Entry for a word seen in both polarities; `selected` wins the word.
    pub fn with_opposite(selected: &WordStats, opposite: &WordStats, category: Category) -> Self {
        let denom = selected.shap_avg + opposite.shap_avg;
        let shap_ratio = if denom > 0.0 { selected.shap_avg / denom } else { 1.0 };
        LexiconEntry {
            count_opp: opposite.count,
            shap_sum_opp: opposite.shap_sum,
            shap_avg_opp: opposite.shap_avg,
            shap_max_opp: opposite.shap_max,
            shap_min_opp: opposite.shap_min,
            count_total: selected.count + opposite.count,
            shap_ratio,
            shap_ratio_opp: 1.0 - shap_ratio,
            ..Self::single(selected, category)
        }
    }
}

/// Word-keyed table of [`LexiconEntry`], ordered by word.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lexicon {
    entries: BTreeMap<String, LexiconEntry>,
}

impl Lexicon {
    /// Builds a lexicon, rejecting duplicate words.
    pub fn from_entries(entries: impl IntoIterator<Item = LexiconEntry>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for e in entries {
            match map.entry(e.word.clone()) {
                Entry::Occupied(_) => return Err(Error::DuplicateWord(e.word)),
                Entry::Vacant(v) => {
                    v.insert(e);
                }
            }
        }
        Ok(Lexicon { entries: map })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&LexiconEntry> {
        self.entries.get(word)
    }

    pub fn iter(&self) -> impl Iterator<Item = &LexiconEntry> {
        self.entries.values()
    }

    /// `(positive, negative)` word counts.
    pub fn category_counts(&self) -> (usize, usize) {
        let pos = self.iter().filter(|e| e.category == Category::Positive).count();
        (pos, self.len() - pos)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(LEXICON_HEADER)?;
        for e in self.iter() {
            w.write_record([
                e.word.clone(),
                e.category.to_string(),
                e.count.to_string(),
                real(e.shap_sum),
                real(e.shap_avg),
                real(e.shap_max),
                real(e.shap_min),
                e.count_total.to_string(),
                e.count_opp.to_string(),
                real(e.shap_sum_opp),
                real(e.shap_avg_opp),
                real(e.shap_max_opp),
                real(e.shap_min_opp),
                real(e.shap_ratio),
                real(e.shap_ratio_opp),
                e.src.to_string(),
            ])?;
        }
        w.flush().map_err(|e| Error::io("<lexicon writer>", e))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        if rdr.headers()?.iter().ne(LEXICON_HEADER) {
            return Err(Error::malformed(1, format!("expected header `{}`", LEXICON_HEADER.join(","))));
        }
        let mut entries = Vec::new();
        for row in rdr.records() {
            let row = row?;
            let line = row.position().map_or(0, |p| p.line());
            if row.len() != LEXICON_HEADER.len() {
                return Err(Error::malformed(line, "wrong number of fields"));
            }
            let f = |i: usize| parse_real(&row[i], line, LEXICON_HEADER[i]);
            let c = |i: usize| parse_count(&row[i], line, LEXICON_HEADER[i]);
            entries.push(LexiconEntry {
                word: row[0].to_owned(),
                category: row[1].parse().map_err(|m| Error::malformed(line, m))?,
                count: c(2)?,
                shap_sum: f(3)?,
                shap_avg: f(4)?,
                shap_max: f(5)?,
                shap_min: f(6)?,
                count_total: c(7)?,
                count_opp: c(8)?,
                shap_sum_opp: f(9)?,
                shap_avg_opp: f(10)?,
                shap_max_opp: f(11)?,
                shap_min_opp: f(12)?,
                shap_ratio: f(13)?,
                shap_ratio_opp: f(14)?,
                src: row[15].parse().map_err(|m| Error::malformed(line, m))?,
            });
        }
        Self::from_entries(entries)
    }

    pub fn write_path(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn read_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(std::io::BufReader::new(file))
    }
}

impl<'a> IntoIterator for &'a Lexicon {
    type Item = &'a LexiconEntry;
    type IntoIter = std::collections::btree_map::Values<'a, String, LexiconEntry>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.values()
    }
}

/// Replaces every word by its lemma and merges rows that collide.
pub fn lemmatize_and_dedupe(table: &WordTable, res: &LanguageResources) -> WordTable {
    let mut groups: BTreeMap<&str, Vec<&WordStats>> = BTreeMap::new();
    for stats in table.values() {
        groups.entry(res.lemmatize(&stats.word)).or_default().push(stats);
    }
    groups
        .into_iter()
        .map(|(lemma, rows)| {
            let count = rows.iter().map(|s| s.count).sum::<u64>();
            let sums: Vec<f64> = rows.iter().map(|s| s.shap_sum).collect();
            let shap_sum = exact_sum(&sums);
            let merged = WordStats {
                word: lemma.to_owned(),
                count,
                shap_sum,
                shap_avg: shap_sum / count as f64,
                shap_max: rows.iter().map(|s| s.shap_max).fold(f64::NEG_INFINITY, f64::max),
                shap_min: rows.iter().map(|s| s.shap_min).fold(f64::INFINITY, f64::min),
            };
            (lemma.to_owned(), merged)
        })
        .collect()
}

/// Returns `(positive, negative)` entry lists, each sorted by word, with every
/// word present in exactly one of them.
pub fn resolve_cross_duplicates(
    pos: &WordTable,
    neg: &WordTable,
) -> (Vec<LexiconEntry>, Vec<LexiconEntry>) {
    let mut pos_out = Vec::new();
    let mut neg_out = Vec::new();

    for (word, p) in pos {
        match neg.get(word) {
            None => pos_out.push(LexiconEntry::single(p, Category::Positive)),
            Some(n) if p.shap_sum > n.shap_sum => {
                pos_out.push(LexiconEntry::with_opposite(p, n, Category::Positive))
            }
            Some(n) => neg_out.push(LexiconEntry::with_opposite(n, p, Category::Negative)),
        }
    }
    for (word, n) in neg {
        if !pos.contains_key(word) {
            neg_out.push(LexiconEntry::single(n, Category::Negative));
        }
    }
    neg_out.sort_by(|a, b| a.word.cmp(&b.word));
    (pos_out, neg_out)
}

/// Concatenates disjoint positive and negative tables.
pub fn merge_polarities(pos: Vec<LexiconEntry>, neg: Vec<LexiconEntry>) -> Result<Lexicon> {
    let tagged = |entries: Vec<LexiconEntry>, category| {
        entries.into_iter().map(move |e| LexiconEntry { category, ..e })
    };
    Lexicon::from_entries(tagged(pos, Category::Positive).chain(tagged(neg, Category::Negative)))
}

/// Full build from attribution records: split, accumulate, filter, lemmatize,
/// resolve and merge.
pub fn build_xlex(records: &[AttributionRecord], res: &LanguageResources) -> Result<Lexicon> {
    let (pos_raw, neg_raw) = attribution::split_by_polarity(records);
    let prepare = |raw: &[attribution::RawWord]| {
        let table = attribution::accumulate_word_stats(raw);
        lemmatize_and_dedupe(&attribution::postprocess(&table, res), res)
    };
    let (pos, neg) = crate::par::join(|| prepare(&pos_raw), || prepare(&neg_raw));
    let (pos, neg) = resolve_cross_duplicates(&pos, &neg);
    merge_polarities(pos, neg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stats(word: &str, count: u64, sum: f64, avg: f64, max: f64, min: f64) -> WordStats {
        WordStats {
            word: word.into(),
            count,
            shap_sum: sum,
            shap_avg: avg,
            shap_max: max,
            shap_min: min,
        }
    }

    fn table(rows: Vec<WordStats>) -> WordTable {
        rows.into_iter().map(|s| (s.word.clone(), s)).collect()
    }

    #[test]
    fn acquire_example() {
        let res = LanguageResources::bundled();
        let t = table(vec![
            stats("acquire", 9, 3.05, 0.34, 0.6, 0.05),
            stats("acquired", 4, 1.4, 0.35, 0.5, 0.23),
            stats("acquiring", 5, 0.88, 0.18, 0.43, 0.02),
        ]);
        let out = lemmatize_and_dedupe(&t, res);
        assert_eq!(out.len(), 1);
        let a = &out["acquire"];
        assert_eq!(a.count, 18);
        assert!((a.shap_sum - 5.33).abs() < 1e-12);
        assert!((a.shap_avg - 5.33 / 18.0).abs() < 1e-12);
        assert_eq!((a.shap_max, a.shap_min), (0.6, 0.02));
    }

    #[test]
    fn unique_lemma_unchanged() {
        let res = LanguageResources::bundled();
        let t = accumulate(&[("profit", 0.3), ("profit", 0.1)]);
        let out = lemmatize_and_dedupe(&t, res);
        assert_eq!(out, t);
    }

    fn accumulate(raw: &[(&str, f64)]) -> WordTable {
        let raw: Vec<_> = raw.iter().map(|(w, v)| (w.to_string(), *v)).collect();
        attribution::accumulate_word_stats(&raw)
    }

    #[test]
    fn option_example() {
        let pos = table(vec![stats("option", 15, 0.39, 0.026, 0.2, 0.07)]);
        let neg = table(vec![stats("option", 7, 0.023, 0.0033, 0.009, 0.0001)]);
        let (p, n) = resolve_cross_duplicates(&pos, &neg);
        assert!(n.is_empty());
        let e = &p[0];
        assert_eq!(e.category, Category::Positive);
        assert_eq!(
            (e.count_opp, e.shap_sum_opp, e.shap_avg_opp, e.shap_max_opp, e.shap_min_opp),
            (7, 0.023, 0.0033, 0.009, 0.0001)
        );
        assert_eq!((e.count, e.shap_sum, e.shap_avg), (15, 0.39, 0.026));
        assert_eq!(e.count_total, 22);
        assert!((e.shap_ratio - 0.887).abs() < 1e-3);
        assert!((e.shap_ratio_opp - 0.113).abs() < 1e-3);
    }

    #[test]
    fn single_polarity_ratio_one() {
        let pos = table(vec![stats("gain", 3, 0.9, 0.3, 0.5, 0.1)]);
        let (p, n) = resolve_cross_duplicates(&pos, &WordTable::new());
        assert!(n.is_empty());
        assert_eq!(p[0].shap_ratio, 1.0);
        assert_eq!(p[0].shap_ratio_opp, 0.0);
        assert_eq!(p[0].count_total, 3);
        assert_eq!(p[0].count_opp, 0);
        assert_eq!(p[0].shap_avg_opp, 0.0);
    }

    #[test]
    fn tie_goes_negative() {
        let pos = table(vec![stats("flat", 2, 0.5, 0.25, 0.3, 0.2)]);
        let neg = table(vec![stats("flat", 1, 0.5, 0.5, 0.5, 0.5)]);
        let (p, n) = resolve_cross_duplicates(&pos, &neg);
        assert!(p.is_empty());
        assert_eq!(n[0].category, Category::Negative);
        assert_eq!(n[0].count_opp, 2);
        assert!((n[0].shap_ratio - 0.5 / 0.75).abs() < 1e-15);
    }

    #[test]
    fn merge_counts_and_categories() {
        let pos = table(vec![
            stats("gain", 1, 0.1, 0.1, 0.1, 0.1),
            stats("rise", 1, 0.1, 0.1, 0.1, 0.1),
            stats("beat", 1, 0.1, 0.1, 0.1, 0.1),
        ]);
        let neg = table(vec![stats("loss", 1, 0.1, 0.1, 0.1, 0.1), stats("fall", 1, 0.1, 0.1, 0.1, 0.1)]);
        let (p, n) = resolve_cross_duplicates(&pos, &neg);
        let lex = merge_polarities(p.clone(), n).unwrap();
        assert_eq!(lex.len(), 5);
        assert_eq!(lex.category_counts(), (3, 2));
        assert_eq!(lex.get("fall").unwrap().category, Category::Negative);

        let only_pos = merge_polarities(p.clone(), vec![]).unwrap();
        assert_eq!(only_pos.iter().cloned().collect::<Vec<_>>(), p);
    }

    #[test]
    fn merge_without_resolve_fails() {
        let shared = stats("option", 1, 0.1, 0.1, 0.1, 0.1);
        let pos = vec![LexiconEntry::single(&shared, Category::Positive)];
        let neg = vec![LexiconEntry::single(&shared, Category::Negative)];
        assert!(matches!(merge_polarities(pos, neg), Err(Error::DuplicateWord(w)) if w == "option"));
    }

    #[test]
    fn csv_round_trip_and_order() {
        let pos = table(vec![
            stats("option", 15, 0.39, 0.026, 0.2, 0.07),
            stats("gain", 2, 0.6, 0.3, 0.4, 0.2),
        ]);
        let neg = table(vec![stats("option", 7, 0.023, 0.0033, 0.009, 0.0001), stats("loss", 1, 0.5, 0.5, 0.5, 0.5)]);
        let (p, n) = resolve_cross_duplicates(&pos, &neg);
        let lex = merge_polarities(p, n).unwrap();
        let mut buf = Vec::new();
        lex.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), LEXICON_HEADER.join(","));
        let words: Vec<_> = lines.map(|l| l.split(',').next().unwrap()).collect();
        assert_eq!(words, ["gain", "loss", "option"]);
        assert!(text.contains("option,positive,15,0.39,0.026,0.2,0.07,22,7,0.023,0.0033,0.009,0.0001,0.887372013652,0.112627986348,XLex"));

        let back = Lexicon::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 3);
        let o = back.get("option").unwrap();
        assert!((o.shap_ratio - lex.get("option").unwrap().shap_ratio).abs() < 1e-12);
    }

    #[test]
    fn build_xlex_end_to_end() {
        let res = LanguageResources::bundled();
        let rec = |id, token: &str, value| AttributionRecord { sentence_id: id, token: token.into(), value };
        let records = vec![
            rec(0, "Profits", 0.4),
            rec(0, "rose", 0.0),
            rec(0, "the", 0.3),
            rec(1, "profit", -0.1),
            rec(1, "Losses", -0.5),
            rec(1, "qx", -0.2),
        ];
        let lex = build_xlex(&records, res).unwrap();
        assert_eq!(lex.len(), 2);
        let p = lex.get("profit").unwrap();
        assert_eq!(p.category, Category::Positive);
        assert_eq!((p.count, p.count_opp, p.count_total), (1, 1, 2));
        assert!((p.shap_ratio - 0.8).abs() < 1e-12);
        assert_eq!(lex.get("loss").unwrap().category, Category::Negative);
    }
}
