//! Combining the explainable lexicon with the LM word lists.
//!
//! LM words carry no attribution statistics, so [`prepare_lm`] gives every
//! selected-category feature the value 1 and every opposite feature 0. The
//! combined lexicon is an outer join on the word: each row holds an `xlex_`
//! and an `lm_` feature group, and a group that has no source row is filled
//! with zeros, category `none` and the *other* lexicon's source tag.

use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File};
use std::io::{Read, Write};
use std::ops::{Index, IndexMut};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::{parse_real, real};
use crate::lexicon::{Category, Lexicon, LexiconEntry, Source};
use crate::textprep::LanguageResources;
use crate::LEXICON_FORMAT_VERSION;

/// Numeric columns carried by each lexicon group of a combined row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Feature {
    Count,
    CountTotal,
    CountOpp,
    ShapSum,
    ShapAvg,
    ShapMax,
    ShapMin,
    ShapRatio,
    ShapSumOpp,
    ShapAvgOpp,
    ShapMaxOpp,
    ShapMinOpp,
    ShapRatioOpp,
}

impl Feature {
    pub const ALL: [Feature; 13] = [
        Feature::Count,
        Feature::CountTotal,
        Feature::CountOpp,
        Feature::ShapSum,
        Feature::ShapAvg,
        Feature::ShapMax,
        Feature::ShapMin,
        Feature::ShapRatio,
        Feature::ShapSumOpp,
        Feature::ShapAvgOpp,
        Feature::ShapMaxOpp,
        Feature::ShapMinOpp,
        Feature::ShapRatioOpp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::Count => "count",
            Feature::CountTotal => "count_total",
            Feature::CountOpp => "count_opp",
            Feature::ShapSum => "shap_sum",
            Feature::ShapAvg => "shap_avg",
            Feature::ShapMax => "shap_max",
            Feature::ShapMin => "shap_min",
            Feature::ShapRatio => "shap_ratio",
            Feature::ShapSumOpp => "shap_sum_opp",
            Feature::ShapAvgOpp => "shap_avg_opp",
            Feature::ShapMaxOpp => "shap_max_opp",
            Feature::ShapMinOpp => "shap_min_opp",
            Feature::ShapRatioOpp => "shap_ratio_opp",
        }
    }
}

/// The 13 numeric features of one lexicon group, indexed by [`Feature`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Features([f64; 13]);

impl Features {
    pub fn zero() -> Self {
        Features::default()
    }

    pub fn from_entry(e: &LexiconEntry) -> Self {
        let mut f = Features::zero();
        f[Feature::Count] = e.count as f64;
        f[Feature::CountTotal] = e.count_total as f64;
        f[Feature::CountOpp] = e.count_opp as f64;
        f[Feature::ShapSum] = e.shap_sum;
        f[Feature::ShapAvg] = e.shap_avg;
        f[Feature::ShapMax] = e.shap_max;
        f[Feature::ShapMin] = e.shap_min;
        f[Feature::ShapRatio] = e.shap_ratio;
        f[Feature::ShapSumOpp] = e.shap_sum_opp;
        f[Feature::ShapAvgOpp] = e.shap_avg_opp;
        f[Feature::ShapMaxOpp] = e.shap_max_opp;
        f[Feature::ShapMinOpp] = e.shap_min_opp;
        f[Feature::ShapRatioOpp] = e.shap_ratio_opp;
        f
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }
}

impl Index<Feature> for Features {
    type Output = f64;

    fn index(&self, f: Feature) -> &f64 {
        &self.0[f as usize]
    }
}

impl IndexMut<Feature> for Features {
    fn index_mut(&mut self, f: Feature) -> &mut f64 {
        &mut self.0[f as usize]
    }
}

/// One prefixed feature group of a combined row. `category == None` is the
/// `none` category of a word missing from that lexicon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LexiconGroup {
    pub category: Option<Category>,
    pub src: Source,
    pub values: Features,
}

impl LexiconGroup {
    fn present(entry: &LexiconEntry, src: Source) -> Self {
        LexiconGroup {
            category: Some(entry.category),
            src,
            values: Features::from_entry(entry),
        }
    }

    fn missing(src: Source) -> Self {
        LexiconGroup {
            category: None,
            src,
            values: Features::zero(),
        }
    }

    fn to_entry(self, word: &str) -> Option<LexiconEntry> {
        let category = self.category?;
        let v = &self.values;
        Some(LexiconEntry {
            word: word.to_owned(),
            category,
            count: v[Feature::Count] as u64,
            shap_sum: v[Feature::ShapSum],
            shap_avg: v[Feature::ShapAvg],
            shap_max: v[Feature::ShapMax],
            shap_min: v[Feature::ShapMin],
            count_opp: v[Feature::CountOpp] as u64,
            shap_sum_opp: v[Feature::ShapSumOpp],
            shap_avg_opp: v[Feature::ShapAvgOpp],
            shap_max_opp: v[Feature::ShapMaxOpp],
            shap_min_opp: v[Feature::ShapMinOpp],
            count_total: v[Feature::CountTotal] as u64,
            shap_ratio: v[Feature::ShapRatio],
            shap_ratio_opp: v[Feature::ShapRatioOpp],
            src: self.src,
        })
    }
}

/// Which feature group of a combined row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    XLex,
    Lm,
}

impl Side {
    pub fn prefix(self) -> &'static str {
        match self {
            Side::XLex => "xlex",
            Side::Lm => "lm",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CombinedEntry {
    pub word: String,
    pub xlex: LexiconGroup,
    pub lm: LexiconGroup,
}

impl CombinedEntry {
    pub fn group(&self, side: Side) -> &LexiconGroup {
        match side {
            Side::XLex => &self.xlex,
            Side::Lm => &self.lm,
        }
    }

    fn group_mut(&mut self, side: Side) -> &mut LexiconGroup {
        match side {
            Side::XLex => &mut self.xlex,
            Side::Lm => &mut self.lm,
        }
    }
}

/// Sidecar written next to a combined lexicon file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexiconMeta {
    pub format_version: u32,
    pub normalized: bool,
    pub source: String,
    /// Unix seconds.
    pub built_at: u64,
    pub words: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CombinedLexicon {
    entries: BTreeMap<String, CombinedEntry>,
    normalized: bool,
}

impl CombinedLexicon {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn get(&self, word: &str) -> Option<&CombinedEntry> {
        self.entries.get(word)
    }

    pub fn iter(&self) -> impl Iterator<Item = &CombinedEntry> {
        self.entries.values()
    }

    /// Column maximum of `feature` within one group.
    pub fn column_max(&self, side: Side, feature: Feature) -> f64 {
        self.iter()
            .map(|e| e.group(side).values[feature])
            .fold(0.0, f64::max)
    }

    /// Recovers the XLex lexicon by dropping rows whose XLex category is `none`.
    pub fn project_xlex(&self) -> Result<Lexicon> {
        self.project(Side::XLex)
    }

    pub fn project_lm(&self) -> Result<Lexicon> {
        self.project(Side::Lm)
    }

    fn project(&self, side: Side) -> Result<Lexicon> {
        if self.normalized {
            return Err(Error::Normalized);
        }
        Lexicon::from_entries(self.iter().filter_map(|e| e.group(side).to_entry(&e.word)))
    }

    pub fn header() -> Vec<String> {
        let mut h = vec!["word".to_owned()];
        for side in [Side::XLex, Side::Lm] {
            let p = side.prefix();
            for (i, f) in Feature::ALL.iter().enumerate() {
                h.push(format!("{p}_{}", f.name()));
                // category sits after the three count columns
                if i == 2 {
                    h.push(format!("{p}_category"));
                }
            }
            h.push(format!("{p}_src"));
        }
        h
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(Self::header())?;
        let mut row: Vec<String> = Vec::with_capacity(31);
        for e in self.iter() {
            row.clear();
            row.push(e.word.clone());
            for side in [Side::XLex, Side::Lm] {
                let g = e.group(side);
                for (i, f) in Feature::ALL.iter().enumerate() {
                    row.push(real(g.values[*f]));
                    if i == 2 {
                        row.push(g.category.map_or("none", Category::as_str).to_owned());
                    }
                }
                row.push(g.src.to_string());
            }
            w.write_record(&row)?;
        }
        w.flush().map_err(|e| Error::io("<lexicon writer>", e))?;
        Ok(())
    }

    /// Reads a combined CSV. The normalized flag cannot be recovered from the
    /// CSV itself; pass it from the sidecar (see [`CombinedLexicon::read_path`]).
    pub fn read_csv<R: Read>(reader: R, normalized: bool) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let header = Self::header();
        if rdr.headers()?.iter().ne(header.iter().map(String::as_str)) {
            return Err(Error::malformed(1, "unexpected combined lexicon header"));
        }
        let mut entries = BTreeMap::new();
        for row in rdr.records() {
            let row = row?;
            let line = row.position().map_or(0, |p| p.line());
            if row.len() != header.len() {
                return Err(Error::malformed(line, "wrong number of fields"));
            }
            let mut col = 1;
            let mut groups = Vec::with_capacity(2);
            for _ in 0..2 {
                let mut values = Features::zero();
                let mut category = None;
                for (i, f) in Feature::ALL.iter().enumerate() {
                    values[*f] = parse_real(&row[col], line, &header[col])?;
                    col += 1;
                    if i == 2 {
                        category = match &row[col] {
                            "none" => None,
                            s => Some(s.parse().map_err(|m| Error::malformed(line, m))?),
                        };
                        col += 1;
                    }
                }
                let src = row[col].parse().map_err(|m| Error::malformed(line, m))?;
                col += 1;
                groups.push(LexiconGroup { category, src, values });
            }
            let word = row[0].to_owned();
            let entry = CombinedEntry {
                word: word.clone(),
                xlex: groups[0],
                lm: groups[1],
            };
            if entries.insert(word.clone(), entry).is_some() {
                return Err(Error::DuplicateWord(word));
            }
        }
        Ok(CombinedLexicon { entries, normalized })
    }

    /// Writes the CSV plus its `<path>.meta.json` sidecar.
    pub fn write_path(&self, path: impl AsRef<Path>, source: &str) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(file))?;
        let meta = LexiconMeta {
            format_version: LEXICON_FORMAT_VERSION,
            normalized: self.normalized,
            source: source.to_owned(),
            built_at: build_timestamp(),
            words: self.len(),
        };
        let meta_path = meta_path(path);
        let json = serde_json::to_string_pretty(&meta)?;
        fs::write(&meta_path, json + "\n").map_err(|e| Error::io(meta_path, e))
    }

    /// Reads a combined CSV and its sidecar, if present. Without a sidecar the
    /// lexicon is treated as normalized when the file name ends in `.norm.csv`.
    pub fn read_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let normalized = match read_meta(path)? {
            Some(meta) => meta.normalized,
            None => path.to_string_lossy().ends_with(".norm.csv"),
        };
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read_csv(std::io::BufReader::new(file), normalized)
    }
}

/// `SOURCE_DATE_EPOCH` when set, else the current time.
fn build_timestamp() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or_else(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs())
        })
}

pub fn meta_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

pub fn read_meta(path: &Path) -> Result<Option<LexiconMeta>> {
    let meta_path = meta_path(path);
    match fs::read_to_string(&meta_path) {
        Ok(text) => Ok(Some(serde_json::from_str(&text)?)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(Error::io(meta_path, e)),
    }
}

/// Turns raw LM positive/negative word lists into lexicon entries with the
/// default feature values.
pub fn prepare_lm<P, N>(pos_words: P, neg_words: N, res: &LanguageResources) -> Result<Lexicon>
where
    P: IntoIterator,
    P::Item: AsRef<str>,
    N: IntoIterator,
    N::Item: AsRef<str>,
{
    let mut seen: HashMap<String, Category> = HashMap::new();
    let mut entries = Vec::new();
    let lists = pos_words
        .into_iter()
        .map(|w| (w.as_ref().to_owned(), Category::Positive))
        .chain(neg_words.into_iter().map(|w| (w.as_ref().to_owned(), Category::Negative)));
    for (raw, category) in lists {
        let lower = raw.trim().to_lowercase();
        if lower.is_empty() {
            continue;
        }
        let lemma = res.lemmatize(&lower).to_owned();
        match seen.get(&lemma) {
            Some(&c) if c == category => continue,
            Some(_) => return Err(Error::DuplicateAcrossPolarity { word: lemma }),
            None => {}
        }
        seen.insert(lemma.clone(), category);
        entries.push(lm_entry(lemma, category));
    }
    Lexicon::from_entries(entries)
}

fn lm_entry(word: String, category: Category) -> LexiconEntry {
    LexiconEntry {
        word,
        category,
        count: 1,
        shap_sum: 1.0,
        shap_avg: 1.0,
        shap_max: 1.0,
        shap_min: 1.0,
        count_opp: 0,
        shap_sum_opp: 0.0,
        shap_avg_opp: 0.0,
        shap_max_opp: 0.0,
        shap_min_opp: 0.0,
        count_total: 1,
        shap_ratio: 1.0,
        shap_ratio_opp: 0.0,
        src: Source::LM,
    }
}

/// Reads an LM word list: one word per line, `#` comments and blanks skipped.
pub fn read_word_list(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_owned)
        .collect())
}

/// Outer join of the two lexicons on the word.
pub fn combine(xlex: &Lexicon, lm: &Lexicon) -> CombinedLexicon {
    let mut entries: BTreeMap<String, CombinedEntry> = BTreeMap::new();
    for e in xlex {
        entries.insert(
            e.word.clone(),
            CombinedEntry {
                word: e.word.clone(),
                xlex: LexiconGroup::present(e, Source::XLex),
                lm: LexiconGroup::missing(Source::XLex),
            },
        );
    }
    for e in lm {
        let row = entries.entry(e.word.clone()).or_insert_with(|| CombinedEntry {
            word: e.word.clone(),
            xlex: LexiconGroup::missing(Source::LM),
            lm: LexiconGroup::missing(Source::LM),
        });
        row.lm = LexiconGroup::present(e, Source::LM);
    }
    CombinedLexicon {
        entries,
        normalized: false,
    }
}

/// Divides every numeric column by its maximum; all-zero columns stay zero.
pub fn normalize(lexicon: &CombinedLexicon) -> Result<CombinedLexicon> {
    if lexicon.normalized {
        return Err(Error::AlreadyNormalized);
    }
    let mut out = lexicon.clone();
    for side in [Side::XLex, Side::Lm] {
        for f in Feature::ALL {
            let max = lexicon.column_max(side, f);
            if max > 0.0 {
                for e in out.entries.values_mut() {
                    e.group_mut(side).values[f] /= max;
                }
            }
        }
    }
    out.normalized = true;
    Ok(out)
}

/// Divides a column by its maximum in place; all-zero columns are unchanged.
pub fn scale_by_max(column: &mut [f64]) {
    let max = column.iter().copied().fold(0.0, f64::max);
    if max > 0.0 {
        column.iter_mut().for_each(|v| *v /= max);
    }
}
