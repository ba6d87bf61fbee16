#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use xlex::lexicon::{Category, LexiconEntry, Source};
use xlex::textprep::LanguageResources;
use xlex::AttributionRecord;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// `k / 1024` for `k` in `1..=1024`. Sums of a few thousand of these are
/// exact in `f64`, so results can be compared bit for bit.
pub fn dyadic(rng: &mut impl Rng) -> f64 {
    rng.gen_range(1..=1024) as f64 / 1024.0
}

/// Groups of surface forms sharing a lemma, drawn from the bundled tables,
/// plus tokens that the validity filter must reject.
pub struct Vocabulary {
    pub families: Vec<Vec<String>>,
    pub invalid: Vec<String>,
}

impl Vocabulary {
    pub fn from_resources(res: &LanguageResources) -> Self {
        let mut by_lemma: BTreeMap<&str, Vec<String>> = BTreeMap::new();
        for (surface, lemma) in res.lemma_entries() {
            by_lemma.entry(lemma).or_default().push(surface.to_owned());
        }
        let mut families: Vec<Vec<String>> = by_lemma
            .into_iter()
            .map(|(lemma, mut surfaces)| {
                surfaces.sort();
                surfaces.insert(0, lemma.to_owned());
                surfaces
            })
            .collect();
        let lemmas: std::collections::HashSet<&str> = families.iter().map(|f| f[0].as_str()).collect();
        let mut singles: Vec<&str> = res
            .english_words()
            .filter(|w| res.lemmatize(w) == *w && w.len() >= 3 && !lemmas.contains(w))
            .collect();
        singles.sort_unstable();
        families.extend(singles.into_iter().step_by(7).take(3000).map(|w| vec![w.to_owned()]));
        let invalid = ["the", "of", "and", "qx", "a", "zzkvq", "12", "its", "be", "xyzzyq"]
            .map(String::from)
            .to_vec();
        Vocabulary { families, invalid }
    }

    /// Random attribution records over at most `max_lemmas` families.
    pub fn records(&self, rng: &mut impl Rng, max_records: usize, max_lemmas: usize) -> Vec<AttributionRecord> {
        let n_lemmas = rng.gen_range(1..=max_lemmas);
        let mut pool: Vec<&Vec<String>> = self.families.choose_multiple(rng, n_lemmas).collect();
        let n_invalid = rng.gen_range(0..=3.min(n_lemmas));
        pool.truncate(n_lemmas - n_invalid);
        let invalid: Vec<Vec<String>> = self.invalid.choose_multiple(rng, n_invalid).map(|w| vec![w.clone()]).collect();
        pool.extend(invalid.iter());

        let n = rng.gen_range(1..=max_records);
        let mut sentence_id = 0;
        (0..n)
            .map(|_| {
                if rng.gen_bool(0.1) {
                    sentence_id += 1;
                }
                let family = pool.choose(rng).unwrap();
                let mut token = family.choose(rng).unwrap().clone();
                if rng.gen_bool(0.2) {
                    token = capitalize(&token);
                }
                let value = match rng.gen_range(0..20) {
                    0 => 0.0,
                    1..=9 => dyadic(rng),
                    _ => -dyadic(rng),
                };
                AttributionRecord { sentence_id, token, value }
            })
            .collect()
    }
}

pub fn capitalize(w: &str) -> String {
    let mut c = w.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

pub fn to_csv(records: &[AttributionRecord]) -> String {
    let mut s = String::from("sentence_id,token,value\n");
    for r in records {
        s.push_str(&format!("{},{},{}\n", r.sentence_id, r.token, r.value));
    }
    s
}

struct Group {
    count: u64,
    sum: f64,
    max: f64,
    min: f64,
}

impl Group {
    fn avg(&self) -> f64 {
        self.sum / self.count as f64
    }
}

/// Brute-force XLex build straight from the records: filter each occurrence,
/// group by (lemma, sign), then apply the selection and ratio formulas.
pub fn oracle_xlex(records: &[AttributionRecord], res: &LanguageResources) -> Vec<LexiconEntry> {
    let mut groups: BTreeMap<String, [Option<Group>; 2]> = BTreeMap::new();
    for r in records {
        if r.value == 0.0 {
            continue;
        }
        let w = r.token.to_lowercase();
        if w.chars().count() < 3 || !res.is_english(&w) || res.is_stopword(&w) {
            continue;
        }
        let side = usize::from(r.value < 0.0);
        let v = r.value.abs();
        let slot = &mut groups.entry(res.lemmatize(&w).to_owned()).or_default()[side];
        match slot {
            None => *slot = Some(Group { count: 1, sum: v, max: v, min: v }),
            Some(g) => {
                g.count += 1;
                g.sum += v;
                g.max = g.max.max(v);
                g.min = g.min.min(v);
            }
        }
    }

    let mut out = Vec::new();
    for (word, [pos, neg]) in groups {
        let (sel, opp, category) = match (pos, neg) {
            (Some(p), None) => (p, None, Category::Positive),
            (None, Some(n)) => (n, None, Category::Negative),
            (Some(p), Some(n)) if p.sum > n.sum => (p, Some(n), Category::Positive),
            (Some(p), Some(n)) => (n, Some(p), Category::Negative),
            (None, None) => unreachable!(),
        };
        let zero = Group { count: 0, sum: 0.0, max: 0.0, min: 0.0 };
        let has_opp = opp.is_some();
        let opp = opp.unwrap_or(zero);
        let opp_avg = if has_opp { opp.avg() } else { 0.0 };
        let ratio = if has_opp { sel.avg() / (sel.avg() + opp_avg) } else { 1.0 };
        out.push(LexiconEntry {
            word,
            category,
            count: sel.count,
            shap_sum: sel.sum,
            shap_avg: sel.avg(),
            shap_max: sel.max,
            shap_min: sel.min,
            count_opp: opp.count,
            shap_sum_opp: opp.sum,
            shap_avg_opp: opp_avg,
            shap_max_opp: opp.max,
            shap_min_opp: opp.min,
            count_total: sel.count + opp.count,
            shap_ratio: ratio,
            shap_ratio_opp: 1.0 - ratio,
            src: Source::XLex,
        });
    }
    out
}

/// Lexicon entry with dyadic feature values; `with_opp` adds opposite stats.
pub fn dyadic_entry(rng: &mut impl Rng, word: &str, category: Category, with_opp: bool) -> LexiconEntry {
    let stats = |rng: &mut _| [dyadic(rng) * 8.0, dyadic(rng), dyadic(rng), dyadic(rng) / 4.0];
    let sel = stats(rng);
    let opp = if with_opp { stats(rng) } else { [0.0; 4] };
    let count = rng.gen_range(1..=40);
    let count_opp = if with_opp { rng.gen_range(1..=40) } else { 0 };
    let ratio = if with_opp { rng.gen_range(1..1024) as f64 / 1024.0 } else { 1.0 };
    LexiconEntry {
        word: word.to_owned(),
        category,
        count,
        shap_sum: sel[0],
        shap_avg: sel[1],
        shap_max: sel[2],
        shap_min: sel[3],
        count_opp,
        shap_sum_opp: opp[0],
        shap_avg_opp: opp[1],
        shap_max_opp: opp[2],
        shap_min_opp: opp[3],
        count_total: count + count_opp,
        shap_ratio: ratio,
        shap_ratio_opp: 1.0 - ratio,
        src: Source::XLex,
    }
}

/// LM-style entry: selected features 1, opposite features 0.
pub fn lm_entry(word: &str, category: Category) -> LexiconEntry {
    LexiconEntry {
        word: word.to_owned(),
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

/// Synthetic lowercase words that are their own lemma under any resources.
pub fn synthetic_words(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("w{i:05}x")).collect()
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    a == b || (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}
