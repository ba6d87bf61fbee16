//! Tokenization, lemmatization and word validity checks.
//!
//! The same rule-based tokenizer is used when building lexicons and when
//! scoring sentences. Lemmatization is a plain lookup table; words without an
//! entry are their own lemma.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

const BUNDLED_LEMMAS: &str = include_str!("../resources/lemmas.tsv");
const BUNDLED_ENGLISH: &str = include_str!("../resources/english.txt");
const BUNDLED_STOPWORDS: &str = include_str!("../resources/stopwords.txt");

pub const LEMMAS_FILE: &str = "lemmas.tsv";
pub const ENGLISH_FILE: &str = "english.txt";
pub const STOPWORDS_FILE: &str = "stopwords.txt";

/// Shortest word length kept by [`LanguageResources::is_valid_word`].
pub const MIN_WORD_LEN: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub lower: String,
}

impl Token {
    fn new(surface: &str) -> Self {
        Token {
            surface: surface.to_owned(),
            lower: surface.to_lowercase(),
        }
    }
}

/// Splits on whitespace and trims every piece down to its first and last
/// alphanumeric character, so internal hyphens and apostrophes survive.
pub fn split_words(text: &str) -> impl Iterator<Item = &str> {
    text.split_whitespace()
        .map(|w| w.trim_matches(|c: char| !c.is_alphanumeric()))
        .filter(|w| !w.is_empty())
}

pub fn tokenize(text: &str) -> Vec<Token> {
    split_words(text).map(Token::new).collect()
}

/// Lemma table, English dictionary and stopword list.
#[derive(Debug, Clone, Default)]
pub struct LanguageResources {
    lemma_map: HashMap<String, String>,
    english_words: HashSet<String>,
    stopwords: HashSet<String>,
}

impl LanguageResources {
    /// Builds resources from already-split entries. Everything is lowercased;
    /// identity lemma entries are dropped. Fails if some lemma is itself mapped
    /// to a different word.
    pub fn new<L, E, S>(lemmas: L, english_words: E, stopwords: S) -> Result<Self>
    where
        L: IntoIterator<Item = (String, String)>,
        E: IntoIterator<Item = String>,
        S: IntoIterator<Item = String>,
    {
        let lemma_map: HashMap<String, String> = lemmas
            .into_iter()
            .map(|(w, l)| (w.to_lowercase(), l.to_lowercase()))
            .filter(|(w, l)| w != l)
            .collect();
        for (word, lemma) in &lemma_map {
            if let Some(next) = lemma_map.get(lemma) {
                return Err(Error::InvalidResource(format!(
                    "lemma `{lemma}` of `{word}` is not a fixed point (maps to `{next}`)"
                )));
            }
        }
        Ok(LanguageResources {
            lemma_map,
            english_words: english_words.into_iter().map(|w| w.to_lowercase()).collect(),
            stopwords: stopwords.into_iter().map(|w| w.to_lowercase()).collect(),
        })
    }

    /// Parses the three resource file formats from strings.
    pub fn from_strs(lemmas: &str, english_words: &str, stopwords: &str) -> Result<Self> {
        Self::new(parse_lemmas(lemmas)?, parse_word_list(english_words), parse_word_list(stopwords))
    }

    /// Loads `lemmas.tsv`, `english.txt` and `stopwords.txt` from `dir`.
    pub fn from_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let read = |name: &str| {
            let path = dir.join(name);
            fs::read_to_string(&path).map_err(|e| Error::io(path, e))
        };
        Self::from_strs(&read(LEMMAS_FILE)?, &read(ENGLISH_FILE)?, &read(STOPWORDS_FILE)?)
    }

    /// Resources compiled into the binary, parsed once per process.
    pub fn bundled() -> &'static Self {
        static BUNDLED: std::sync::OnceLock<LanguageResources> = std::sync::OnceLock::new();
        BUNDLED.get_or_init(|| {
            Self::from_strs(BUNDLED_LEMMAS, BUNDLED_ENGLISH, BUNDLED_STOPWORDS)
                .expect("bundled resources are well-formed")
        })
    }

    pub fn lemmatize<'a>(&'a self, word: &'a str) -> &'a str {
        self.lemma_map.get(word).map_or(word, String::as_str)
    }

    pub fn is_valid_word(&self, word: &str) -> bool {
        word.chars().count() >= MIN_WORD_LEN
            && self.english_words.contains(word)
            && !self.stopwords.contains(word)
    }

    pub fn is_english(&self, word: &str) -> bool {
        self.english_words.contains(word)
    }

    pub fn is_stopword(&self, word: &str) -> bool {
        self.stopwords.contains(word)
    }

    pub fn lemma_entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.lemma_map.iter().map(|(w, l)| (w.as_str(), l.as_str()))
    }

    pub fn english_words(&self) -> impl Iterator<Item = &str> {
        self.english_words.iter().map(String::as_str)
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_word_list(text: &str) -> Vec<String> {
    content_lines(text).map(|(_, l)| l.to_owned()).collect()
}

fn parse_lemmas(text: &str) -> Result<Vec<(String, String)>> {
    content_lines(text)
        .map(|(n, line)| match line.split_once('\t') {
            Some((w, l)) if !w.trim().is_empty() && !l.trim().is_empty() => {
                Ok((w.trim().to_owned(), l.trim().to_owned()))
            }
            _ => Err(Error::InvalidResource(format!(
                "lemma file line {n}: expected `surface<TAB>lemma`"
            ))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn surfaces(text: &str) -> Vec<String> {
        tokenize(text).into_iter().map(|t| t.surface).collect()
    }

    #[test]
    fn tokenize_strips_punctuation() {
        assert_eq!(surfaces("Profit rose 22%."), ["Profit", "rose", "22"]);
        assert!(tokenize("").is_empty());
        assert_eq!(surfaces("state-of-the-art"), ["state-of-the-art"]);
        assert_eq!(surfaces("'company's' (net) -- ..."), ["company's", "net"]);
    }

    #[test]
    fn token_lower_matches_surface() {
        let t = &tokenize("ÉTÉ Gain")[0];
        assert_eq!(t.lower, "été");
    }

    #[test]
    fn bundled_lemmas() {
        let res = LanguageResources::bundled();
        assert_eq!(res.lemmatize("acquired"), "acquire");
        assert_eq!(res.lemmatize("acquiring"), "acquire");
        assert_eq!(res.lemmatize("acquire"), "acquire");
        assert_eq!(res.lemmatize("zzzxq"), "zzzxq");
        for (_, lemma) in res.lemma_entries() {
            assert_eq!(res.lemmatize(lemma), lemma);
        }
    }

    #[test]
    fn bundled_validity() {
        let res = LanguageResources::bundled();
        assert!(!res.is_valid_word("of"));
        assert!(res.is_valid_word("profit"));
        assert!(!res.is_valid_word("the"));
        assert!(!res.is_valid_word("22"));
    }

    #[test]
    fn non_fixed_point_lemma_rejected() {
        let err = LanguageResources::from_strs("a\tb\nb\tc\n", "", "").unwrap_err();
        assert!(matches!(err, Error::InvalidResource(_)));
    }

    #[test]
    fn malformed_lemma_line() {
        let err = LanguageResources::from_strs("# header\nonlyone\n", "", "").unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn comments_ignored() {
        let res = LanguageResources::from_strs("", "# c\nprofit\n", "#x\nthe\n").unwrap();
        assert!(res.is_english("profit"));
        assert!(!res.is_english("# c"));
        assert!(res.is_stopword("the"));
    }

    proptest! {
        #[test]
        fn lemmatize_idempotent(w in "[a-z]{1,12}") {
            let res = LanguageResources::bundled();
            let once = res.lemmatize(&w).to_owned();
            prop_assert_eq!(res.lemmatize(&once), once.as_str());
        }

        #[test]
        fn tokenize_concat(a in "[^\\s]{0,10}", b in "[^\\s]{0,10}") {
            let joined = tokenize(&format!("{a} {b}"));
            let mut parts = tokenize(&a);
            parts.extend(tokenize(&b));
            prop_assert_eq!(joined, parts);
        }

        #[test]
        fn valid_words_are_long(w in "[a-z]{0,6}") {
            let res = LanguageResources::bundled();
            if res.is_valid_word(&w) {
                prop_assert!(w.len() >= MIN_WORD_LEN);
            }
        }
    }
}
