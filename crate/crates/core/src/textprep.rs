//! Tweet records and text normalization.

use std::collections::HashSet;
use std::fmt;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use unicode_normalization::UnicodeNormalization;

static URL_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)(?:\b(?:https?|ftp)://|\bwww\.)\S*").unwrap());
static MENTION_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"@[A-Za-z0-9_]+").unwrap());

const DEFAULT_STOPWORDS_EN: &str = include_str!("../data/stopwords_en.txt");

/// Language of a record. Anything other than `en`/`ja` is carried through
/// verbatim and skipped by the scoring stage.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Lang {
    En,
    Ja,
    Other(String),
}

impl Lang {
    pub fn as_str(&self) -> &str {
        match self {
            Lang::En => "en",
            Lang::Ja => "ja",
            Lang::Other(s) => s,
        }
    }

    pub fn parse(s: &str) -> Lang {
        match s {
            "en" => Lang::En,
            "ja" => Lang::Ja,
            other => Lang::Other(other.to_string()),
        }
    }

    pub fn is_known(&self) -> bool {
        !matches!(self, Lang::Other(_))
    }
}

impl fmt::Display for Lang {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Lang {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Lang {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(Lang::parse(&s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub id: String,
    pub user_id: String,
    pub text: String,
    pub lang: Lang,
    pub timestamp: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retweet_of_user_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retweet_of_tweet_id: Option<String>,
}

impl TweetRecord {
    pub fn validate(&self) -> Result<(), String> {
        if self.id.is_empty() {
            return Err("empty id".into());
        }
        if self.user_id.is_empty() {
            return Err(format!("tweet {}: empty user_id", self.id));
        }
        if self.retweet_of_user_id.is_some() != self.retweet_of_tweet_id.is_some() {
            return Err(format!(
                "tweet {}: retweet_of_user_id and retweet_of_tweet_id must both be present or both absent",
                self.id
            ));
        }
        Ok(())
    }
}

/// A set of stop words, stored lowercased and NFKC-normalized.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    /// One word per line; blank lines ignored.
    pub fn parse(text: &str) -> Self {
        Self(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(|l| l.nfkc().collect::<String>().to_lowercase())
                .collect(),
        )
    }

    pub fn english_default() -> Self {
        Self::parse(DEFAULT_STOPWORDS_EN)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: Into<String>> FromIterator<S> for Stopwords {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Self(iter.into_iter().map(|s| s.into().to_lowercase()).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CleanBody {
    /// English path: lowercased, stop-word-free tokens.
    Tokens(Vec<String>),
    /// Japanese path: normalized, unsegmented text.
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CleanText {
    pub original_id: String,
    pub body: CleanBody,
}

impl CleanText {
    pub fn is_empty(&self) -> bool {
        match &self.body {
            CleanBody::Tokens(t) => t.is_empty(),
            CleanBody::Text(t) => t.is_empty(),
        }
    }
}

fn strip_links_and_mentions(text: &str) -> String {
    let nfkc: String = text.nfkc().collect();
    let no_urls = URL_RE.replace_all(&nfkc, " ");
    MENTION_RE.replace_all(&no_urls, " ").into_owned()
}

/// English tokenizer without stop-word removal: NFKC, URL and mention
/// removal, lowercasing, apostrophes joined, every other
/// non-alphanumeric character treated as a separator.
pub fn tokenize_en(text: &str) -> Vec<String> {
    let cleaned = strip_links_and_mentions(text).to_lowercase();
    let mut buf = String::with_capacity(cleaned.len());
    for ch in cleaned.chars() {
        match ch {
            '\'' | '\u{2019}' | '\u{2018}' => {}
            c if c.is_alphanumeric() => buf.push(c),
            _ => buf.push(' '),
        }
    }
    buf.split_whitespace().map(str::to_string).collect()
}

/// Japanese normalization: NFKC, URLs, mentions, `#`, ASCII punctuation and
/// control characters removed, whitespace runs collapsed.
pub fn normalize_ja(text: &str) -> String {
    let cleaned = strip_links_and_mentions(text);
    let kept: String = cleaned
        .chars()
        .filter(|c| (!c.is_ascii_punctuation() && !c.is_control()) || c.is_whitespace())
        .collect();
    kept.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Japanese text for the valence scorer: like [`normalize_ja`] but sentence
/// punctuation is kept so the text can still be split into sentences.
pub fn valence_text_ja(text: &str) -> String {
    let cleaned = strip_links_and_mentions(text);
    let kept: String = cleaned
        .chars()
        .filter(|&c| c != '#' && (!c.is_control() || c.is_whitespace()))
        .collect();
    kept.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Normalizes a record for dictionary matching. Records in an unknown
/// language are treated like English.
pub fn preprocess(rec: &TweetRecord, stopwords: &Stopwords) -> CleanText {
    let body = match rec.lang {
        Lang::Ja => CleanBody::Text(normalize_ja(&rec.text)),
        _ => CleanBody::Tokens(
            tokenize_en(&rec.text)
                .into_iter()
                .filter(|t| !stopwords.contains(t))
                .collect(),
        ),
    };
    CleanText {
        original_id: rec.id.clone(),
        body,
    }
}

/// True iff any keyword occurs in the text (case-insensitively for
/// non-Japanese records).
pub fn keyword_filter<S: AsRef<str>>(rec: &TweetRecord, keywords: &[S]) -> bool {
    match rec.lang {
        Lang::Ja => keywords.iter().any(|k| rec.text.contains(k.as_ref())),
        _ => {
            let lower = rec.text.to_lowercase();
            keywords.iter().any(|k| lower.contains(&k.as_ref().to_lowercase()))
        }
    }
}
