//! Rule-based emotional valence for English tokens and Japanese text.
//!
//! The English scorer is a reduced VADER-style rule set (negation window,
//! intensity boosters, `s / sqrt(s^2 + alpha)` normalization). The Japanese
//! scorer follows the polar-dictionary approach: per-sentence ratio of
//! positive to negative hits, averaged over sentences.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::trie::Trie;

const DEFAULT_VALENCE_EN: &str = include_str!("../data/valence_en.tsv");
const DEFAULT_POLAR_JA: &str = include_str!("../data/polar_ja.tsv");

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {reason}")]
pub struct ValenceLexiconError {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValenceLexiconEntry {
    pub surface: String,
    /// Signed intensity; zero for boosters.
    pub polarity: f64,
    pub is_booster: bool,
    /// Intensity added toward the sign of a nearby polar word; zero for
    /// polar entries.
    pub booster_delta: f64,
}

#[derive(Debug, Clone)]
pub struct ValenceLexicon {
    entries: Vec<ValenceLexiconEntry>,
    index: HashMap<String, usize>,
    trie: Trie,
}

impl ValenceLexicon {
    /// Parses `surface<TAB>polarity` and `surface<TAB>BOOST<TAB>delta` lines.
    /// Blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self, ValenceLexiconError> {
        let mut entries = Vec::new();
        let mut seen: HashMap<String, usize> = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').map(str::trim).collect();
            let err = |reason: String| ValenceLexiconError { line, reason };
            let entry = match fields.as_slice() {
                [surface, "BOOST", delta] => ValenceLexiconEntry {
                    surface: surface.to_lowercase(),
                    polarity: 0.0,
                    is_booster: true,
                    booster_delta: delta.parse().map_err(|_| err(format!("bad booster delta `{delta}`")))?,
                },
                [surface, polarity] => ValenceLexiconEntry {
                    surface: surface.to_lowercase(),
                    polarity: polarity
                        .parse()
                        .map_err(|_| err(format!("bad polarity `{polarity}`")))?,
                    is_booster: false,
                    booster_delta: 0.0,
                },
                _ => return Err(err(format!("expected 2 or 3 tab-separated fields: `{trimmed}`"))),
            };
            if entry.surface.is_empty() {
                return Err(err("empty surface".into()));
            }
            if !entry.polarity.is_finite() || !entry.booster_delta.is_finite() {
                return Err(err("non-finite value".into()));
            }
            if let Some(first) = seen.insert(entry.surface.clone(), line) {
                return Err(err(format!(
                    "duplicate entry `{}` (first on line {first})",
                    entry.surface
                )));
            }
            entries.push(entry);
        }
        Ok(Self::from_entries(entries))
    }

    pub fn from_entries(entries: Vec<ValenceLexiconEntry>) -> Self {
        let mut index = HashMap::with_capacity(entries.len());
        let mut trie = Trie::default();
        for (i, e) in entries.iter().enumerate() {
            index.insert(e.surface.clone(), i);
            if !e.is_booster {
                trie.insert(&e.surface, false, i as u32);
            }
        }
        Self { entries, index, trie }
    }

    pub fn english_default() -> Self {
        Self::parse(DEFAULT_VALENCE_EN).expect("bundled English valence lexicon parses")
    }

    pub fn japanese_default() -> Self {
        Self::parse(DEFAULT_POLAR_JA).expect("bundled Japanese polar dictionary parses")
    }

    pub fn get(&self, surface: &str) -> Option<&ValenceLexiconEntry> {
        self.index.get(surface).map(|&i| &self.entries[i])
    }

    pub fn entries(&self) -> &[ValenceLexiconEntry] {
        &self.entries
    }

    /// Copy of the lexicon with every polarity negated.
    pub fn negated(&self) -> Self {
        Self::from_entries(
            self.entries
                .iter()
                .map(|e| ValenceLexiconEntry {
                    polarity: -e.polarity,
                    ..e.clone()
                })
                .collect(),
        )
    }
}

/// Tunable constants of the valence rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValenceConfig {
    /// Factor applied to a polar word preceded by a negator.
    pub negation_scalar: f64,
    /// How many preceding tokens are inspected for negators and boosters.
    pub window: usize,
    /// Normalization constant in `s / sqrt(s^2 + alpha)`.
    pub alpha: f64,
    pub negators: Vec<String>,
    /// Japanese suffixes that flip the polarity of the term they follow.
    pub ja_negation_suffixes: Vec<String>,
}

impl Default for ValenceConfig {
    fn default() -> Self {
        let negators = [
            "not", "no", "never", "none", "nobody", "nothing", "neither", "nor", "nowhere", "cannot", "cant", "dont",
            "doesnt", "didnt", "isnt", "arent", "wasnt", "werent", "wont", "wouldnt", "shouldnt", "couldnt", "hasnt",
            "havent", "hadnt", "aint", "without", "rarely", "seldom",
        ];
        Self {
            negation_scalar: -0.74,
            window: 3,
            alpha: 15.0,
            negators: negators.iter().map(|s| s.to_string()).collect(),
            ja_negation_suffixes: vec!["ない".into(), "ぬ".into()],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValenceLabel {
    Positive,
    Negative,
    Neutral,
}

impl ValenceLabel {
    pub fn from_score(score: f64) -> Self {
        if score > 0.0 {
            ValenceLabel::Positive
        } else if score < 0.0 {
            ValenceLabel::Negative
        } else {
            ValenceLabel::Neutral
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ValenceLabel::Positive => "positive",
            ValenceLabel::Negative => "negative",
            ValenceLabel::Neutral => "neutral",
        }
    }
}

impl fmt::Display for ValenceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ValenceLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positive" => Ok(ValenceLabel::Positive),
            "negative" => Ok(ValenceLabel::Negative),
            "neutral" => Ok(ValenceLabel::Neutral),
            _ => Err(format!("unknown valence label `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValenceResult {
    pub score: f64,
    pub label: ValenceLabel,
}

impl ValenceResult {
    pub fn from_score(score: f64) -> Self {
        // -0.0 is neutral too
        let score = if score == 0.0 { 0.0 } else { score };
        Self {
            score,
            label: ValenceLabel::from_score(score),
        }
    }
}

/// Scores lowercased English tokens (stop words must not have been removed,
/// or negators would be lost).
pub fn valence_en<S: AsRef<str>>(tokens: &[S], vlex: &ValenceLexicon, cfg: &ValenceConfig) -> ValenceResult {
    let is_negator = |t: &str| cfg.negators.iter().any(|n| n == t);
    let mut sum = 0.0;
    for (i, tok) in tokens.iter().enumerate() {
        let Some(entry) = vlex.get(tok.as_ref()) else {
            continue;
        };
        if entry.is_booster || entry.polarity == 0.0 {
            continue;
        }
        let sign = entry.polarity.signum();
        let mut value = entry.polarity;
        let mut negated = false;
        for prev in tokens[i.saturating_sub(cfg.window)..i].iter().map(AsRef::as_ref) {
            if let Some(b) = vlex.get(prev).filter(|b| b.is_booster) {
                value += sign * b.booster_delta;
            }
            negated |= is_negator(prev);
        }
        if negated {
            value *= cfg.negation_scalar;
        }
        sum += value;
    }
    ValenceResult::from_score(normalize(sum, cfg.alpha))
}

/// Maps an unbounded sum into (-1, 1).
pub fn normalize(sum: f64, alpha: f64) -> f64 {
    if sum == 0.0 {
        0.0
    } else {
        sum / (sum * sum + alpha).sqrt()
    }
}

const SENTENCE_TERMINATORS: [char; 5] = ['。', '！', '？', '!', '?'];

/// Scores Japanese text sentence by sentence.
pub fn valence_ja(text: &str, polar_dict: &ValenceLexicon, cfg: &ValenceConfig) -> ValenceResult {
    let sentences: Vec<&str> = text
        .split(SENTENCE_TERMINATORS)
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if sentences.is_empty() {
        return ValenceResult::from_score(0.0);
    }
    let total: f64 = sentences.iter().map(|s| sentence_score_ja(s, polar_dict, cfg)).sum();
    ValenceResult::from_score(total / sentences.len() as f64)
}

fn sentence_score_ja(sentence: &str, dict: &ValenceLexicon, cfg: &ValenceConfig) -> f64 {
    let (mut pos, mut neg) = (0u32, 0u32);
    let mut at = 0;
    while at < sentence.len() {
        let rest = &sentence[at..];
        let Some((len, id)) = dict.trie.longest_prefix(rest) else {
            at += rest.chars().next().map_or(1, char::len_utf8);
            continue;
        };
        at += len;
        let mut sign = dict.entries[id as usize].polarity.signum();
        if let Some(suffix) = cfg
            .ja_negation_suffixes
            .iter()
            .find(|s| sentence[at..].starts_with(s.as_str()))
        {
            sign = -sign;
            at += suffix.len();
        }
        if sign > 0.0 {
            pos += 1;
        } else if sign < 0.0 {
            neg += 1;
        }
    }
    if pos + neg == 0 {
        0.0
    } else {
        (pos as f64 - neg as f64) / (pos + neg) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lex() -> ValenceLexicon {
        ValenceLexicon::parse("good\t1.9\nbad\t-2.5\nvery\tBOOST\t0.293\n").unwrap()
    }

    fn ja() -> ValenceLexicon {
        ValenceLexicon::parse("良い\t1\n嬉しい\t1\n悪い\t-1\n安心\t1\n").unwrap()
    }

    #[test]
    fn single_positive_word() {
        let r = valence_en(&["good"], &lex(), &ValenceConfig::default());
        assert!((r.score - 0.440_433_57).abs() < 1e-6, "{}", r.score);
        assert_eq!(r.label, ValenceLabel::Positive);
    }

    #[test]
    fn negated_word() {
        let r = valence_en(&["not", "good"], &lex(), &ValenceConfig::default());
        assert!((r.score - -0.341_237_6).abs() < 1e-6, "{}", r.score);
        assert_eq!(r.label, ValenceLabel::Negative);
    }

    #[test]
    fn negator_outside_window_is_ignored() {
        let r = valence_en(&["not", "a", "b", "c", "good"], &lex(), &ValenceConfig::default());
        assert_eq!(r.label, ValenceLabel::Positive);
    }

    #[test]
    fn booster_moves_toward_sign() {
        let cfg = ValenceConfig::default();
        let plain = valence_en(&["bad"], &lex(), &cfg).score;
        let boosted = valence_en(&["very", "bad"], &lex(), &cfg).score;
        assert!(boosted < plain);
        let expected = -2.793 / (2.793f64.powi(2) + 15.0).sqrt();
        assert!((boosted - expected).abs() < 1e-12);
    }

    #[test]
    fn no_hits_is_neutral() {
        let r = valence_en(&["the", "cat"], &lex(), &ValenceConfig::default());
        assert_eq!(
            r,
            ValenceResult {
                score: 0.0,
                label: ValenceLabel::Neutral
            }
        );
        let r = valence_en::<&str>(&[], &lex(), &ValenceConfig::default());
        assert_eq!(r.label, ValenceLabel::Neutral);
    }

    #[test]
    fn japanese_examples() {
        let cfg = ValenceConfig::default();
        let r = valence_ja("良いし嬉しい", &ja(), &cfg);
        assert_eq!((r.score, r.label), (1.0, ValenceLabel::Positive));
        let r = valence_ja("良いが悪い", &ja(), &cfg);
        assert_eq!((r.score, r.label), (0.0, ValenceLabel::Neutral));
        let r = valence_ja("良い。悪い。", &ja(), &cfg);
        assert_eq!((r.score, r.label), (0.0, ValenceLabel::Neutral));
        let r = valence_ja("安心ない", &ja(), &cfg);
        assert_eq!((r.score, r.label), (-1.0, ValenceLabel::Negative));
        let r = valence_ja("良い！天気", &ja(), &cfg);
        assert_eq!(r.score, 0.5);
        assert_eq!(valence_ja("", &ja(), &cfg).label, ValenceLabel::Neutral);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(ValenceLexicon::parse("good\tx\n").unwrap_err().line, 1);
        assert_eq!(ValenceLexicon::parse("# c\ngood\t1\ngood\t2\n").unwrap_err().line, 3);
        assert!(ValenceLexicon::parse("good\n").is_err());
        assert!(ValenceLexicon::parse("very\tBOOST\n").is_err());
    }

    #[test]
    fn bundled_lexicons_parse() {
        assert!(ValenceLexicon::english_default().get("good").is_some());
        assert!(ValenceLexicon::japanese_default().entries().len() > 20);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn words() -> impl Strategy<Value = Vec<&'static str>> {
            proptest::collection::vec(
                prop_oneof![
                    Just("good"),
                    Just("bad"),
                    Just("very"),
                    Just("not"),
                    Just("cat"),
                    Just("great"),
                    Just("evil"),
                    Just("slightly"),
                    Just("never")
                ],
                0..20,
            )
        }

        proptest! {
            #[test]
            fn score_bounded_and_label_consistent(tokens in words()) {
                let r = valence_en(&tokens, &ValenceLexicon::english_default(), &ValenceConfig::default());
                prop_assert!(r.score > -1.0 && r.score < 1.0);
                prop_assert_eq!(r.label, ValenceLabel::from_score(r.score));
            }

            #[test]
            fn sign_symmetry_en(tokens in words()) {
                let lex = ValenceLexicon::english_default();
                let cfg = ValenceConfig::default();
                let a = valence_en(&tokens, &lex, &cfg).score;
                let b = valence_en(&tokens, &lex.negated(), &cfg).score;
                prop_assert_eq!(a, -b);
            }

            #[test]
            fn sign_symmetry_ja(text in "(良い|悪い|嬉しい|安心|ない|天気|。){0,12}") {
                let lex = ja();
                let cfg = ValenceConfig::default();
                let a = valence_ja(&text, &lex, &cfg);
                let b = valence_ja(&text, &lex.negated(), &cfg);
                prop_assert_eq!(a.score, -b.score);
                prop_assert!((-1.0..=1.0).contains(&a.score));
            }
        }
    }
}
