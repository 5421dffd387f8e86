//! Per-tweet moral loadings, labels and corpus filtering.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lexicon::{Foundation, MoralLexicon, MoralTerm};
use crate::textprep::{preprocess, CleanBody, CleanText, Lang, Stopwords, TweetRecord};

/// How repeated occurrences of the same dictionary term are counted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    /// Every occurrence counts.
    #[default]
    Multiset,
    /// Each distinct term counts once per tweet.
    Set,
}

impl FromStr for CountMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "multiset" => Ok(CountMode::Multiset),
            "set" => Ok(CountMode::Set),
            _ => Err(format!("unknown count mode `{s}` (expected multiset or set)")),
        }
    }
}

/// Integer match counts for the five basic foundations. The float loadings
/// are derived, so equality comparisons stay exact.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct MoralLoadingVector {
    /// Matched terms touching each foundation (virtue and vice combined).
    pub counts: [u32; 5],
    /// Matched terms with at least one basic-foundation category.
    pub matched: u32,
}

impl MoralLoadingVector {
    pub fn value(&self, dim: usize) -> f64 {
        if self.matched == 0 {
            0.0
        } else {
            self.counts[dim] as f64 / self.matched as f64
        }
    }

    pub fn values(&self) -> [f64; 5] {
        std::array::from_fn(|j| self.value(j))
    }

    pub fn is_zero(&self) -> bool {
        self.matched == 0
    }

    /// Adds one matched term.
    pub fn add_term(&mut self, term: &MoralTerm) {
        let mut hit = [false; 5];
        for cat in &term.categories {
            if let Some(j) = cat.foundation.basic_index() {
                hit[j] = true;
            }
        }
        if hit.iter().any(|&h| h) {
            self.matched += 1;
            for (c, h) in self.counts.iter_mut().zip(hit) {
                *c += h as u32;
            }
        }
    }
}

/// A set of basic foundations, stored as a bit mask.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelSet(u8);

impl LabelSet {
    pub fn empty() -> Self {
        Self(0)
    }

    pub fn single(f: Foundation) -> Self {
        let mut s = Self::empty();
        s.insert(f);
        s
    }

    pub fn insert(&mut self, f: Foundation) {
        if let Some(j) = f.basic_index() {
            self.0 |= 1 << j;
        }
    }

    pub fn contains(&self, f: Foundation) -> bool {
        f.basic_index().is_some_and(|j| self.0 & (1 << j) != 0)
    }

    pub fn contains_index(&self, j: usize) -> bool {
        self.0 & (1 << j) != 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = Foundation> + '_ {
        Foundation::BASIC.into_iter().filter(move |f| self.contains(*f))
    }
}

impl fmt::Debug for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<Foundation> for LabelSet {
    fn from_iter<I: IntoIterator<Item = Foundation>>(iter: I) -> Self {
        let mut s = Self::empty();
        for f in iter {
            s.insert(f);
        }
        s
    }
}

/// Counts dictionary matches in a cleaned text.
pub fn moral_loading(clean: &CleanText, lex: &MoralLexicon, mode: CountMode) -> MoralLoadingVector {
    let matches: Vec<&MoralTerm> = match &clean.body {
        CleanBody::Tokens(tokens) => lex.match_tokens(tokens).into_iter().map(|(_, t)| t).collect(),
        CleanBody::Text(text) => lex.match_substring(text).into_iter().map(|(_, t)| t).collect(),
    };
    let mut loading = MoralLoadingVector::default();
    match mode {
        CountMode::Multiset => matches.iter().for_each(|t| loading.add_term(t)),
        CountMode::Set => {
            let mut seen: HashSet<*const MoralTerm> = HashSet::new();
            for t in matches {
                if seen.insert(t as *const MoralTerm) {
                    loading.add_term(t);
                }
            }
        }
    }
    loading
}

/// The argmax set of a loading vector; `None` when nothing matched.
pub fn label_tweet(loading: &MoralLoadingVector) -> Option<LabelSet> {
    if loading.matched == 0 {
        return None;
    }
    let max = *loading.counts.iter().max().expect("five counts");
    if max == 0 {
        return None;
    }
    Some(
        Foundation::BASIC
            .into_iter()
            .zip(loading.counts)
            .filter(|&(_, c)| c == max)
            .map(|(f, _)| f)
            .collect(),
    )
}

/// A tweet that matched at least one basic-foundation term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ScoredRow", into = "ScoredRow")]
pub struct MoralScoredTweet {
    pub id: String,
    pub user_id: String,
    pub lang: Lang,
    pub loading: MoralLoadingVector,
    pub labels: LabelSet,
}

/// JSONL line layout for [`MoralScoredTweet`].
#[derive(Serialize, Deserialize)]
struct ScoredRow {
    id: String,
    user_id: String,
    lang: Lang,
    counts: [u32; 5],
    matched: u32,
    #[serde(default)]
    loadings: [f64; 5],
    labels: Vec<Foundation>,
}

impl From<MoralScoredTweet> for ScoredRow {
    fn from(t: MoralScoredTweet) -> Self {
        ScoredRow {
            loadings: t.loading.values(),
            labels: t.labels.iter().collect(),
            id: t.id,
            user_id: t.user_id,
            lang: t.lang,
            counts: t.loading.counts,
            matched: t.loading.matched,
        }
    }
}

impl TryFrom<ScoredRow> for MoralScoredTweet {
    type Error = String;

    fn try_from(row: ScoredRow) -> Result<Self, Self::Error> {
        let loading = MoralLoadingVector {
            counts: row.counts,
            matched: row.matched,
        };
        if row.counts.iter().any(|&c| c > row.matched) {
            return Err(format!("tweet {}: count exceeds matched total", row.id));
        }
        let labels: LabelSet = row.labels.into_iter().collect();
        if label_tweet(&loading) != Some(labels) {
            return Err(format!("tweet {}: labels do not match counts", row.id));
        }
        Ok(MoralScoredTweet {
            id: row.id,
            user_id: row.user_id,
            lang: row.lang,
            loading,
            labels,
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LangCounts {
    pub input: u64,
    pub kept: u64,
}

/// Per-language bookkeeping of the scoring filter.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterStats {
    pub by_lang: BTreeMap<String, LangCounts>,
    /// Records in a language with no scoring path.
    pub skipped: u64,
}

impl FilterStats {
    pub fn input(&self) -> u64 {
        self.by_lang.values().map(|c| c.input).sum::<u64>() + self.skipped
    }

    pub fn kept(&self) -> u64 {
        self.by_lang.values().map(|c| c.kept).sum()
    }

    pub fn merge(&mut self, other: &FilterStats) {
        for (lang, c) in &other.by_lang {
            let e = self.by_lang.entry(lang.clone()).or_default();
            e.input += c.input;
            e.kept += c.kept;
        }
        self.skipped += other.skipped;
    }
}

/// Dictionaries for each scored language.
#[derive(Debug, Clone, Default)]
pub struct Lexicons {
    pub en: Option<MoralLexicon>,
    pub ja: Option<MoralLexicon>,
}

impl Lexicons {
    pub fn get(&self, lang: &Lang) -> Option<&MoralLexicon> {
        match lang {
            Lang::En => self.en.as_ref(),
            Lang::Ja => self.ja.as_ref(),
            Lang::Other(_) => None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScoreError {
    #[error("no dictionary configured for language `{0}`")]
    MissingLexicon(String),
}

/// Scores one record. `Ok(None)` means the record matched nothing.
pub fn score_record(
    rec: &TweetRecord,
    lexicons: &Lexicons,
    stopwords: &Stopwords,
    mode: CountMode,
) -> Result<Option<MoralScoredTweet>, ScoreError> {
    let lex = lexicons
        .get(&rec.lang)
        .ok_or_else(|| ScoreError::MissingLexicon(rec.lang.to_string()))?;
    let loading = moral_loading(&preprocess(rec, stopwords), lex, mode);
    Ok(label_tweet(&loading).map(|labels| MoralScoredTweet {
        id: rec.id.clone(),
        user_id: rec.user_id.clone(),
        lang: rec.lang.clone(),
        loading,
        labels,
    }))
}

/// Scores a corpus, keeping only records with at least one match. Output
/// order follows input order regardless of the thread pool size.
pub fn score_corpus(
    records: &[TweetRecord],
    lexicons: &Lexicons,
    stopwords: &Stopwords,
    mode: CountMode,
) -> Result<(Vec<MoralScoredTweet>, FilterStats), ScoreError> {
    let scored: Vec<Option<Option<MoralScoredTweet>>> = records
        .par_iter()
        .map(|rec| {
            if rec.lang.is_known() {
                score_record(rec, lexicons, stopwords, mode).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect::<Result<_, _>>()?;

    let mut stats = FilterStats::default();
    let mut out = Vec::new();
    for (rec, result) in records.iter().zip(scored) {
        match result {
            None => stats.skipped += 1,
            Some(kept) => {
                let entry = stats.by_lang.entry(rec.lang.to_string()).or_default();
                entry.input += 1;
                if let Some(t) = kept {
                    entry.kept += 1;
                    out.push(t);
                }
            }
        }
    }
    Ok((out, stats))
}

/// Number and share of kept tweets carrying each foundation label.
pub fn foundation_shares(scored: &[MoralScoredTweet], lang: &Lang) -> ([u64; 5], u64) {
    let mut counts = [0u64; 5];
    let mut total = 0;
    for t in scored.iter().filter(|t| &t.lang == lang) {
        total += 1;
        for (j, c) in counts.iter_mut().enumerate() {
            if t.labels.contains_index(j) {
                *c += 1;
            }
        }
    }
    (counts, total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::{Category, MatchMode, Polarity};

    fn term(surface: &str, is_stem: bool, cats: &[Foundation]) -> MoralTerm {
        MoralTerm {
            surface: surface.into(),
            is_stem,
            categories: cats.iter().map(|&f| Category::new(f, Polarity::Virtue)).collect(),
        }
    }

    fn lexicon() -> MoralLexicon {
        use Foundation::*;
        MoralLexicon::from_terms(
            vec![
                term("safe", true, &[Care]),
                term("protect", true, &[Care]),
                term("obey", true, &[Authority]),
                term("law", false, &[Authority]),
                term("pure", true, &[Purity]),
                term("moral", false, &[GeneralMorality]),
                term("traitor", false, &[Ingroup, Authority]),
            ],
            MatchMode::TokenPrefix,
            "en",
        )
        .unwrap()
    }

    fn clean(tokens: &[&str]) -> CleanText {
        CleanText {
            original_id: "t".into(),
            body: CleanBody::Tokens(tokens.iter().map(|s| s.to_string()).collect()),
        }
    }

    fn rec(id: &str, lang: Lang, text: &str) -> TweetRecord {
        TweetRecord {
            id: id.into(),
            user_id: "u".into(),
            text: text.into(),
            lang,
            timestamp: 0,
            retweet_of_user_id: None,
            retweet_of_tweet_id: None,
        }
    }

    #[test]
    fn two_care_two_authority() {
        let l = moral_loading(
            &clean(&["safety", "protection", "obey", "law"]),
            &lexicon(),
            CountMode::Multiset,
        );
        assert_eq!(l.counts, [2, 0, 0, 2, 0]);
        assert_eq!(l.matched, 4);
        assert_eq!(l.values(), [0.5, 0.0, 0.0, 0.5, 0.0]);
        let labels = label_tweet(&l).unwrap();
        assert_eq!(labels, LabelSet::from_iter([Foundation::Care, Foundation::Authority]));
    }

    #[test]
    fn all_purity() {
        let l = moral_loading(&clean(&["pure", "purer", "pureness"]), &lexicon(), CountMode::Multiset);
        assert_eq!((l.counts, l.matched), ([0, 0, 0, 0, 3], 3));
        assert_eq!(l.values(), [0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(label_tweet(&l), Some(LabelSet::single(Foundation::Purity)));
    }

    #[test]
    fn no_matches_and_general_only() {
        let l = moral_loading(&clean(&["hello", "moral"]), &lexicon(), CountMode::Multiset);
        assert!(l.is_zero());
        assert_eq!(l.values(), [0.0; 5]);
        assert_eq!(label_tweet(&l), None);
    }

    #[test]
    fn multi_category_term_counts_once_per_foundation() {
        let l = moral_loading(&clean(&["traitor", "law"]), &lexicon(), CountMode::Multiset);
        assert_eq!((l.counts, l.matched), ([0, 0, 1, 2, 0], 2));
        assert_eq!(label_tweet(&l), Some(LabelSet::single(Foundation::Authority)));
    }

    #[test]
    fn set_mode_dedupes_terms() {
        let toks = ["law", "law", "safe"];
        let multi = moral_loading(&clean(&toks), &lexicon(), CountMode::Multiset);
        let set = moral_loading(&clean(&toks), &lexicon(), CountMode::Set);
        assert_eq!((multi.counts, multi.matched), ([1, 0, 0, 2, 0], 3));
        assert_eq!((set.counts, set.matched), ([1, 0, 0, 1, 0], 2));
    }

    #[test]
    fn corpus_bookkeeping() {
        let lex = Lexicons {
            en: Some(lexicon()),
            ja: None,
        };
        let records = vec![
            rec("1", Lang::En, "Keep everyone safe"),
            rec("2", Lang::En, "nothing here"),
            rec("3", Lang::En, "obey the law"),
            rec("4", Lang::Other("fr".into()), "loi"),
        ];
        let (out, stats) = score_corpus(&records, &lex, &Stopwords::english_default(), CountMode::Multiset).unwrap();
        assert_eq!(out.iter().map(|t| t.id.as_str()).collect::<Vec<_>>(), vec!["1", "3"]);
        assert_eq!(stats.by_lang["en"], LangCounts { input: 3, kept: 2 });
        assert_eq!(stats.skipped, 1);
        assert_eq!(stats.input(), 4);

        let (out, stats) = score_corpus(&[], &lex, &Stopwords::default(), CountMode::Multiset).unwrap();
        assert!(out.is_empty());
        assert_eq!(stats, FilterStats::default());

        let err = score_corpus(
            &[rec("9", Lang::Ja, "道徳")],
            &lex,
            &Stopwords::default(),
            CountMode::Multiset,
        )
        .unwrap_err();
        assert_eq!(err, ScoreError::MissingLexicon("ja".into()));
    }

    #[test]
    fn scored_row_roundtrip_and_validation() {
        let t = MoralScoredTweet {
            id: "1".into(),
            user_id: "u".into(),
            lang: Lang::En,
            loading: MoralLoadingVector {
                counts: [1, 0, 0, 1, 0],
                matched: 2,
            },
            labels: LabelSet::from_iter([Foundation::Care, Foundation::Authority]),
        };
        let json = serde_json::to_string(&t).unwrap();
        assert!(json.contains(r#""labels":["Care","Authority"]"#), "{json}");
        assert_eq!(serde_json::from_str::<MoralScoredTweet>(&json).unwrap(), t);
        let bad = json.replace(r#"["Care","Authority"]"#, r#"["Care"]"#);
        assert!(serde_json::from_str::<MoralScoredTweet>(&bad).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn labels_are_scale_invariant(counts in proptest::array::uniform5(0u32..20), k in 1u32..50) {
                let a = MoralLoadingVector { counts, matched: counts.iter().sum::<u32>().max(1) };
                let b = MoralLoadingVector { counts: counts.map(|c| c * k), matched: a.matched * k };
                prop_assert_eq!(label_tweet(&a), label_tweet(&b));
            }

            #[test]
            fn single_category_loadings_sum_to_one(tokens in proptest::collection::vec(
                prop_oneof![Just("safe"), Just("law"), Just("pure"), Just("obey"), Just("other"), Just("moral")], 0..12)) {
                let l = moral_loading(&clean(&tokens), &lexicon(), CountMode::Multiset);
                let sum: u32 = l.counts.iter().sum();
                if l.matched > 0 {
                    prop_assert_eq!(sum, l.matched);
                    prop_assert!((l.values().iter().sum::<f64>() - 1.0).abs() < 1e-12);
                } else {
                    prop_assert_eq!(sum, 0);
                }
            }
        }
    }
}
