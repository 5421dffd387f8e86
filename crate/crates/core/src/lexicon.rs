//! Moral-foundation dictionaries: parsing, serialization and term matching.
//!
//! Two input layouts are understood:
//!
//! * LIWC-style `.dic`: a `%`-fenced header mapping integer ids to category
//!   names, followed by `word<TAB>id [id...]` lines. A trailing `*` marks a
//!   word stem.
//! * Two-column TSV: `word<TAB>CategoryName [<TAB>CategoryName...]`.
//!
//! Category names are resolved through a [`CategoryNames`] table, which ships
//! with the common MFD spellings and can be extended from a file.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::LexiconError;
use crate::trie::Trie;

/// Moral foundations. The first five are the basic foundations used for
/// loading vectors, in this order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Foundation {
    Care,
    Fairness,
    Ingroup,
    Authority,
    Purity,
    GeneralMorality,
}

impl Foundation {
    pub const BASIC: [Foundation; 5] = [
        Foundation::Care,
        Foundation::Fairness,
        Foundation::Ingroup,
        Foundation::Authority,
        Foundation::Purity,
    ];

    /// Position in the five-dimensional loading vector, `None` for
    /// [`Foundation::GeneralMorality`].
    pub fn basic_index(self) -> Option<usize> {
        match self {
            Foundation::Care => Some(0),
            Foundation::Fairness => Some(1),
            Foundation::Ingroup => Some(2),
            Foundation::Authority => Some(3),
            Foundation::Purity => Some(4),
            Foundation::GeneralMorality => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Foundation::Care => "Care",
            Foundation::Fairness => "Fairness",
            Foundation::Ingroup => "Ingroup",
            Foundation::Authority => "Authority",
            Foundation::Purity => "Purity",
            Foundation::GeneralMorality => "GeneralMorality",
        }
    }

    /// Lowercase column-name fragment (`care`, `fairness`, ...).
    pub fn slug(self) -> &'static str {
        match self {
            Foundation::Care => "care",
            Foundation::Fairness => "fairness",
            Foundation::Ingroup => "ingroup",
            Foundation::Authority => "authority",
            Foundation::Purity => "purity",
            Foundation::GeneralMorality => "general",
        }
    }
}

impl fmt::Display for Foundation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Foundation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match normalize_name(s).as_str() {
            "care" | "harm" => Ok(Foundation::Care),
            "fairness" => Ok(Foundation::Fairness),
            "ingroup" | "loyalty" => Ok(Foundation::Ingroup),
            "authority" => Ok(Foundation::Authority),
            "purity" | "sanctity" => Ok(Foundation::Purity),
            "generalmorality" | "moralitygeneral" | "general" => Ok(Foundation::GeneralMorality),
            _ => Err(format!("unknown foundation `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Virtue,
    Vice,
}

impl FromStr for Polarity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match normalize_name(s).as_str() {
            "virtue" | "positive" | "pos" => Ok(Polarity::Virtue),
            "vice" | "negative" | "neg" => Ok(Polarity::Vice),
            _ => Err(format!("unknown polarity `{s}`")),
        }
    }
}

/// A (foundation, polarity) pair, i.e. one dictionary category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Category {
    pub foundation: Foundation,
    pub polarity: Polarity,
}

impl Category {
    pub const fn new(foundation: Foundation, polarity: Polarity) -> Self {
        Self { foundation, polarity }
    }

    /// Name written into serialized `.dic` headers.
    pub fn canonical_name(self) -> String {
        let base = match self.foundation {
            Foundation::Care => "Harm",
            Foundation::GeneralMorality => "MoralityGeneral",
            other => other.name(),
        };
        match (self.foundation, self.polarity) {
            (Foundation::GeneralMorality, Polarity::Virtue) => base.to_string(),
            (_, Polarity::Virtue) => format!("{base}Virtue"),
            (_, Polarity::Vice) => format!("{base}Vice"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoralTerm {
    pub surface: String,
    pub is_stem: bool,
    pub categories: BTreeSet<Category>,
}

impl MoralTerm {
    /// The matching predicate for whole tokens.
    pub fn matches_token(&self, token: &str) -> bool {
        if self.is_stem {
            token.starts_with(self.surface.as_str())
        } else {
            token == self.surface
        }
    }

    pub fn has_basic_category(&self) -> bool {
        self.categories.iter().any(|c| c.foundation.basic_index().is_some())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MatchMode {
    /// Whitespace-tokenized text; stems match by prefix.
    TokenPrefix,
    /// Unsegmented text; greedy longest substring match.
    SubstringLongestMatch,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DictFormat {
    #[default]
    #[serde(rename = "liwc", alias = "dic")]
    Liwc,
    #[serde(rename = "tsv", alias = "twocolumn")]
    TwoColumn,
}

impl FromStr for DictFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match normalize_name(s).as_str() {
            "liwc" | "dic" => Ok(DictFormat::Liwc),
            "twocolumn" | "tsv" => Ok(DictFormat::TwoColumn),
            _ => Err(format!("unknown dictionary format `{s}` (expected liwc or tsv)")),
        }
    }
}

fn normalize_name(s: &str) -> String {
    s.chars()
        .filter(|c| c.is_alphanumeric())
        .flat_map(char::to_lowercase)
        .collect()
}

/// Maps header category names onto (foundation, polarity).
///
/// Lookup ignores case and any non-alphanumeric characters, so `HarmVirtue`,
/// `harm.virtue` and `Harm_Virtue` are the same name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryNames {
    table: BTreeMap<String, Category>,
}

impl Default for CategoryNames {
    fn default() -> Self {
        Self::builtin()
    }
}

impl CategoryNames {
    pub fn builtin() -> Self {
        use Foundation::*;
        use Polarity::*;
        let entries: &[(&str, Foundation, Polarity)] = &[
            ("HarmVirtue", Care, Virtue),
            ("CareVirtue", Care, Virtue),
            ("HarmVice", Care, Vice),
            ("CareVice", Care, Vice),
            ("FairnessVirtue", Fairness, Virtue),
            ("FairnessVice", Fairness, Vice),
            ("IngroupVirtue", Ingroup, Virtue),
            ("LoyaltyVirtue", Ingroup, Virtue),
            ("IngroupVice", Ingroup, Vice),
            ("LoyaltyVice", Ingroup, Vice),
            ("AuthorityVirtue", Authority, Virtue),
            ("AuthorityVice", Authority, Vice),
            ("PurityVirtue", Purity, Virtue),
            ("SanctityVirtue", Purity, Virtue),
            ("PurityVice", Purity, Vice),
            ("SanctityVice", Purity, Vice),
            ("DegradationVice", Purity, Vice),
            ("MoralityGeneral", GeneralMorality, Virtue),
            ("GeneralMorality", GeneralMorality, Virtue),
            ("MoralityGeneralVirtue", GeneralMorality, Virtue),
            ("MoralityGeneralVice", GeneralMorality, Vice),
        ];
        let table = entries
            .iter()
            .map(|&(name, f, p)| (normalize_name(name), Category::new(f, p)))
            .collect();
        Self { table }
    }

    /// Adds or replaces names from a `name<TAB>Foundation<TAB>polarity` file.
    /// Blank lines and lines starting with `#` are ignored.
    pub fn extend_from_str(&mut self, text: &str) -> Result<(), LexiconError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(LexiconError::MalformedNameTable {
                    line,
                    reason: format!("expected 3 tab-separated fields, got {}", fields.len()),
                });
            }
            let foundation = fields[1]
                .parse::<Foundation>()
                .map_err(|reason| LexiconError::MalformedNameTable { line, reason })?;
            let polarity = fields[2]
                .parse::<Polarity>()
                .map_err(|reason| LexiconError::MalformedNameTable { line, reason })?;
            self.table
                .insert(normalize_name(fields[0]), Category::new(foundation, polarity));
        }
        Ok(())
    }

    pub fn resolve(&self, name: &str) -> Option<Category> {
        self.table.get(&normalize_name(name)).copied()
    }
}

/// Options controlling how a dictionary file is compiled.
#[derive(Debug, Clone)]
pub struct LexiconOptions {
    pub format: DictFormat,
    pub match_mode: MatchMode,
    pub language_tag: String,
    pub names: CategoryNames,
}

impl LexiconOptions {
    pub fn english(format: DictFormat) -> Self {
        Self {
            format,
            match_mode: MatchMode::TokenPrefix,
            language_tag: "en".into(),
            names: CategoryNames::builtin(),
        }
    }

    pub fn japanese(format: DictFormat) -> Self {
        Self {
            format,
            match_mode: MatchMode::SubstringLongestMatch,
            language_tag: "ja".into(),
            names: CategoryNames::builtin(),
        }
    }
}

/// Serialized form of a compiled lexicon.
#[derive(Serialize, Deserialize)]
struct LexiconRepr {
    language_tag: String,
    match_mode: MatchMode,
    terms: Vec<MoralTerm>,
}

/// A compiled, immutable moral dictionary.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "LexiconRepr", into = "LexiconRepr")]
pub struct MoralLexicon {
    terms: Vec<MoralTerm>,
    match_mode: MatchMode,
    language_tag: String,
    trie: Trie,
}

impl From<MoralLexicon> for LexiconRepr {
    fn from(lex: MoralLexicon) -> Self {
        LexiconRepr {
            language_tag: lex.language_tag,
            match_mode: lex.match_mode,
            terms: lex.terms,
        }
    }
}

impl TryFrom<LexiconRepr> for MoralLexicon {
    type Error = LexiconError;

    fn try_from(repr: LexiconRepr) -> Result<Self, Self::Error> {
        MoralLexicon::from_terms(repr.terms, repr.match_mode, repr.language_tag)
    }
}

impl PartialEq for MoralLexicon {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && self.match_mode == other.match_mode && self.language_tag == other.language_tag
    }
}

impl MoralLexicon {
    /// Builds a lexicon from already-normalized terms. Terms are sorted by
    /// (surface, is_stem) so the result does not depend on input order.
    pub fn from_terms(
        mut terms: Vec<MoralTerm>,
        match_mode: MatchMode,
        language_tag: impl Into<String>,
    ) -> Result<Self, LexiconError> {
        terms.sort_by(|a, b| (&a.surface, a.is_stem).cmp(&(&b.surface, b.is_stem)));
        for (i, pair) in terms.windows(2).enumerate() {
            if pair[0].surface == pair[1].surface && pair[0].is_stem == pair[1].is_stem {
                return Err(LexiconError::DuplicateEntry {
                    line: i + 2,
                    first_line: i + 1,
                    surface: pair[1].surface.clone(),
                });
            }
        }
        for (i, term) in terms.iter().enumerate() {
            if term.surface.is_empty() {
                return Err(LexiconError::MalformedEntry {
                    line: i + 1,
                    reason: "empty surface".into(),
                });
            }
            if term.categories.is_empty() {
                return Err(LexiconError::MalformedEntry {
                    line: i + 1,
                    reason: format!("`{}` has no categories", term.surface),
                });
            }
        }
        let mut trie = Trie::default();
        for (id, term) in terms.iter().enumerate() {
            trie.insert(&term.surface, term.is_stem, id as u32);
        }
        Ok(Self {
            terms,
            match_mode,
            language_tag: language_tag.into(),
            trie,
        })
    }

    /// An empty lexicon; matches nothing.
    pub fn empty(match_mode: MatchMode, language_tag: impl Into<String>) -> Self {
        Self {
            terms: Vec::new(),
            match_mode,
            language_tag: language_tag.into(),
            trie: Trie::default(),
        }
    }

    pub fn parse(bytes: &[u8], opts: &LexiconOptions) -> Result<Self, LexiconError> {
        let text = std::str::from_utf8(bytes).map_err(|e| LexiconError::Encoding(e.to_string()))?;
        let text = text.strip_prefix('\u{feff}').unwrap_or(text);
        let entries = match opts.format {
            DictFormat::Liwc => parse_liwc(text, &opts.names)?,
            DictFormat::TwoColumn => parse_two_column(text, &opts.names)?,
        };
        if entries.is_empty() {
            return Err(LexiconError::Empty);
        }
        let lowercase = opts.match_mode == MatchMode::TokenPrefix;
        let mut seen: HashMap<(String, bool), usize> = HashMap::new();
        let mut terms = Vec::with_capacity(entries.len());
        for entry in entries {
            let mut word: String = entry.word.nfkc().collect();
            if lowercase {
                word = word.to_lowercase();
            }
            let (surface, is_stem) = match word.strip_suffix('*') {
                Some(stem) => (stem.to_string(), true),
                None => (word, false),
            };
            if surface.is_empty() || surface.contains('*') {
                return Err(LexiconError::MalformedEntry {
                    line: entry.line,
                    reason: format!("invalid word `{}`", entry.word),
                });
            }
            if let Some(&first_line) = seen.get(&(surface.clone(), is_stem)) {
                return Err(LexiconError::DuplicateEntry {
                    line: entry.line,
                    first_line,
                    surface,
                });
            }
            seen.insert((surface.clone(), is_stem), entry.line);
            terms.push(MoralTerm {
                surface,
                is_stem,
                categories: entry.categories,
            });
        }
        Self::from_terms(terms, opts.match_mode, opts.language_tag.clone())
    }

    pub fn terms(&self) -> &[MoralTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn match_mode(&self) -> MatchMode {
        self.match_mode
    }

    pub fn language_tag(&self) -> &str {
        &self.language_tag
    }

    /// Matches lowercased tokens. Each token yields at most one term: the
    /// longest surface that matches it, with exact entries preferred over
    /// stems of the same length.
    pub fn match_tokens<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<(usize, &MoralTerm)> {
        tokens
            .iter()
            .enumerate()
            .filter_map(|(i, tok)| {
                self.trie
                    .match_token(tok.as_ref())
                    .map(|id| (i, &self.terms[id as usize]))
            })
            .collect()
    }

    /// Greedy left-to-right longest-match scan over unsegmented text.
    /// Returned matches never overlap.
    pub fn match_substring(&self, text: &str) -> Vec<(usize, &MoralTerm)> {
        let mut out = Vec::new();
        let mut pos = 0;
        while pos < text.len() {
            match self.trie.longest_prefix(&text[pos..]) {
                Some((len, id)) => {
                    out.push((pos, &self.terms[id as usize]));
                    pos += len;
                }
                None => {
                    pos += text[pos..].chars().next().map_or(1, char::len_utf8);
                }
            }
        }
        out
    }

    /// Writes the lexicon back out as a LIWC-style `.dic` file.
    pub fn to_liwc_string(&self) -> String {
        let used: BTreeSet<Category> = self.terms.iter().flat_map(|t| t.categories.iter().copied()).collect();
        let ids: BTreeMap<Category, usize> = used.iter().enumerate().map(|(i, c)| (*c, i + 1)).collect();
        let mut out = String::from("%\n");
        for (cat, id) in &ids {
            out.push_str(&format!("{id:02}\t{}\n", cat.canonical_name()));
        }
        out.push_str("%\n");
        for term in &self.terms {
            out.push_str(&term.surface);
            if term.is_stem {
                out.push('*');
            }
            let cats: Vec<String> = term.categories.iter().map(|c| format!("{:02}", ids[c])).collect();
            out.push('\t');
            out.push_str(&cats.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("lexicon serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

struct RawEntry {
    line: usize,
    word: String,
    categories: BTreeSet<Category>,
}

fn parse_liwc(text: &str, names: &CategoryNames) -> Result<Vec<RawEntry>, LexiconError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    // opening fence
    loop {
        match lines.next() {
            Some((_, l)) if l.trim().is_empty() => continue,
            Some((_, l)) if l.trim() == "%" => break,
            Some((line, _)) => {
                return Err(LexiconError::MalformedHeader {
                    line,
                    reason: "expected opening `%` fence".into(),
                })
            }
            None => return Err(LexiconError::Empty),
        }
    }
    let mut ids: HashMap<String, Category> = HashMap::new();
    let mut closed = false;
    let mut last_line = 0;
    for (line, raw) in lines.by_ref() {
        last_line = line;
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        if l == "%" {
            closed = true;
            break;
        }
        let mut parts = l.split_whitespace();
        let (Some(id), Some(name), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(LexiconError::MalformedHeader {
                line,
                reason: format!("expected `id<TAB>name`, got `{l}`"),
            });
        };
        let cat = names.resolve(name).ok_or_else(|| LexiconError::UnknownCategoryName {
            line,
            name: name.to_string(),
        })?;
        if ids.insert(normalize_id(id), cat).is_some() {
            return Err(LexiconError::MalformedHeader {
                line,
                reason: format!("category id `{id}` defined twice"),
            });
        }
    }
    if !closed {
        return Err(LexiconError::MalformedHeader {
            line: last_line + 1,
            reason: "missing closing `%` fence".into(),
        });
    }

    let mut entries = Vec::new();
    for (line, raw) in lines {
        if raw.trim().is_empty() {
            continue;
        }
        let (word, rest) = match raw.split_once('\t') {
            Some((w, r)) => (w.trim(), r),
            None => {
                let l = raw.trim();
                match l.split_once(char::is_whitespace) {
                    Some((w, r)) => (w, r),
                    None => (l, ""),
                }
            }
        };
        let mut categories = BTreeSet::new();
        for id in rest.split_whitespace() {
            let cat = ids
                .get(&normalize_id(id))
                .ok_or_else(|| LexiconError::UnknownCategoryId {
                    line,
                    id: id.to_string(),
                })?;
            categories.insert(*cat);
        }
        if categories.is_empty() {
            return Err(LexiconError::MalformedEntry {
                line,
                reason: format!("`{word}` has no category ids"),
            });
        }
        entries.push(RawEntry {
            line,
            word: word.to_string(),
            categories,
        });
    }
    Ok(entries)
}

/// `01` and `1` refer to the same category.
fn normalize_id(id: &str) -> String {
    let stripped = id.trim_start_matches('0');
    if stripped.is_empty() && !id.is_empty() {
        "0".into()
    } else {
        stripped.to_string()
    }
}

fn parse_two_column(text: &str, names: &CategoryNames) -> Result<Vec<RawEntry>, LexiconError> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let mut fields = raw.split('\t').map(str::trim);
        let word = fields.next().unwrap_or_default();
        let mut categories = BTreeSet::new();
        for name in fields.filter(|f| !f.is_empty()) {
            let cat = names.resolve(name).ok_or_else(|| LexiconError::UnknownCategoryName {
                line,
                name: name.to_string(),
            })?;
            categories.insert(cat);
        }
        if categories.is_empty() {
            return Err(LexiconError::MalformedEntry {
                line,
                reason: format!("expected `word<TAB>category`, got `{}`", raw.trim()),
            });
        }
        entries.push(RawEntry {
            line,
            word: word.to_string(),
            categories,
        });
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn liwc(body: &str) -> Result<MoralLexicon, LexiconError> {
        let text = format!("%\n01\tHarmVirtue\n02\tHarmVice\n03\tIngroupVice\n11\tMoralityGeneral\n%\n{body}");
        MoralLexicon::parse(text.as_bytes(), &LexiconOptions::english(DictFormat::Liwc))
    }

    fn term(surface: &str, is_stem: bool, cats: &[(Foundation, Polarity)]) -> MoralTerm {
        MoralTerm {
            surface: surface.into(),
            is_stem,
            categories: cats.iter().map(|&(f, p)| Category::new(f, p)).collect(),
        }
    }

    #[test]
    fn stem_entry_compiles() {
        let lex = liwc("safe*\t01\n").unwrap();
        assert_eq!(
            lex.terms(),
            &[term("safe", true, &[(Foundation::Care, Polarity::Virtue)])]
        );
    }

    #[test]
    fn exact_entry_in_care_vice() {
        let lex = liwc("kill\t02\n").unwrap();
        assert_eq!(
            lex.terms(),
            &[term("kill", false, &[(Foundation::Care, Polarity::Vice)])]
        );
    }

    #[test]
    fn duplicate_entry_rejected() {
        let err = liwc("war\t03\nwar\t03\n").unwrap_err();
        assert!(
            matches!(
                err,
                LexiconError::DuplicateEntry {
                    line: 8,
                    first_line: 7,
                    ..
                }
            ),
            "{err:?}"
        );
    }

    #[test]
    fn word_and_stem_with_same_surface_coexist() {
        let lex = liwc("kill\t02\nkill*\t02\n").unwrap();
        assert_eq!(lex.len(), 2);
    }

    #[test]
    fn missing_fence_is_header_error() {
        let err = MoralLexicon::parse(
            b"01\tHarmVirtue\nsafe\t01\n",
            &LexiconOptions::english(DictFormat::Liwc),
        )
        .unwrap_err();
        assert!(matches!(err, LexiconError::MalformedHeader { line: 1, .. }));

        let err = MoralLexicon::parse(
            b"%\n01\tHarmVirtue\nsafe\t01\n",
            &LexiconOptions::english(DictFormat::Liwc),
        )
        .unwrap_err();
        assert!(
            matches!(err, LexiconError::UnknownCategoryName { line: 3, .. }),
            "{err:?}"
        );
    }

    #[test]
    fn unknown_category_name_reports_line() {
        let err = MoralLexicon::parse(
            b"%\n01\tHarmVirtue\n02\tBravery\n%\nsafe\t01\n",
            &LexiconOptions::english(DictFormat::Liwc),
        )
        .unwrap_err();
        assert_eq!(
            err,
            LexiconError::UnknownCategoryName {
                line: 3,
                name: "Bravery".into()
            }
        );
    }

    #[test]
    fn unknown_category_id_reports_line() {
        let err = liwc("safe\t01\nharm\t07\n").unwrap_err();
        assert_eq!(
            err,
            LexiconError::UnknownCategoryId {
                line: 8,
                id: "07".into()
            }
        );
    }

    #[test]
    fn empty_dictionary_rejected() {
        assert_eq!(liwc("").unwrap_err(), LexiconError::Empty);
        assert_eq!(
            MoralLexicon::parse(b"", &LexiconOptions::english(DictFormat::TwoColumn)).unwrap_err(),
            LexiconError::Empty
        );
    }

    #[test]
    fn multi_category_entries() {
        let lex = liwc("Traitor*\t03 11\n").unwrap();
        let t = &lex.terms()[0];
        assert_eq!(t.surface, "traitor");
        assert_eq!(t.categories.len(), 2);
    }

    #[test]
    fn two_column_format() {
        let text = "道徳\tMoralityGeneral\n不道徳\tPurityVice\tMoralityGeneral\n";
        let lex = MoralLexicon::parse(text.as_bytes(), &LexiconOptions::japanese(DictFormat::TwoColumn)).unwrap();
        assert_eq!(lex.len(), 2);
        assert_eq!(lex.match_mode(), MatchMode::SubstringLongestMatch);
        let err = MoralLexicon::parse(
            "道徳\tNope\n".as_bytes(),
            &LexiconOptions::japanese(DictFormat::TwoColumn),
        )
        .unwrap_err();
        assert!(matches!(err, LexiconError::UnknownCategoryName { line: 1, .. }));
    }

    #[test]
    fn name_table_overrides() {
        let mut names = CategoryNames::builtin();
        names.extend_from_str("# custom\nBravery\tIngroup\tvirtue\n").unwrap();
        assert_eq!(
            names.resolve("bravery"),
            Some(Category::new(Foundation::Ingroup, Polarity::Virtue))
        );
        assert_eq!(
            names.resolve("care.virtue"),
            Some(Category::new(Foundation::Care, Polarity::Virtue))
        );
        assert!(names.extend_from_str("x\tCare\n").is_err());
    }

    #[test]
    fn token_matching_examples() {
        let lex = MoralLexicon::from_terms(
            vec![term("killer", true, &[(Foundation::Care, Polarity::Vice)])],
            MatchMode::TokenPrefix,
            "en",
        )
        .unwrap();
        let m = lex.match_tokens(&["killers"]);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].0, 0);

        let lex = MoralLexicon::from_terms(
            vec![
                term("kill", false, &[(Foundation::Care, Polarity::Vice)]),
                term("killer", true, &[(Foundation::Care, Polarity::Vice)]),
            ],
            MatchMode::TokenPrefix,
            "en",
        )
        .unwrap();
        let m = lex.match_tokens(&["kill", "killing"]);
        assert_eq!(m.len(), 1);
        assert_eq!((m[0].0, m[0].1.surface.as_str(), m[0].1.is_stem), (0, "kill", false));

        let empty = MoralLexicon::empty(MatchMode::TokenPrefix, "en");
        assert!(empty.match_tokens(&["kill", "care"]).is_empty());
    }

    #[test]
    fn substring_matching_examples() {
        let cat = &[(Foundation::GeneralMorality, Polarity::Virtue)];
        let lex = MoralLexicon::from_terms(
            vec![term("道徳", false, cat), term("不道徳", false, cat)],
            MatchMode::SubstringLongestMatch,
            "ja",
        )
        .unwrap();
        let m = lex.match_substring("不道徳だ");
        assert_eq!(m.len(), 1);
        assert_eq!((m[0].0, m[0].1.surface.as_str()), (0, "不道徳"));

        let m = lex.match_substring("道徳と道徳");
        assert_eq!(m.iter().map(|x| x.0).collect::<Vec<_>>(), vec![0, "道徳と".len()]);

        let lex =
            MoralLexicon::from_terms(vec![term("純粋", false, cat)], MatchMode::SubstringLongestMatch, "ja").unwrap();
        assert!(lex.match_substring("今日は晴れ").is_empty());
    }

    #[test]
    fn liwc_and_json_roundtrip() {
        let lex = liwc("safe*\t01\nkill\t02\ntraitor*\t03 11\nmoral\t11\n").unwrap();
        let again = MoralLexicon::parse(
            lex.to_liwc_string().as_bytes(),
            &LexiconOptions::english(DictFormat::Liwc),
        )
        .unwrap();
        assert_eq!(lex, again);
        let json = MoralLexicon::from_json(&lex.to_json()).unwrap();
        assert_eq!(lex, json);
        assert_eq!(json.match_tokens(&["safety"]).len(), 1);
    }

    #[test]
    fn json_rejects_duplicates() {
        let json = r#"{"language_tag":"en","match_mode":"TokenPrefix","terms":[
            {"surface":"a","is_stem":false,"categories":[{"foundation":"Care","polarity":"virtue"}]},
            {"surface":"a","is_stem":false,"categories":[{"foundation":"Care","polarity":"vice"}]}]}"#;
        assert!(MoralLexicon::from_json(json).is_err());
    }
}
