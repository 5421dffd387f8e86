//! C ABI over the `moralnet` library.
//!
//! Objects are opaque handles created by `mn_*_new`/`mn_*_parse` and
//! released by the matching `mn_*_free`. Every fallible call returns an
//! [`MnStatus`]; on failure [`mn_last_error`] describes the problem for the
//! calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use moralnet::graph::NetworkBuilder;
use moralnet::lexicon::LexiconOptions;
use moralnet::stats::{kruskal_wallis, pca, PcaMode};
use moralnet::textprep::{preprocess, Lang, Stopwords, TweetRecord};
use moralnet::valence::{valence_en, valence_ja, ValenceConfig, ValenceLexicon};
use moralnet::{k_core, label_tweet, moral_loading, network_homophily, node_homophily};
use moralnet::{CountMode, DictFormat, Foundation, MoralLexicon, RetweetNetwork};

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MnStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Stats = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MnLanguage {
    En = 0,
    Ja = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MnDictFormat {
    Liwc = 0,
    Tsv = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MnCountMode {
    Multiset = 0,
    Set = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MnPcaMode {
    Covariance = 0,
    Correlation = 1,
}

/// Loading counts of one text. `labels` has bit j set for every basic
/// foundation j (Care = 0 .. Purity = 4) attaining the maximum count.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MnLoading {
    pub counts: [u32; 5],
    pub matched: u32,
    pub labels: u8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MnKruskalResult {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

/// Per-foundation homophily; `scores[j]` is NaN when no node of label j
/// has an edge.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MnHomophily {
    pub scores: [f64; 5],
    pub nodes: [usize; 5],
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MnPcaResult {
    pub eigenvalues: [f64; 5],
    pub explained_variance_ratios: [f64; 5],
    /// Row k is the unit loading vector of component k+1.
    pub components: [[f64; 5]; 5],
}

/// Compiled moral dictionary.
pub struct MnLexicon {
    inner: MoralLexicon,
    stopwords: Stopwords,
}

/// Valence lexicon for one language.
pub struct MnValenceLexicon {
    inner: ValenceLexicon,
    lang: MnLanguage,
    cfg: ValenceConfig,
}

/// Mutable weighted retweet network.
pub struct MnNetwork {
    builder: NetworkBuilder,
}

struct Failure(MnStatus, String);

fn fail(status: MnStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MnStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MnStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            MnStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(MnStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| fail(MnStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| fail(MnStatus::NullPointer, format!("{what} is null")))
}

unsafe fn mut_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| fail(MnStatus::NullPointer, format!("{what} is null")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(MnStatus::NullPointer, format!("{what} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn label_arg(label: i32) -> Result<Option<Foundation>, Failure> {
    match label {
        -1 => Ok(None),
        0..=4 => Ok(Some(Foundation::BASIC[label as usize])),
        _ => Err(fail(
            MnStatus::InvalidArgument,
            format!("label {label} is not -1 or a foundation index 0..=4"),
        )),
    }
}

/// Message for the most recent failure on this thread, or null. The string
/// is owned by the caller and must be released with [`mn_string_free`].
#[no_mangle]
pub extern "C" fn mn_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |c| c.clone().into_raw()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer obtained from this library that has not
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn mn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a dictionary. English dictionaries match whole tokens with `*`
/// stems; Japanese ones match substrings, longest first.
///
/// # Safety
/// `bytes` must point to `len` readable bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mn_lexicon_parse(
    bytes: *const u8,
    len: usize,
    format: MnDictFormat,
    lang: MnLanguage,
    out: *mut *mut MnLexicon,
) -> MnStatus {
    guard(|| {
        let out = mut_arg(out, "out")?;
        let data = slice_arg(bytes, len, "bytes")?;
        let format = match format {
            MnDictFormat::Liwc => DictFormat::Liwc,
            MnDictFormat::Tsv => DictFormat::TwoColumn,
        };
        let opts = match lang {
            MnLanguage::En => LexiconOptions::english(format),
            MnLanguage::Ja => LexiconOptions::japanese(format),
        };
        let inner = MoralLexicon::parse(data, &opts).map_err(|e| fail(MnStatus::Parse, e.to_string()))?;
        *out = Box::into_raw(Box::new(MnLexicon {
            inner,
            stopwords: Stopwords::english_default(),
        }));
        Ok(())
    })
}

/// # Safety
/// `lex` must be null or a handle from [`mn_lexicon_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mn_lexicon_free(lex: *mut MnLexicon) {
    if !lex.is_null() {
        drop(Box::from_raw(lex));
    }
}

/// Number of distinct dictionary entries, or 0 for a null handle.
///
/// # Safety
/// `lex` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mn_lexicon_len(lex: *const MnLexicon) -> usize {
    lex.as_ref().map_or(0, |l| l.inner.len())
}

/// Scores one text against a dictionary.
///
/// # Safety
/// `lex` must be a live handle, `text` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mn_score_text(
    lex: *const MnLexicon,
    text: *const c_char,
    mode: MnCountMode,
    out: *mut MnLoading,
) -> MnStatus {
    guard(|| {
        let lex = ref_arg(lex, "lexicon")?;
        let text = str_arg(text, "text")?;
        let out = mut_arg(out, "out")?;
        let lang = match lex.inner.language_tag() {
            "ja" => Lang::Ja,
            _ => Lang::En,
        };
        let rec = TweetRecord {
            id: String::new(),
            user_id: String::new(),
            text: text.to_string(),
            lang,
            timestamp: 0,
            retweet_of_user_id: None,
            retweet_of_tweet_id: None,
        };
        let mode = match mode {
            MnCountMode::Multiset => CountMode::Multiset,
            MnCountMode::Set => CountMode::Set,
        };
        let loading = moral_loading(&preprocess(&rec, &lex.stopwords), &lex.inner, mode);
        let labels = label_tweet(&loading).map_or(0, |set| {
            set.iter()
                .filter_map(Foundation::basic_index)
                .fold(0u8, |acc, j| acc | (1 << j))
        });
        *out = MnLoading {
            counts: loading.counts,
            matched: loading.matched,
            labels,
        };
        Ok(())
    })
}

/// The bundled valence lexicon for a language.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mn_valence_lexicon_default(lang: MnLanguage, out: *mut *mut MnValenceLexicon) -> MnStatus {
    guard(|| {
        let out = mut_arg(out, "out")?;
        let inner = match lang {
            MnLanguage::En => ValenceLexicon::english_default(),
            MnLanguage::Ja => ValenceLexicon::japanese_default(),
        };
        *out = Box::into_raw(Box::new(MnValenceLexicon {
            inner,
            lang,
            cfg: ValenceConfig::default(),
        }));
        Ok(())
    })
}

/// Parses a `surface<TAB>polarity` (or `surface<TAB>BOOST<TAB>delta`)
/// valence lexicon.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mn_valence_lexicon_parse(
    text: *const c_char,
    lang: MnLanguage,
    out: *mut *mut MnValenceLexicon,
) -> MnStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let out = mut_arg(out, "out")?;
        let inner =
            ValenceLexicon::parse(text).map_err(|e| fail(MnStatus::Parse, format!("line {}: {}", e.line, e.reason)))?;
        *out = Box::into_raw(Box::new(MnValenceLexicon {
            inner,
            lang,
            cfg: ValenceConfig::default(),
        }));
        Ok(())
    })
}

/// # Safety
/// `lex` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mn_valence_lexicon_free(lex: *mut MnValenceLexicon) {
    if !lex.is_null() {
        drop(Box::from_raw(lex));
    }
}

/// Valence of a text in [-1, 1].
///
/// # Safety
/// `lex` must be a live handle, `text` a NUL-terminated string and
/// `score` writable.
#[no_mangle]
pub unsafe extern "C" fn mn_valence(lex: *const MnValenceLexicon, text: *const c_char, score: *mut f64) -> MnStatus {
    guard(|| {
        let lex = ref_arg(lex, "lexicon")?;
        let text = str_arg(text, "text")?;
        let score = mut_arg(score, "score")?;
        let result = match lex.lang {
            MnLanguage::En => valence_en(&moralnet::textprep::tokenize_en(text), &lex.inner, &lex.cfg),
            MnLanguage::Ja => valence_ja(&moralnet::textprep::valence_text_ja(text), &lex.inner, &lex.cfg),
        };
        *score = result.score;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn mn_network_new() -> *mut MnNetwork {
    Box::into_raw(Box::new(MnNetwork {
        builder: NetworkBuilder::new(),
    }))
}

/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mn_network_free(net: *mut MnNetwork) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Sets a user's label: a foundation index 0..=4, or -1 for unlabelled.
///
/// # Safety
/// `net` must be a live handle and `user` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn mn_network_set_label(net: *mut MnNetwork, user: *const c_char, label: i32) -> MnStatus {
    guard(|| {
        let net = mut_arg(net, "network")?;
        let user = str_arg(user, "user")?;
        net.builder
            .set_label(user, label_arg(label)?)
            .map_err(|e| fail(MnStatus::InvalidArgument, e.to_string()))
    })
}

/// Adds `weight` to the undirected edge between two distinct users.
///
/// # Safety
/// `net` must be a live handle; `a` and `b` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn mn_network_add_edge(
    net: *mut MnNetwork,
    a: *const c_char,
    b: *const c_char,
    weight: u64,
) -> MnStatus {
    guard(|| {
        let net = mut_arg(net, "network")?;
        let (a, b) = (str_arg(a, "a")?, str_arg(b, "b")?);
        net.builder
            .add_edge(a, b, weight)
            .map_err(|e| fail(MnStatus::InvalidArgument, e.to_string()))
    })
}

fn snapshot(net: &MnNetwork) -> RetweetNetwork {
    net.builder.clone().build()
}

/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mn_network_node_count(net: *const MnNetwork) -> usize {
    net.as_ref().map_or(0, |n| snapshot(n).node_count())
}

/// # Safety
/// `net` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mn_network_edge_count(net: *const MnNetwork) -> usize {
    net.as_ref().map_or(0, |n| snapshot(n).edge_count())
}

/// Homophily of one node. Fails if the user is absent or unlabelled.
///
/// # Safety
/// `net` must be a live handle, `user` a NUL-terminated string and `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn mn_network_node_homophily(
    net: *const MnNetwork,
    user: *const c_char,
    out: *mut f64,
) -> MnStatus {
    guard(|| {
        let net = snapshot(ref_arg(net, "network")?);
        let user = str_arg(user, "user")?;
        let out = mut_arg(out, "out")?;
        let i = net
            .index_of(user)
            .ok_or_else(|| fail(MnStatus::InvalidArgument, format!("no node `{user}`")))?;
        *out = node_homophily(&net, i)
            .ok_or_else(|| fail(MnStatus::InvalidArgument, format!("node `{user}` is unlabelled")))?;
        Ok(())
    })
}

/// Homophily per basic foundation.
///
/// # Safety
/// `net` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mn_network_homophily(net: *const MnNetwork, out: *mut MnHomophily) -> MnStatus {
    guard(|| {
        let net = snapshot(ref_arg(net, "network")?);
        let out = mut_arg(out, "out")?;
        let report = network_homophily(&net);
        let mut h = MnHomophily::default();
        for (j, fh) in report.foundations.iter().enumerate() {
            h.scores[j] = fh.score.unwrap_or(f64::NAN);
            h.nodes[j] = fh.n_nodes;
        }
        *out = h;
        Ok(())
    })
}

/// The k-core of a network as a new handle.
///
/// # Safety
/// `net` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn mn_network_kcore(net: *const MnNetwork, k: usize, out: *mut *mut MnNetwork) -> MnStatus {
    guard(|| {
        let net = snapshot(ref_arg(net, "network")?);
        let out = mut_arg(out, "out")?;
        *out = Box::into_raw(Box::new(MnNetwork {
            builder: k_core(&net, k).to_builder(),
        }));
        Ok(())
    })
}

/// Kruskal-Wallis H test. `values` holds the groups back to back;
/// `group_sizes[g]` is the length of group g.
///
/// # Safety
/// `group_sizes` must hold `n_groups` entries and `values` their sum;
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mn_kruskal_wallis(
    values: *const f64,
    group_sizes: *const usize,
    n_groups: usize,
    out: *mut MnKruskalResult,
) -> MnStatus {
    guard(|| {
        let sizes = slice_arg(group_sizes, n_groups, "group_sizes")?;
        let total = sizes
            .iter()
            .try_fold(0usize, |acc, &s| acc.checked_add(s))
            .ok_or_else(|| fail(MnStatus::InvalidArgument, "group sizes overflow"))?;
        let values = slice_arg(values, total, "values")?;
        let out = mut_arg(out, "out")?;
        let mut groups = Vec::with_capacity(n_groups);
        let mut start = 0;
        for &s in sizes {
            groups.push(&values[start..start + s]);
            start += s;
        }
        let r = kruskal_wallis(&groups).map_err(|e| fail(MnStatus::Stats, e.to_string()))?;
        *out = MnKruskalResult {
            statistic: r.statistic,
            degrees_of_freedom: r.degrees_of_freedom,
            p_value: r.p_value,
        };
        Ok(())
    })
}

/// PCA of `n` five-dimensional samples stored row by row.
///
/// # Safety
/// `samples` must hold `5 * n` values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mn_pca(samples: *const f64, n: usize, mode: MnPcaMode, out: *mut MnPcaResult) -> MnStatus {
    guard(|| {
        let len = n
            .checked_mul(5)
            .ok_or_else(|| fail(MnStatus::InvalidArgument, "sample count overflows"))?;
        let flat = slice_arg(samples, len, "samples")?;
        let out = mut_arg(out, "out")?;
        let rows: Vec<[f64; 5]> = flat
            .chunks_exact(5)
            .map(|c| c.try_into().expect("chunks of five"))
            .collect();
        let mode = match mode {
            MnPcaMode::Covariance => PcaMode::Covariance,
            MnPcaMode::Correlation => PcaMode::Correlation,
        };
        let r = pca(&rows, mode).map_err(|e| fail(MnStatus::Stats, e.to_string()))?;
        *out = MnPcaResult {
            eigenvalues: r.eigenvalues,
            explained_variance_ratios: r.explained_variance_ratios,
            components: r.components,
        };
        Ok(())
    })
}
