//! Moral-foundation text scoring and retweet-network homophily.
//!
//! The crate turns a corpus of short texts into per-tweet moral loadings,
//! per-user moral labels, a weighted retweet network and per-foundation
//! homophily scores, together with Kruskal-Wallis tests and PCA over the
//! loadings. [`pipeline`] wires the stages together; the `moralnet` binary
//! exposes each stage as a subcommand.

pub mod config;
pub mod error;
pub mod graph;
pub mod lexicon;
pub mod pipeline;
pub mod plot;
pub mod profiles;
pub mod scoring;
pub mod stats;
pub mod synth;
pub mod textprep;
mod trie;
pub mod valence;

pub use config::{PcaInput, PipelineConfig};
pub use error::{Error, Result};
pub use graph::{build_network, k_core, network_homophily, node_homophily, HomophilyReport, RetweetNetwork};
pub use lexicon::{Category, DictFormat, Foundation, MatchMode, MoralLexicon, MoralTerm, Polarity};
pub use pipeline::{run_pipeline, run_stage, AnalysisReport, Stage};
pub use profiles::{assign_labels, build_profiles, MultilabelMode, UserMoralProfile};
pub use scoring::{
    label_tweet, moral_loading, score_corpus, CountMode, LabelSet, MoralLoadingVector, MoralScoredTweet,
};
pub use textprep::{keyword_filter, preprocess, CleanText, Lang, Stopwords, TweetRecord};
pub use valence::{valence_en, valence_ja, ValenceConfig, ValenceLabel, ValenceLexicon, ValenceResult};
