use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while parsing a moral-foundation dictionary.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum LexiconError {
    #[error("dictionary is not valid UTF-8: {0}")]
    Encoding(String),
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: unknown category name `{name}`")]
    UnknownCategoryName { line: usize, name: String },
    #[error("line {line}: unknown category id `{id}`")]
    UnknownCategoryId { line: usize, id: String },
    #[error("line {line}: duplicate entry `{surface}` (first seen on line {first_line})")]
    DuplicateEntry {
        line: usize,
        first_line: usize,
        surface: String,
    },
    #[error("line {line}: malformed entry: {reason}")]
    MalformedEntry { line: usize, reason: String },
    #[error("dictionary contains no entries")]
    Empty,
    #[error("line {line}: malformed category-name table entry: {reason}")]
    MalformedNameTable { line: usize, reason: String },
}

/// Errors from the statistics routines.
#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("need at least {needed} groups, got {got}")]
    TooFewGroups { needed: usize, got: usize },
    #[error("group {0} is empty")]
    EmptyGroup(usize),
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("non-finite value in input")]
    NonFinite,
    #[error("dimension `{0}` has zero variance; correlation PCA is undefined")]
    ZeroVariance(String),
    #[error("all samples are identical; explained variance is undefined")]
    NoVariance,
    #[error("component index {index} out of range 1..={max}")]
    AxisOutOfRange { index: usize, max: usize },
    #[error("biplot axes must be distinct, got ({0}, {0})")]
    SameAxes(usize),
}

/// Errors from synthetic corpus generation.
#[derive(Debug, Error, PartialEq)]
pub enum SynthError {
    #[error("invalid synthetic spec: {0}")]
    Invalid(String),
    #[error(
        "planted fraction {p} cannot be realised with {retweets_per_node} retweets per node \
         (nearest is {achievable}); use retweets_per_node >= {minimum}"
    )]
    InfeasibleFraction {
        p: f64,
        retweets_per_node: u32,
        achievable: f64,
        minimum: u32,
    },
}

/// Top-level error for pipeline stages and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),
    #[error("[{stage}] {path}:{line}: {message}")]
    Data {
        stage: &'static str,
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("[{stage}] missing input {path}; run `moralnet {producer}` first")]
    MissingUpstream {
        stage: &'static str,
        path: PathBuf,
        producer: &'static str,
    },
    #[error("[{stage}] {path}: {source}")]
    Lexicon {
        stage: &'static str,
        path: PathBuf,
        #[source]
        source: LexiconError,
    },
    #[error("[{stage}] {source}")]
    Stats {
        stage: &'static str,
        #[source]
        source: StatsError,
    },
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("[{stage}] {path}: {source}")]
    Io {
        stage: &'static str,
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code: 2 for configuration problems, 3 for data problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Synth(_) => 2,
            Error::MissingUpstream { .. } => 2,
            _ => 3,
        }
    }

    pub(crate) fn io(stage: &'static str, path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            stage,
            path: path.into(),
            source,
        }
    }

    pub(crate) fn data(stage: &'static str, path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Data {
            stage,
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
