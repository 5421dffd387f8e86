//! Pipeline configuration and the resources it points at.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::lexicon::{CategoryNames, DictFormat, LexiconOptions, MoralLexicon};
use crate::profiles::MultilabelMode;
use crate::scoring::{CountMode, Lexicons};
use crate::stats::PcaMode;
use crate::textprep::Stopwords;
use crate::valence::{ValenceConfig, ValenceLexicon};

const BUNDLED_DICT_EN: &str = include_str!("../data/mfd_sample_en.dic");
const BUNDLED_DICT_JA: &str = include_str!("../data/jmfd_sample_ja.tsv");

/// Samples fed to PCA.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PcaInput {
    /// One loading vector per moral tweet.
    #[default]
    Tweets,
    /// One label-proportion vector per profiled user.
    Users,
}

impl FromStr for PcaInput {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tweets" | "tweet" => Ok(PcaInput::Tweets),
            "users" | "user" => Ok(PcaInput::Users),
            _ => Err(format!("unknown PCA input `{s}` (expected tweets or users)")),
        }
    }
}

/// Everything a pipeline run depends on. Unset dictionary, lexicon and
/// stopword paths fall back to the bundled data files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Corpus JSONL files; records of every language may be mixed.
    pub corpus: Vec<PathBuf>,
    pub dict_en: Option<PathBuf>,
    pub dict_en_format: DictFormat,
    pub dict_ja: Option<PathBuf>,
    pub dict_ja_format: DictFormat,
    /// Extra header-name mappings for LIWC dictionaries.
    pub category_names: Option<PathBuf>,
    pub valence_en: Option<PathBuf>,
    pub valence_ja: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    /// When non-empty, records of that language must contain a keyword.
    pub keywords_en: Vec<String>,
    pub keywords_ja: Vec<String>,
    pub multilabel: MultilabelMode,
    pub count_mode: CountMode,
    pub pca_mode: PcaMode,
    pub pca_input: PcaInput,
    pub kcore: usize,
    pub out_dir: PathBuf,
    /// Only the synthetic generator draws random numbers.
    pub seed: u64,
    /// Worker threads; 0 uses every available core.
    pub threads: usize,
    pub svg: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            corpus: Vec::new(),
            dict_en: None,
            dict_en_format: DictFormat::Liwc,
            dict_ja: None,
            dict_ja_format: DictFormat::TwoColumn,
            category_names: None,
            valence_en: None,
            valence_ja: None,
            stopwords: None,
            keywords_en: Vec::new(),
            keywords_ja: Vec::new(),
            multilabel: MultilabelMode::Each,
            count_mode: CountMode::Multiset,
            pca_mode: PcaMode::Covariance,
            pca_input: PcaInput::Tweets,
            kcore: 2,
            out_dir: PathBuf::from("report"),
            seed: 0,
            threads: 0,
            svg: true,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e: toml::de::Error| Error::Config(e.to_string()))
    }

    /// Reads a TOML file. Relative paths inside it are taken relative to
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg: Self =
            toml::from_str(&text).map_err(|e: toml::de::Error| Error::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.rebase(base);
        Ok(cfg)
    }

    fn rebase(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        self.corpus.iter_mut().for_each(join);
        self.optional_paths_mut().into_iter().flatten().for_each(join);
        join(&mut self.out_dir);
    }

    fn optional_paths_mut(&mut self) -> [&mut Option<PathBuf>; 6] {
        [
            &mut self.dict_en,
            &mut self.dict_ja,
            &mut self.category_names,
            &mut self.valence_en,
            &mut self.valence_ja,
            &mut self.stopwords,
        ]
    }

    fn named_inputs(&self) -> Vec<(String, &Path)> {
        let mut out: Vec<(String, &Path)> = self
            .corpus
            .iter()
            .enumerate()
            .map(|(i, p)| (format!("corpus[{i}]"), p.as_path()))
            .collect();
        let optional = [
            ("dict_en", &self.dict_en),
            ("dict_ja", &self.dict_ja),
            ("category_names", &self.category_names),
            ("valence_en", &self.valence_en),
            ("valence_ja", &self.valence_ja),
            ("stopwords", &self.stopwords),
        ];
        for (name, p) in optional {
            if let Some(p) = p {
                out.push((name.to_string(), p.as_path()));
            }
        }
        out
    }

    /// Checks that every referenced file exists.
    pub fn validate(&self) -> Result<()> {
        for (name, path) in self.named_inputs() {
            if !path.is_file() {
                return Err(Error::Config(format!("{name}: no such file {}", path.display())));
            }
        }
        Ok(())
    }

    pub(crate) fn require_corpus(&self) -> Result<()> {
        if self.corpus.is_empty() {
            Err(Error::Config("no corpus file given".into()))
        } else {
            Ok(())
        }
    }

    /// SHA-256 over the contents of every input file and every setting that
    /// can change an output. The output directory and thread count are left
    /// out: moving a run or changing its parallelism must not change bytes.
    pub fn hash(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.hash_material()?.as_bytes())))
    }

    /// Per-input digests, keyed by role (`corpus[0]`, `dict_en`, ...).
    pub fn input_digests(&self) -> Result<BTreeMap<String, String>> {
        self.named_inputs()
            .into_iter()
            .map(|(name, path)| {
                let bytes =
                    std::fs::read(path).map_err(|e| Error::Config(format!("{name}: {}: {e}", path.display())))?;
                Ok((name, hex::encode(Sha256::digest(&bytes))))
            })
            .collect()
    }

    fn hash_material(&self) -> Result<String> {
        let mut settings = serde_json::to_value(self).expect("config serializes");
        let map = settings.as_object_mut().expect("config is an object");
        map.remove("out_dir");
        map.remove("threads");
        let inputs = self.input_digests()?;
        for (key, value) in map.iter_mut() {
            if key == "corpus" {
                *value = serde_json::json!(self
                    .corpus
                    .iter()
                    .enumerate()
                    .map(|(i, _)| inputs[&format!("corpus[{i}]")].clone())
                    .collect::<Vec<_>>());
            } else if let Some(digest) = inputs.get(key) {
                *value = serde_json::Value::String(digest.clone());
            }
        }
        Ok(serde_json::to_string(&settings).expect("value serializes"))
    }
}

/// Compiled dictionaries and word lists for a run.
#[derive(Debug, Clone)]
pub struct Resources {
    pub lexicons: Lexicons,
    pub stopwords: Stopwords,
    pub valence_en: ValenceLexicon,
    pub valence_ja: ValenceLexicon,
    pub valence_cfg: ValenceConfig,
}

impl Resources {
    pub fn load(cfg: &PipelineConfig, stage: &'static str) -> Result<Self> {
        let mut names = CategoryNames::builtin();
        if let Some(path) = &cfg.category_names {
            let text = read_text(stage, path)?;
            names.extend_from_str(&text).map_err(|source| Error::Lexicon {
                stage,
                path: path.clone(),
                source,
            })?;
        }
        let compile = |path: &Option<PathBuf>, bundled: &str, mut opts: LexiconOptions| {
            opts.names = names.clone();
            let (bytes, path) = match path {
                Some(p) => (read_bytes(stage, p)?, p.clone()),
                None => (bundled.as_bytes().to_vec(), PathBuf::from("<bundled>")),
            };
            MoralLexicon::parse(&bytes, &opts).map_err(|source| Error::Lexicon { stage, path, source })
        };
        let ja_format = if cfg.dict_ja.is_some() {
            cfg.dict_ja_format
        } else {
            DictFormat::TwoColumn
        };
        let en_format = if cfg.dict_en.is_some() {
            cfg.dict_en_format
        } else {
            DictFormat::Liwc
        };
        let lexicons = Lexicons {
            en: Some(compile(
                &cfg.dict_en,
                BUNDLED_DICT_EN,
                LexiconOptions::english(en_format),
            )?),
            ja: Some(compile(
                &cfg.dict_ja,
                BUNDLED_DICT_JA,
                LexiconOptions::japanese(ja_format),
            )?),
        };
        let stopwords = match &cfg.stopwords {
            Some(p) => Stopwords::parse(&read_text(stage, p)?),
            None => Stopwords::english_default(),
        };
        let valence = |path: &Option<PathBuf>, fallback: fn() -> ValenceLexicon| match path {
            Some(p) => {
                ValenceLexicon::parse(&read_text(stage, p)?).map_err(|e| Error::data(stage, p, e.line, e.reason))
            }
            None => Ok(fallback()),
        };
        Ok(Self {
            lexicons,
            stopwords,
            valence_en: valence(&cfg.valence_en, ValenceLexicon::english_default)?,
            valence_ja: valence(&cfg.valence_ja, ValenceLexicon::japanese_default)?,
            valence_cfg: ValenceConfig::default(),
        })
    }
}

fn read_bytes(stage: &'static str, path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(stage, path, e))
}

fn read_text(stage: &'static str, path: &Path) -> Result<String> {
    let bytes = read_bytes(stage, path)?;
    String::from_utf8(bytes).map_err(|e| Error::data(stage, path, 0, format!("not valid UTF-8: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_and_defaults() {
        let cfg = PipelineConfig::from_toml_str(
            "corpus = [\"a.jsonl\"]\nkcore = 3\nmultilabel = \"drop\"\ncount_mode = \"set\"\ndict_ja_format = \"liwc\"\n",
        )
        .unwrap();
        assert_eq!(cfg.kcore, 3);
        assert_eq!(cfg.multilabel, MultilabelMode::Drop);
        assert_eq!(cfg.count_mode, CountMode::Set);
        assert_eq!(cfg.dict_ja_format, DictFormat::Liwc);
        assert_eq!(cfg.pca_input, PcaInput::Tweets);
        let text = toml::to_string(&cfg).unwrap();
        assert_eq!(PipelineConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn unknown_key_is_config_error() {
        let err = PipelineConfig::from_toml_str("kcor = 3\n").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn missing_file_fails_validation() {
        let cfg = PipelineConfig {
            corpus: vec!["/nonexistent/x.jsonl".into()],
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn hash_tracks_inputs_and_settings_only() {
        let dir = tempfile::tempdir().unwrap();
        let corpus = dir.path().join("c.jsonl");
        std::fs::write(&corpus, "{}\n").unwrap();
        let base = PipelineConfig {
            corpus: vec![corpus.clone()],
            ..Default::default()
        };
        let h = base.hash().unwrap();
        let moved = PipelineConfig {
            out_dir: "elsewhere".into(),
            threads: 7,
            ..base.clone()
        };
        assert_eq!(moved.hash().unwrap(), h);
        let other_k = PipelineConfig {
            kcore: 5,
            ..base.clone()
        };
        assert_ne!(other_k.hash().unwrap(), h);
        let other_seed = PipelineConfig {
            seed: 1,
            ..base.clone()
        };
        assert_ne!(other_seed.hash().unwrap(), h);
        std::fs::write(&corpus, "{ }\n").unwrap();
        assert_ne!(base.hash().unwrap(), h);
    }

    #[test]
    fn bundled_resources_compile() {
        let res = Resources::load(&PipelineConfig::default(), "score").unwrap();
        assert!(res.lexicons.en.as_ref().unwrap().len() > 50);
        assert!(res.lexicons.ja.as_ref().unwrap().len() > 40);
    }
}
