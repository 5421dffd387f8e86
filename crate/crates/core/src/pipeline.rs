//! Stage orchestration and the on-disk report bundle.
//!
//! Every stage reads its inputs from the corpus or from files produced by
//! earlier stages, and writes plain CSV/JSONL (plus optional SVG). Within a
//! run, outputs are held in memory and only land in the output directory
//! once every requested stage has succeeded.

use std::cell::{OnceCell, RefCell};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{PcaInput, PipelineConfig, Resources};
use crate::error::{Error, Result};
use crate::graph::{build_network, k_core, network_homophily, NetworkBuilder, RetweetNetwork};
use crate::lexicon::Foundation;
use crate::plot::{bar_chart_svg, scatter_svg, BarChart, Scatter};
use crate::profiles::{build_profiles, UserMoralProfile};
use crate::scoring::{foundation_shares, score_corpus, MoralScoredTweet};
use crate::stats::{emit_biplot_data, kruskal_wallis, pca, PcaResult};
use crate::synth::SyntheticCorpus;
use crate::textprep::{keyword_filter, tokenize_en, valence_text_ja, Lang, TweetRecord};
use crate::valence::{valence_en, valence_ja, ValenceLabel, ValenceResult};

pub const SCORED: &str = "scored.jsonl";
pub const FILTER_STATS: &str = "filter_stats.csv";
pub const FOUNDATION_SHARES: &str = "foundation_shares.csv";
pub const VALENCE: &str = "valence.jsonl";
pub const VALENCE_SHARES: &str = "valence_shares.csv";
pub const NETWORK_SUMMARY: &str = "network_summary.csv";
pub const HOMOPHILY: &str = "homophily.csv";
pub const NODE_HOMOPHILY: &str = "node_homophily.csv";
pub const KW_LOADINGS: &str = "kw_loadings.csv";
pub const KW_VALENCE: &str = "kw_valence.csv";
pub const PCA_SUMMARY: &str = "pca_summary.csv";
pub const MANIFEST: &str = "manifest.json";

const PROFILE_HEADER: &str = "user_id,n_tweets,mp_care,mp_fairness,mp_ingroup,mp_authority,mp_purity,label";
const EDGE_HEADER: &str = "src,dst,weight,src_label,dst_label";
const NA: &str = "NA";
const NO_DATA: &str = "no data";
const BIPLOT_AXES: [(usize, usize); 2] = [(1, 2), (3, 4)];

/// Languages with a scoring path, in report order.
pub fn report_langs() -> [Lang; 2] {
    [Lang::En, Lang::Ja]
}

pub fn profiles_file(lang: &Lang) -> String {
    format!("profiles_{lang}.csv")
}

pub fn edges_file(lang: &Lang) -> String {
    format!("edges_{lang}.csv")
}

pub fn core_edges_file(lang: &Lang) -> String {
    format!("edges_{lang}_core.csv")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    Score,
    Valence,
    Profiles,
    Network,
    Homophily,
    Stats,
    Pca,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::Score,
        Stage::Valence,
        Stage::Profiles,
        Stage::Network,
        Stage::Homophily,
        Stage::Stats,
        Stage::Pca,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Score => "score",
            Stage::Valence => "valence",
            Stage::Profiles => "profiles",
            Stage::Network => "network",
            Stage::Homophily => "homophily",
            Stage::Stats => "stats",
            Stage::Pca => "pca",
        }
    }

    fn needs_corpus(self) -> bool {
        matches!(self, Stage::Score | Stage::Valence | Stage::Network)
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown stage `{s}`"))
    }
}

/// What a run left on disk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisReport {
    pub out_dir: PathBuf,
    /// File names relative to `out_dir`, sorted.
    pub files: Vec<String>,
    pub config_hash: String,
}

/// One line of `valence.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValenceRow {
    pub id: String,
    pub lang: Lang,
    pub score: f64,
    pub label: ValenceLabel,
}

/// One row of `profiles_<lang>.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub user_id: String,
    pub n_tweets: u32,
    pub mp_care: f64,
    pub mp_fairness: f64,
    pub mp_ingroup: f64,
    pub mp_authority: f64,
    pub mp_purity: f64,
    /// Empty when the user has no unique majority label.
    pub label: String,
}

impl From<&UserMoralProfile> for ProfileRow {
    fn from(p: &UserMoralProfile) -> Self {
        let mp = p.proportions();
        ProfileRow {
            user_id: p.user_id.clone(),
            n_tweets: p.tweet_count,
            mp_care: mp[0],
            mp_fairness: mp[1],
            mp_ingroup: mp[2],
            mp_authority: mp[3],
            mp_purity: mp[4],
            label: p.label.map_or(String::new(), |f| f.name().to_string()),
        }
    }
}

impl ProfileRow {
    pub fn proportions(&self) -> [f64; 5] {
        [
            self.mp_care,
            self.mp_fairness,
            self.mp_ingroup,
            self.mp_authority,
            self.mp_purity,
        ]
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeRow {
    src: String,
    dst: String,
    weight: u64,
    src_label: String,
    dst_label: String,
}

struct Corpus {
    /// Keyword-filtered records sorted by tweet id.
    records: Vec<TweetRecord>,
    /// Per language: (records read, records passing the keyword filter).
    counts: BTreeMap<String, (u64, u64)>,
}

struct Run<'a> {
    cfg: &'a PipelineConfig,
    corpus: OnceCell<Corpus>,
    resources: OnceCell<Resources>,
    outputs: RefCell<BTreeMap<String, Vec<u8>>>,
}

impl<'a> Run<'a> {
    fn new(cfg: &'a PipelineConfig) -> Self {
        Self {
            cfg,
            corpus: OnceCell::new(),
            resources: OnceCell::new(),
            outputs: RefCell::new(BTreeMap::new()),
        }
    }

    fn corpus(&self, stage: &'static str) -> Result<&Corpus> {
        if self.corpus.get().is_none() {
            let c = load_corpus(self.cfg, stage)?;
            let _ = self.corpus.set(c);
        }
        Ok(self.corpus.get().expect("initialised above"))
    }

    fn resources(&self, stage: &'static str) -> Result<&Resources> {
        if self.resources.get().is_none() {
            let r = Resources::load(self.cfg, stage)?;
            let _ = self.resources.set(r);
        }
        Ok(self.resources.get().expect("initialised above"))
    }

    /// An upstream file from this run, or else from the output directory.
    fn artifact(&self, stage: &'static str, name: &str, producer: Stage) -> Result<(PathBuf, Vec<u8>)> {
        let path = self.cfg.out_dir.join(name);
        if let Some(bytes) = self.outputs.borrow().get(name) {
            return Ok((path, bytes.clone()));
        }
        match std::fs::read(&path) {
            Ok(bytes) => Ok((path, bytes)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(Error::MissingUpstream {
                stage,
                path,
                producer: producer.name(),
            }),
            Err(e) => Err(Error::io(stage, path, e)),
        }
    }

    fn emit(&self, name: impl Into<String>, bytes: impl Into<Vec<u8>>) {
        self.outputs.borrow_mut().insert(name.into(), bytes.into());
    }

    fn emit_svg(&self, name: impl Into<String>, svg: impl FnOnce() -> String) {
        if self.cfg.svg {
            self.emit(name, svg());
        }
    }

    fn run(&self, stage: Stage) -> Result<()> {
        match stage {
            Stage::Score => self.score(),
            Stage::Valence => self.valence(),
            Stage::Profiles => self.profiles(),
            Stage::Network => self.network(),
            Stage::Homophily => self.homophily(),
            Stage::Stats => self.stats(),
            Stage::Pca => self.pca(),
        }
    }

    fn scored(&self, stage: &'static str) -> Result<Vec<MoralScoredTweet>> {
        let (path, bytes) = self.artifact(stage, SCORED, Stage::Score)?;
        parse_jsonl(stage, &path, &bytes)
    }

    fn profiles_for(&self, stage: &'static str, lang: &Lang) -> Result<Vec<ProfileRow>> {
        let (path, bytes) = self.artifact(stage, &profiles_file(lang), Stage::Profiles)?;
        parse_csv(stage, &path, &bytes)
    }

    fn score(&self) -> Result<()> {
        const STAGE: &str = "score";
        let corpus = self.corpus(STAGE)?;
        let res = self.resources(STAGE)?;
        let (scored, stats) = score_corpus(&corpus.records, &res.lexicons, &res.stopwords, self.cfg.count_mode)
            .map_err(|e| Error::Config(e.to_string()))?;

        let mut jsonl = String::new();
        for t in &scored {
            jsonl.push_str(&serde_json::to_string(t).expect("scored tweet serializes"));
            jsonl.push('\n');
        }
        self.emit(SCORED, jsonl);

        let mut langs: BTreeMap<String, (u64, u64)> = report_langs().iter().map(|l| (l.to_string(), (0, 0))).collect();
        langs.extend(corpus.counts.iter().map(|(k, v)| (k.clone(), *v)));
        let rows = langs.iter().map(|(lang, (input, kept))| {
            let moral = stats.by_lang.get(lang).map_or(0, |c| c.kept);
            vec![lang.clone(), input.to_string(), kept.to_string(), moral.to_string()]
        });
        self.emit(
            FILTER_STATS,
            csv_bytes(&["lang", "input", "keyword_matched", "moral"], rows),
        );

        let mut rows = Vec::new();
        let mut series = Vec::new();
        for lang in report_langs() {
            let (counts, total) = foundation_shares(&scored, &lang);
            let shares: Vec<f64> = counts.iter().map(|&c| ratio(c, total)).collect();
            for (j, f) in Foundation::BASIC.iter().enumerate() {
                rows.push(vec![
                    lang.to_string(),
                    f.name().to_string(),
                    counts[j].to_string(),
                    total.to_string(),
                    fmt_opt(total > 0, shares[j]),
                ]);
            }
            series.push((lang.to_string(), shares));
        }
        self.emit(
            FOUNDATION_SHARES,
            csv_bytes(&["lang", "foundation", "tweets", "moral_tweets", "share"], rows),
        );
        self.emit_svg("fig_foundation_shares.svg", || {
            bar_chart_svg(&BarChart {
                title: "Share of moral tweets per foundation".into(),
                y_label: "share of tweets".into(),
                categories: foundation_names(),
                series,
            })
        });
        Ok(())
    }

    fn valence(&self) -> Result<()> {
        const STAGE: &str = "valence";
        let scored = self.scored(STAGE)?;
        let corpus = self.corpus(STAGE)?;
        let res = self.resources(STAGE)?;
        let index: HashMap<&str, &TweetRecord> = corpus.records.iter().map(|r| (r.id.as_str(), r)).collect();
        let scored_path = self.cfg.out_dir.join(SCORED);

        let rows: Vec<ValenceRow> = scored
            .par_iter()
            .enumerate()
            .map(|(i, t)| {
                let rec = index.get(t.id.as_str()).ok_or_else(|| {
                    Error::data(
                        STAGE,
                        &scored_path,
                        i + 1,
                        format!("tweet {} is not in the corpus", t.id),
                    )
                })?;
                let v = record_valence(rec, res);
                Ok(ValenceRow {
                    id: t.id.clone(),
                    lang: t.lang.clone(),
                    score: v.score,
                    label: v.label,
                })
            })
            .collect::<Result<_>>()?;

        let mut jsonl = String::new();
        for r in &rows {
            jsonl.push_str(&serde_json::to_string(r).expect("valence row serializes"));
            jsonl.push('\n');
        }
        self.emit(VALENCE, jsonl);

        let mut table = Vec::new();
        for lang in report_langs() {
            let mut counts = [[0u64; 3]; 5];
            for (t, v) in scored.iter().zip(&rows).filter(|(t, _)| t.lang == lang) {
                let k = match v.label {
                    ValenceLabel::Positive => 0,
                    ValenceLabel::Neutral => 1,
                    ValenceLabel::Negative => 2,
                };
                for j in 0..5 {
                    if t.labels.contains_index(j) {
                        counts[j][k] += 1;
                    }
                }
            }
            let mut shares = vec![Vec::new(); 3];
            for (j, f) in Foundation::BASIC.iter().enumerate() {
                let total: u64 = counts[j].iter().sum();
                let mut row = vec![lang.to_string(), f.name().to_string(), total.to_string()];
                row.extend(counts[j].iter().map(u64::to_string));
                for k in 0..3 {
                    let s = ratio(counts[j][k], total);
                    row.push(fmt_opt(total > 0, s));
                    shares[k].push(s);
                }
                table.push(row);
            }
            let series = ["positive", "neutral", "negative"]
                .iter()
                .map(|s| s.to_string())
                .zip(shares)
                .collect();
            self.emit_svg(format!("fig_valence_shares_{lang}.svg"), || {
                bar_chart_svg(&BarChart {
                    title: format!("Valence of moral tweets ({lang})"),
                    y_label: "share of tweets".into(),
                    categories: foundation_names(),
                    series,
                })
            });
        }
        self.emit(
            VALENCE_SHARES,
            csv_bytes(
                &[
                    "lang",
                    "foundation",
                    "tweets",
                    "positive",
                    "neutral",
                    "negative",
                    "positive_share",
                    "neutral_share",
                    "negative_share",
                ],
                table,
            ),
        );
        Ok(())
    }

    fn profiles(&self) -> Result<()> {
        const STAGE: &str = "profiles";
        let scored = self.scored(STAGE)?;
        for lang in report_langs() {
            let profiles = build_profiles(scored.iter().filter(|t| t.lang == lang), self.cfg.multilabel);
            let rows: Vec<ProfileRow> = profiles.values().map(ProfileRow::from).collect();
            self.emit(profiles_file(&lang), serialize_csv(PROFILE_HEADER, &rows));
        }
        Ok(())
    }

    fn network(&self) -> Result<()> {
        const STAGE: &str = "network";
        let mut summary = Vec::new();
        for lang in report_langs() {
            let labels: BTreeMap<String, Foundation> = {
                let rows = self.profiles_for(STAGE, &lang)?;
                let path = self.cfg.out_dir.join(profiles_file(&lang));
                let mut out = BTreeMap::new();
                for (i, r) in rows.into_iter().enumerate() {
                    if r.label.is_empty() {
                        continue;
                    }
                    let f = parse_label(&r.label).map_err(|m| Error::data(STAGE, &path, i + 2, m))?;
                    out.insert(r.user_id, f);
                }
                out
            };
            let corpus = self.corpus(STAGE)?;
            let net = build_network(corpus.records.iter().filter(|r| r.lang == lang), &labels);
            let core = k_core(&net, self.cfg.kcore);
            self.emit(edges_file(&lang), edges_csv(&net));
            self.emit(format!("network_{lang}.gexf"), net.to_gexf());
            self.emit(core_edges_file(&lang), edges_csv(&core));
            self.emit(format!("network_{lang}_core.gexf"), core.to_gexf());
            summary.push(vec![
                lang.to_string(),
                net.node_count().to_string(),
                net.edge_count().to_string(),
                self.cfg.kcore.to_string(),
                core.node_count().to_string(),
                core.edge_count().to_string(),
            ]);
        }
        self.emit(
            NETWORK_SUMMARY,
            csv_bytes(&["lang", "nodes", "edges", "k", "core_nodes", "core_edges"], summary),
        );
        Ok(())
    }

    fn homophily(&self) -> Result<()> {
        const STAGE: &str = "homophily";
        let mut table = Vec::new();
        let mut nodes = Vec::new();
        let mut series = Vec::new();
        for lang in report_langs() {
            let (path, bytes) = self.artifact(STAGE, &edges_file(&lang), Stage::Network)?;
            let net = parse_edge_list(STAGE, &path, &bytes)?;
            let report = network_homophily(&net);
            let mut scores = Vec::new();
            for fh in &report.foundations {
                table.push(vec![
                    lang.to_string(),
                    fh.foundation.name().to_string(),
                    fh.n_nodes.to_string(),
                    fh.score.map_or(NA.to_string(), |s| s.to_string()),
                ]);
                scores.push(fh.score.unwrap_or(f64::NAN));
            }
            for nh in &report.nodes {
                nodes.push(vec![
                    lang.to_string(),
                    nh.user_id.clone(),
                    nh.label.name().to_string(),
                    nh.value.to_string(),
                ]);
            }
            series.push((lang.to_string(), scores));
        }
        self.emit(
            HOMOPHILY,
            csv_bytes(&["lang", "foundation", "nodes", "homophily"], table),
        );
        self.emit(NODE_HOMOPHILY, csv_bytes(&["lang", "user_id", "label", "h"], nodes));
        self.emit_svg("fig_homophily.svg", || {
            bar_chart_svg(&BarChart {
                title: "Homophily per foundation".into(),
                y_label: "H".into(),
                categories: foundation_names(),
                series,
            })
        });
        Ok(())
    }

    fn stats(&self) -> Result<()> {
        const STAGE: &str = "stats";
        let scored = self.scored(STAGE)?;
        let (vpath, vbytes) = self.artifact(STAGE, VALENCE, Stage::Valence)?;
        let valence: Vec<ValenceRow> = parse_jsonl(STAGE, &vpath, &vbytes)?;
        let by_id: HashMap<&str, f64> = valence.iter().map(|v| (v.id.as_str(), v.score)).collect();

        let mut loadings = Vec::new();
        let mut val = Vec::new();
        for (j, f) in Foundation::BASIC.iter().enumerate() {
            let mut groups = [Vec::new(), Vec::new()];
            let mut vgroups = [Vec::new(), Vec::new()];
            for t in &scored {
                let g = match t.lang {
                    Lang::En => 0,
                    Lang::Ja => 1,
                    Lang::Other(_) => continue,
                };
                groups[g].push(t.loading.value(j));
                if t.labels.contains_index(j) {
                    let score = by_id
                        .get(t.id.as_str())
                        .ok_or_else(|| Error::data(STAGE, &vpath, 0, format!("no valence for tweet {}", t.id)))?;
                    vgroups[g].push(*score);
                }
            }
            loadings.push(kw_row(*f, &groups));
            val.push(kw_row(*f, &vgroups));
        }
        let header = ["foundation", "statistic", "df", "p_value", "n_en", "n_ja", "status"];
        self.emit(KW_LOADINGS, csv_bytes(&header, loadings));
        self.emit(KW_VALENCE, csv_bytes(&header, val));
        Ok(())
    }

    fn pca(&self) -> Result<()> {
        const STAGE: &str = "pca";
        let scored = match self.cfg.pca_input {
            PcaInput::Tweets => Some(self.scored(STAGE)?),
            PcaInput::Users => None,
        };
        let mut summary = Vec::new();
        for lang in report_langs() {
            let (samples, names): (Vec<[f64; 5]>, Vec<String>) = match &scored {
                Some(scored) => scored
                    .iter()
                    .filter(|t| t.lang == lang)
                    .map(|t| (t.loading.values(), t.id.clone()))
                    .unzip(),
                None => self
                    .profiles_for(STAGE, &lang)?
                    .into_iter()
                    .map(|p| (p.proportions(), p.user_id))
                    .unzip(),
            };
            let n = samples.len();
            match pca(&samples, self.cfg.pca_mode) {
                Ok(result) => {
                    self.emit_pca(&lang, &result, &names)?;
                    summary.push(vec![lang.to_string(), n.to_string(), "ok".into()]);
                }
                Err(e) => summary.push(vec![lang.to_string(), n.to_string(), format!("{NO_DATA}: {e}")]),
            }
        }
        self.emit(PCA_SUMMARY, csv_bytes(&["lang", "samples", "status"], summary));
        Ok(())
    }

    fn emit_pca(&self, lang: &Lang, result: &PcaResult, names: &[String]) -> Result<()> {
        self.emit(format!("pca_{lang}_scree.csv"), result.scree_csv());
        self.emit(format!("pca_{lang}_heatmap.csv"), result.heatmap_csv());
        for axes in BIPLOT_AXES {
            let table =
                emit_biplot_data(result, axes, Some(names)).map_err(|source| Error::Stats { stage: "pca", source })?;
            let header = [
                "kind".to_string(),
                "name".to_string(),
                format!("PC{}", axes.0),
                format!("PC{}", axes.1),
            ];
            let rows = table
                .rows
                .iter()
                .map(|(kind, name, x, y)| vec![kind.to_string(), name.clone(), x.to_string(), y.to_string()]);
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            self.emit(
                format!("pca_{lang}_biplot_{}_{}.csv", axes.0, axes.1),
                csv_bytes(&header, rows),
            );
            self.emit_svg(format!("fig_biplot_{lang}_{}_{}.svg", axes.0, axes.1), || {
                scatter_svg(&Scatter {
                    title: format!("Biplot ({lang})"),
                    x_label: format!("PC{}", axes.0),
                    y_label: format!("PC{}", axes.1),
                    points: table
                        .rows
                        .iter()
                        .filter(|r| r.0 == "score")
                        .map(|r| (r.2, r.3))
                        .collect(),
                    arrows: table
                        .rows
                        .iter()
                        .filter(|r| r.0 == "loading")
                        .map(|r| (r.1.clone(), r.2, r.3))
                        .collect(),
                })
            });
        }
        self.emit_svg(format!("fig_scree_{lang}.svg"), || {
            bar_chart_svg(&BarChart {
                title: format!("Explained variance ({lang})"),
                y_label: "ratio".into(),
                categories: (1..=5).map(|k| format!("PC{k}")).collect(),
                series: vec![("ratio".into(), result.explained_variance_ratios.to_vec())],
            })
        });
        Ok(())
    }

    fn manifest(&self, hash: &str) -> Result<()> {
        #[derive(Serialize)]
        struct Manifest<'m> {
            tool: &'static str,
            version: &'static str,
            config_hash: &'m str,
            inputs: BTreeMap<String, String>,
            outputs: BTreeMap<String, String>,
        }
        let outputs = self
            .outputs
            .borrow()
            .iter()
            .map(|(k, v)| (k.clone(), hex::encode(Sha256::digest(v))))
            .collect();
        let m = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            config_hash: hash,
            inputs: self.cfg.input_digests()?,
            outputs,
        };
        let mut text = serde_json::to_string_pretty(&m).expect("manifest serializes");
        text.push('\n');
        self.emit(MANIFEST, text);
        Ok(())
    }

    fn commit(self) -> Result<Vec<String>> {
        write_bundle(&self.cfg.out_dir, "commit", self.outputs.into_inner())
    }
}

fn with_pool<T: Send>(threads: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker threads: {e}")))?;
    pool.install(f)
}

fn prepare(cfg: &PipelineConfig, stages: &[Stage]) -> Result<String> {
    cfg.validate()?;
    if stages.iter().any(|s| s.needs_corpus()) {
        cfg.require_corpus()?;
    }
    cfg.hash()
}

/// Runs every stage and writes the complete bundle, including
/// `manifest.json`.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<AnalysisReport> {
    let hash = prepare(cfg, &Stage::ALL)?;
    let files = with_pool(cfg.threads, || {
        let run = Run::new(cfg);
        for stage in Stage::ALL {
            run.run(stage)?;
        }
        run.manifest(&hash)?;
        run.commit()
    })?;
    Ok(AnalysisReport {
        out_dir: cfg.out_dir.clone(),
        files,
        config_hash: hash,
    })
}

/// Runs a single stage against files already in the output directory.
pub fn run_stage(cfg: &PipelineConfig, stage: Stage) -> Result<AnalysisReport> {
    let hash = prepare(cfg, &[stage])?;
    let files = with_pool(cfg.threads, || {
        let run = Run::new(cfg);
        run.run(stage)?;
        run.commit()
    })?;
    Ok(AnalysisReport {
        out_dir: cfg.out_dir.clone(),
        files,
        config_hash: hash,
    })
}

/// Writes a synthetic corpus, its dictionary and the ground-truth sidecar.
pub fn write_synthetic(corpus: &SyntheticCorpus, out_dir: &Path) -> Result<Vec<String>> {
    let mut files = BTreeMap::new();
    let mut jsonl = String::new();
    for r in &corpus.records {
        jsonl.push_str(&serde_json::to_string(r).expect("record serializes"));
        jsonl.push('\n');
    }
    files.insert("corpus.jsonl".to_string(), jsonl.into_bytes());
    files.insert("dictionary.dic".to_string(), corpus.dictionary.clone().into_bytes());
    let mut truth = serde_json::to_string_pretty(&corpus.truth).expect("truth serializes");
    truth.push('\n');
    files.insert("truth.json".to_string(), truth.into_bytes());
    write_bundle(out_dir, "synth", files)
}

/// Writes files through a staging directory so a failure leaves no partial
/// bundle behind.
fn write_bundle(out_dir: &Path, stage: &'static str, files: BTreeMap<String, Vec<u8>>) -> Result<Vec<String>> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(stage, out_dir, e))?;
    let staging = out_dir.join(format!(".staging-{}", std::process::id()));
    let result = (|| {
        std::fs::create_dir_all(&staging).map_err(|e| Error::io(stage, &staging, e))?;
        for (name, bytes) in &files {
            let p = staging.join(name);
            std::fs::write(&p, bytes).map_err(|e| Error::io(stage, &p, e))?;
        }
        for name in files.keys() {
            let target = out_dir.join(name);
            std::fs::rename(staging.join(name), &target).map_err(|e| Error::io(stage, &target, e))?;
        }
        Ok(files.keys().cloned().collect())
    })();
    let _ = std::fs::remove_dir_all(&staging);
    result
}

fn load_corpus(cfg: &PipelineConfig, stage: &'static str) -> Result<Corpus> {
    let mut tagged: Vec<(TweetRecord, usize, usize)> = Vec::new();
    let mut counts: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    for (f, path) in cfg.corpus.iter().enumerate() {
        let text = std::fs::read(path).map_err(|e| Error::io(stage, path, e))?;
        let text = String::from_utf8(text).map_err(|e| Error::data(stage, path, 0, format!("not valid UTF-8: {e}")))?;
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let rec: TweetRecord =
                serde_json::from_str(line).map_err(|e| Error::data(stage, path, i + 1, e.to_string()))?;
            rec.validate().map_err(|m| Error::data(stage, path, i + 1, m))?;
            let keywords = match rec.lang {
                Lang::En => &cfg.keywords_en,
                Lang::Ja => &cfg.keywords_ja,
                Lang::Other(_) => &Vec::new(),
            };
            let keep = keywords.is_empty() || keyword_filter(&rec, keywords);
            let c = counts.entry(rec.lang.to_string()).or_default();
            c.0 += 1;
            if keep {
                c.1 += 1;
                tagged.push((rec, f, i + 1));
            }
        }
    }
    tagged.sort_by(|a, b| a.0.id.cmp(&b.0.id));
    for w in tagged.windows(2) {
        if w[0].0.id == w[1].0.id {
            let (first, later) = if (w[0].1, w[0].2) < (w[1].1, w[1].2) {
                (&w[0], &w[1])
            } else {
                (&w[1], &w[0])
            };
            return Err(Error::data(
                stage,
                &cfg.corpus[later.1],
                later.2,
                format!(
                    "duplicate tweet id `{}` (first seen at {}:{})",
                    later.0.id,
                    cfg.corpus[first.1].display(),
                    first.2
                ),
            ));
        }
    }
    Ok(Corpus {
        records: tagged.into_iter().map(|t| t.0).collect(),
        counts,
    })
}

fn parse_jsonl<T: DeserializeOwned>(stage: &'static str, path: &Path, bytes: &[u8]) -> Result<Vec<T>> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::data(stage, path, 0, format!("not valid UTF-8: {e}")))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::data(stage, path, i + 1, e.to_string())))
        .collect()
}

fn parse_csv<T: DeserializeOwned>(stage: &'static str, path: &Path, bytes: &[u8]) -> Result<Vec<T>> {
    let mut rdr = csv::Reader::from_reader(bytes);
    rdr.deserialize()
        .map(|r| {
            r.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line() as usize);
                Error::data(stage, path, line, e.to_string())
            })
        })
        .collect()
}

fn parse_label(s: &str) -> Result<Foundation, String> {
    let f: Foundation = s.parse()?;
    if f.basic_index().is_none() {
        return Err(format!("`{s}` is not a basic foundation"));
    }
    Ok(f)
}

/// Reads an edge list (`src,dst,weight,src_label,dst_label`). Labels may be
/// empty; repeated pairs accumulate.
pub fn parse_edge_list(stage: &'static str, path: &Path, bytes: &[u8]) -> Result<RetweetNetwork> {
    let mut b = NetworkBuilder::new();
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    let headers = rdr
        .headers()
        .map_err(|e| Error::data(stage, path, 1, e.to_string()))?
        .clone();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            Error::data(stage, path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let err = |m: String| Error::data(stage, path, line, m);
        let row: EdgeRow = record.deserialize(Some(&headers)).map_err(|e| err(e.to_string()))?;
        for (user, label) in [(&row.src, &row.src_label), (&row.dst, &row.dst_label)] {
            let label = if label.is_empty() {
                None
            } else {
                Some(parse_label(label).map_err(err)?)
            };
            b.set_label(user, label).map_err(|e| err(e.to_string()))?;
        }
        b.add_edge(&row.src, &row.dst, row.weight)
            .map_err(|e| err(e.to_string()))?;
    }
    Ok(b.build())
}

pub fn edges_csv(net: &RetweetNetwork) -> Vec<u8> {
    let label = |i: usize| net.nodes()[i].label.map_or(String::new(), |f| f.name().to_string());
    let rows: Vec<EdgeRow> = net
        .edges()
        .map(|(i, j, w)| EdgeRow {
            src: net.nodes()[i].user_id.clone(),
            dst: net.nodes()[j].user_id.clone(),
            weight: w,
            src_label: label(i),
            dst_label: label(j),
        })
        .collect();
    serialize_csv(EDGE_HEADER, &rows)
}

fn serialize_csv<T: Serialize>(header: &str, rows: &[T]) -> Vec<u8> {
    let mut out = format!("{header}\n").into_bytes();
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(&mut out);
    for r in rows {
        w.serialize(r).expect("in-memory CSV write");
    }
    w.flush().expect("in-memory CSV flush");
    drop(w);
    out
}

fn csv_bytes<I>(header: &[&str], rows: I) -> Vec<u8>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory CSV write");
    for r in rows {
        w.write_record(&r).expect("in-memory CSV write");
    }
    w.into_inner().expect("in-memory CSV flush")
}

fn kw_row(f: Foundation, groups: &[Vec<f64>; 2]) -> Vec<String> {
    let sizes = [groups[0].len().to_string(), groups[1].len().to_string()];
    match kruskal_wallis(groups) {
        Ok(r) => vec![
            f.name().to_string(),
            r.statistic.to_string(),
            r.degrees_of_freedom.to_string(),
            r.p_value.to_string(),
            sizes[0].clone(),
            sizes[1].clone(),
            "ok".into(),
        ],
        Err(e) => vec![
            f.name().to_string(),
            NA.into(),
            NA.into(),
            NA.into(),
            sizes[0].clone(),
            sizes[1].clone(),
            format!("{NO_DATA}: {e}"),
        ],
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        f64::NAN
    } else {
        num as f64 / den as f64
    }
}

fn fmt_opt(defined: bool, v: f64) -> String {
    if defined {
        v.to_string()
    } else {
        NA.to_string()
    }
}

fn foundation_names() -> Vec<String> {
    Foundation::BASIC.iter().map(|f| f.name().to_string()).collect()
}

/// Valence of a raw record, as computed by the valence stage.
pub fn record_valence(rec: &TweetRecord, res: &Resources) -> ValenceResult {
    match rec.lang {
        Lang::Ja => valence_ja(&valence_text_ja(&rec.text), &res.valence_ja, &res.valence_cfg),
        _ => valence_en(&tokenize_en(&rec.text), &res.valence_en, &res.valence_cfg),
    }
}
