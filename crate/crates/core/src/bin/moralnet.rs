use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use moralnet::config::PcaInput;
use moralnet::pipeline::{self, Stage};
use moralnet::stats::PcaMode;
use moralnet::synth::{generate_synthetic, SyntheticSpec};
use moralnet::{network_homophily, CountMode, DictFormat, Error, MultilabelMode, PipelineConfig};

/// Moral-foundation scoring and retweet-network homophily.
#[derive(Debug, Parser)]
#[command(name = "moralnet", version, propagate_version = true)]
struct Cli {
    #[command(flatten)]
    opts: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

/// Flags override values loaded with --config.
#[derive(Debug, Args)]
struct ConfigArgs {
    /// TOML configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Corpus JSONL file (repeatable)
    #[arg(long, global = true)]
    corpus: Vec<PathBuf>,
    #[arg(long, global = true)]
    dict_en: Option<PathBuf>,
    /// liwc or tsv
    #[arg(long, global = true)]
    dict_en_format: Option<DictFormat>,
    #[arg(long, global = true)]
    dict_ja: Option<PathBuf>,
    #[arg(long, global = true)]
    dict_ja_format: Option<DictFormat>,
    /// Extra category-name mappings for LIWC headers
    #[arg(long, global = true)]
    category_names: Option<PathBuf>,
    #[arg(long, global = true)]
    valence_en: Option<PathBuf>,
    #[arg(long, global = true)]
    valence_ja: Option<PathBuf>,
    #[arg(long, global = true)]
    stopwords: Option<PathBuf>,
    /// Comma-separated collection keywords for English records
    #[arg(long, global = true, value_delimiter = ',')]
    keywords_en: Option<Vec<String>>,
    /// Comma-separated collection keywords for Japanese records
    #[arg(long, global = true, value_delimiter = ',')]
    keywords_ja: Option<Vec<String>>,
    /// each or drop
    #[arg(long, global = true)]
    multilabel: Option<MultilabelMode>,
    /// multiset or set
    #[arg(long, global = true)]
    count_mode: Option<CountMode>,
    /// covariance or correlation
    #[arg(long, global = true)]
    pca_mode: Option<PcaMode>,
    /// tweets or users
    #[arg(long, global = true)]
    pca_input: Option<PcaInput>,
    #[arg(long, global = true)]
    kcore: Option<usize>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Skip SVG figures
    #[arg(long, global = true)]
    no_svg: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score the corpus against the moral dictionaries
    Score,
    /// Valence of every scored tweet
    Valence,
    /// Per-user moral profiles and labels
    Profiles,
    /// Retweet networks among labelled users
    Network,
    /// Homophily per foundation
    Homophily {
        /// Read this edge list and print the result instead of using the output directory
        #[arg(long)]
        edges: Option<PathBuf>,
    },
    /// Kruskal-Wallis tests between languages
    Stats,
    /// Principal component analysis of the loadings
    Pca,
    /// Generate a synthetic corpus with planted labels and homophily
    Synth {
        /// TOML file with generator settings
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        users: Option<usize>,
        /// Planted same-label share of retweet weight
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        retweets_per_node: Option<u32>,
    },
    /// Run every stage and write the full report with a manifest
    Report,
}

impl ConfigArgs {
    fn resolve(self) -> Result<PipelineConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => PipelineConfig::load(path)?,
            None => PipelineConfig::default(),
        };
        if !self.corpus.is_empty() {
            cfg.corpus = self.corpus;
        }
        macro_rules! set {
            ($($field:ident => $target:ident),* $(,)?) => {
                $(if let Some(v) = self.$field { cfg.$target = v; })*
            };
        }
        macro_rules! set_some {
            ($($field:ident),* $(,)?) => {
                $(if let Some(v) = self.$field { cfg.$field = Some(v); })*
            };
        }
        set_some!(dict_en, dict_ja, category_names, valence_en, valence_ja, stopwords);
        set!(
            dict_en_format => dict_en_format,
            dict_ja_format => dict_ja_format,
            keywords_en => keywords_en,
            keywords_ja => keywords_ja,
            multilabel => multilabel,
            count_mode => count_mode,
            pca_mode => pca_mode,
            pca_input => pca_input,
            kcore => kcore,
            out => out_dir,
            seed => seed,
            threads => threads,
        );
        if self.no_svg {
            cfg.svg = false;
        }
        Ok(cfg)
    }
}

fn synth(
    cfg: &PipelineConfig,
    spec: Option<PathBuf>,
    users: Option<usize>,
    p: Option<f64>,
    retweets_per_node: Option<u32>,
) -> Result<(), Error> {
    let mut s = match spec {
        Some(path) => {
            let text = std::fs::read_to_string(&path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        }
        None => SyntheticSpec::default(),
    };
    if let Some(n) = users {
        s.n_users = n;
    }
    if let Some(p) = p {
        s.planted_p = p;
    }
    if let Some(t) = retweets_per_node {
        s.retweets_per_node = t;
    }
    let corpus = generate_synthetic(&s, cfg.seed)?;
    let files = pipeline::write_synthetic(&corpus, &cfg.out_dir)?;
    println!(
        "wrote {} to {} ({} records, realised p = {})",
        files.join(", "),
        cfg.out_dir.display(),
        corpus.records.len(),
        corpus.truth.realised_p
    );
    Ok(())
}

fn homophily_of_file(path: &PathBuf) -> Result<(), Error> {
    let bytes = std::fs::read(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let net = pipeline::parse_edge_list("homophily", path, &bytes)?;
    let report = network_homophily(&net);
    println!("foundation,nodes,homophily");
    for f in &report.foundations {
        let score = f.score.map_or("NA".to_string(), |s| s.to_string());
        println!("{},{},{}", f.foundation.name(), f.n_nodes, score);
    }
    println!();
    println!("user_id,label,h");
    for n in &report.nodes {
        println!("{},{},{}", n.user_id, n.label.name(), n.value);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    let cfg = cli.opts.resolve()?;
    let stage = match cli.command {
        Command::Report => {
            let report = pipeline::run_pipeline(&cfg)?;
            println!(
                "wrote {} files to {} (config {})",
                report.files.len(),
                report.out_dir.display(),
                report.config_hash
            );
            return Ok(());
        }
        Command::Synth {
            spec,
            users,
            p,
            retweets_per_node,
        } => return synth(&cfg, spec, users, p, retweets_per_node),
        Command::Homophily { edges: Some(path) } => return homophily_of_file(&path),
        Command::Homophily { edges: None } => Stage::Homophily,
        Command::Score => Stage::Score,
        Command::Valence => Stage::Valence,
        Command::Profiles => Stage::Profiles,
        Command::Network => Stage::Network,
        Command::Stats => Stage::Stats,
        Command::Pca => Stage::Pca,
    };
    let report = pipeline::run_stage(&cfg, stage)?;
    println!("{stage}: wrote {}", report.files.join(", "));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("moralnet: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
