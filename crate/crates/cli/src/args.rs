use std::fs::File;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use indoamr::classifier::{Algorithm, Criterion, GbtParams, ModelParams, TreeParams};
use indoamr::features::FeatureConfig;
use indoamr::pairgen::{parse_rule_selection, FilterRuleSet};
use indoamr::pipeline::{DEFAULT_FOLDS, DEFAULT_SEED};
use indoamr::metrics::DEFAULT_RESTARTS;

#[derive(Debug, Parser)]
#[command(name = "indoamr", version, about = "Indonesian AMR parsing from dependency-annotated sentences")]
pub struct Cli {
    /// Seed for every random choice (fold shuffles, SMATCH restarts).
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Also write the report as JSON to this file.
    #[arg(long, global = true, value_name = "PATH")]
    pub report_json: Option<PathBuf>,

    /// Log progress and per-sentence diagnostics to stderr.
    #[arg(long, short, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a label classifier and write a model file.
    Train(TrainArgs),
    /// Parse annotated sentences into AMR graphs with a trained model.
    Predict(PredictArgs),
    /// Score predictions against gold graphs.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Pair scores for all eight filter rule combinations.
    AblateRules(AblateRulesArgs),
    /// Cross-validated scores for the five feature category combinations.
    AblateFeatures(AblateFeaturesArgs),
    /// Cross-validated hyperparameter sweep ranked by F1-macro.
    Grid(GridArgs),
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Corpus SMATCH of predicted graphs against gold graphs.
    Smatch(SmatchArgs),
    /// Precision, recall and F1 of kept dependency pairs against gold edges.
    Pairs(PairsArgs),
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Extended CoNLL-U file (lemma, UPOS, head, deprel, NER in MISC).
    #[arg(long, value_name = "PATH")]
    pub conllu: PathBuf,
    /// Gold AMR corpus aligned with the CoNLL-U file by sentence id.
    #[arg(long, value_name = "PATH")]
    pub amr: PathBuf,
}

#[derive(Debug, Args)]
pub struct RuleArgs {
    /// Filter rules to enable: "all", "none" or a list such as "det,prep".
    #[arg(long, value_name = "RULES")]
    pub rules: Option<String>,
    /// JSON file overriding rule word lists, tag sets and switches.
    #[arg(long, value_name = "PATH")]
    pub rules_file: Option<PathBuf>,
}

impl RuleArgs {
    /// Rules from the file (or the defaults), with `--rules` deciding which
    /// are enabled. Without either flag, `fallback` decides.
    pub fn resolve(&self, fallback: &str) -> Result<FilterRuleSet> {
        let mut set = match &self.rules_file {
            Some(path) => FilterRuleSet::from_json(open(path)?)
                .with_context(|| format!("reading {}", path.display()))?,
            None => FilterRuleSet::default(),
        };
        match (&self.rules, &self.rules_file) {
            (Some(sel), _) => set.select(&parse_rule_selection(sel)?),
            (None, None) => set.select(&parse_rule_selection(fallback)?),
            (None, Some(_)) => {}
        }
        Ok(set)
    }

    pub fn given(&self) -> bool {
        self.rules.is_some() || self.rules_file.is_some()
    }
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Learning algorithm: dt or gbt.
    #[arg(long, value_name = "ALGO")]
    pub algo: Option<String>,
    /// Maximum tree depth.
    #[arg(long, value_name = "N")]
    pub max_depth: Option<usize>,
    /// Split criterion for dt: gini or entropy.
    #[arg(long, value_name = "NAME")]
    pub criterion: Option<String>,
    /// Learning rate for gbt.
    #[arg(long, value_name = "RATE")]
    pub lr: Option<f64>,
    /// Boosting rounds for gbt.
    #[arg(long, value_name = "N")]
    pub rounds: Option<usize>,
}

impl ModelArgs {
    pub fn algorithm(&self, fallback: Algorithm) -> Result<Algorithm> {
        let a = match &self.algo {
            Some(s) => s.parse()?,
            None => fallback,
        };
        a.ensure_supported()?;
        Ok(a)
    }

    pub fn tree_params(&self) -> Result<TreeParams> {
        let mut p = TreeParams::default();
        if let Some(d) = self.max_depth {
            p.max_depth = d;
        }
        if let Some(c) = &self.criterion {
            p.criterion = c.parse::<Criterion>()?;
        }
        p.validate()?;
        Ok(p)
    }

    pub fn gbt_params(&self) -> Result<GbtParams> {
        let mut p = GbtParams::default();
        if let Some(d) = self.max_depth {
            p.max_depth = d;
        }
        if let Some(lr) = self.lr {
            p.learning_rate = lr;
        }
        if let Some(r) = self.rounds {
            p.n_rounds = r;
        }
        p.validate()?;
        Ok(p)
    }

    pub fn params(&self, fallback: Algorithm) -> Result<ModelParams> {
        Ok(match self.algorithm(fallback)? {
            Algorithm::Dt => ModelParams::Dt(self.tree_params()?),
            _ => ModelParams::Gbt(self.gbt_params()?),
        })
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Word embedding file (word2vec text format); needed for lexical features.
    #[arg(long, value_name = "PATH")]
    pub emb: Option<PathBuf>,
    /// Where to write the model file.
    #[arg(long, value_name = "PATH")]
    pub model: PathBuf,
    #[command(flatten)]
    pub rules: RuleArgs,
    /// Feature categories: any of lex, syn, pos.
    #[arg(long, default_value = "lex,syn")]
    pub features: FeatureConfig,
    #[command(flatten)]
    pub model_args: ModelArgs,
    /// Cross-validate with this many folds before the final fit.
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long, value_name = "PATH")]
    pub conllu: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub model: PathBuf,
    #[arg(long, value_name = "PATH")]
    pub emb: Option<PathBuf>,
    /// Output AMR corpus; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Override the filter rules stored in the model.
    #[command(flatten)]
    pub rules: RuleArgs,
}

#[derive(Debug, Args)]
pub struct SmatchArgs {
    /// Predicted AMR corpus.
    #[arg(long, value_name = "PATH")]
    pub pred: PathBuf,
    /// Gold AMR corpus.
    #[arg(long, value_name = "PATH")]
    pub amr: PathBuf,
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    pub restarts: usize,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PairsArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub rules: RuleArgs,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AblateRulesArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// JSON file overriding rule word lists and tag sets.
    #[arg(long, value_name = "PATH")]
    pub rules_file: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AblateFeaturesArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long, value_name = "PATH")]
    pub emb: Option<PathBuf>,
    #[command(flatten)]
    pub rules: RuleArgs,
    #[command(flatten)]
    pub model_args: ModelArgs,
    #[arg(long, default_value_t = DEFAULT_FOLDS)]
    pub k: usize,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long, value_name = "PATH")]
    pub emb: Option<PathBuf>,
    /// JSON grid: parameter name to list of values.
    #[arg(long, value_name = "PATH")]
    pub grid_file: PathBuf,
    #[command(flatten)]
    pub rules: RuleArgs,
    #[arg(long, default_value = "lex,syn")]
    pub features: FeatureConfig,
    /// Base values for parameters the grid does not sweep.
    #[command(flatten)]
    pub model_args: ModelArgs,
    #[arg(long, default_value_t = DEFAULT_FOLDS)]
    pub k: usize,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

pub fn open(path: &PathBuf) -> Result<std::io::BufReader<File>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(std::io::BufReader::new(f))
}
