mod args;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::Parser;
use log::{info, warn};
use serde::Serialize;

use indoamr::classifier::{load_model, save_model, Algorithm, CvReport};
use indoamr::ingest::{load_embeddings, read_amr_corpus, read_conllu, write_amr_corpus, EmbeddingTable};
use indoamr::metrics::corpus_smatch;
use indoamr::pipeline::{
    ablate_features, ablate_rules, align_by_id, corpus_pair_score, predict_corpus, render_cv,
    render_feature_ablation, render_grid, render_pair_score, render_rule_ablation, render_smatch,
    render_stats, render_unmatched, run_grid, train_model, AlignedSentence, DatasetStats, GridSpec,
    TrainConfig,
};

use args::{open, Cli, Command, CorpusArgs, EvalCommand};

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.verbose {
            log::LevelFilter::Info
        } else {
            log::LevelFilter::Warn
        })
        .format_timestamp(None)
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let config = e
                .chain()
                .any(|c| c.downcast_ref::<indoamr::Error>().is_some_and(indoamr::Error::is_config));
            ExitCode::from(if config { 2 } else { 1 })
        }
    }
}

fn read_corpus(c: &CorpusArgs) -> Result<Vec<AlignedSentence>> {
    let sentences = read_conllu(open(&c.conllu)?).with_context(|| format!("reading {}", c.conllu.display()))?;
    let gold = read_amr_corpus(open(&c.amr)?).with_context(|| format!("reading {}", c.amr.display()))?;
    info!("{} annotated sentences, {} gold graphs", sentences.len(), gold.len());
    Ok(align_by_id(sentences, gold)?)
}

fn read_embeddings(path: &Option<PathBuf>) -> Result<Option<Arc<EmbeddingTable>>> {
    path.as_ref()
        .map(|p| {
            let table = load_embeddings(open(p)?).with_context(|| format!("reading {}", p.display()))?;
            info!("{} embeddings of dimension {}", table.len(), table.dimension());
            Ok(Arc::new(table))
        })
        .transpose()
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn write_json<T: Serialize>(path: &Option<PathBuf>, value: &T) -> Result<()> {
    if let Some(path) = path {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct TrainReport<'a> {
    seed: u64,
    model: String,
    rules: String,
    features: String,
    stats: &'a DatasetStats,
    cv: Option<&'a CvReport>,
}

fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed;
    match cli.command {
        Command::Train(a) => {
            let cfg = TrainConfig {
                rules: a.rules.resolve("all")?,
                features: a.features.clone(),
                params: a.model_args.params(Algorithm::Gbt)?,
                seed,
                k: a.k,
            };
            let embeddings = read_embeddings(&a.emb)?;
            let corpus = read_corpus(&a.corpus)?;
            let outcome = train_model(&corpus, embeddings, &cfg)?;
            if cli.verbose {
                eprint!("{}", render_unmatched(&outcome.unmatched));
            }
            let file = fs::File::create(&a.model).with_context(|| format!("writing {}", a.model.display()))?;
            save_model(&outcome.model, io::BufWriter::new(file))?;

            let mut text = format!(
                "# seed={} model={} rules={} features={}\n",
                seed,
                cfg.params.describe(),
                cfg.rules.name(),
                cfg.features
            );
            text.push_str(&render_stats(&outcome.stats));
            if let Some(cv) = &outcome.cv {
                text.push_str(&render_cv(cv));
            }
            emit(&None, &text)?;
            write_json(
                &cli.report_json,
                &TrainReport {
                    seed,
                    model: cfg.params.describe(),
                    rules: cfg.rules.name(),
                    features: cfg.features.to_string(),
                    stats: &outcome.stats,
                    cv: outcome.cv.as_ref(),
                },
            )
        }
        Command::Predict(a) => {
            let mut model = load_model(open(&a.model)?).with_context(|| format!("reading {}", a.model.display()))?;
            if model.encoder.needs_embeddings() {
                match read_embeddings(&a.emb)? {
                    Some(table) => model.encoder.attach_embeddings(table)?,
                    None => {
                        return Err(indoamr::Error::Config(
                            "the model uses lexical features; pass --emb".into(),
                        )
                        .into())
                    }
                }
            }
            let rules = if a.rules.given() {
                a.rules.resolve("all")?
            } else {
                model.rules.clone()
            };
            let sentences = read_conllu(open(&a.conllu)?).with_context(|| format!("reading {}", a.conllu.display()))?;
            let entries = predict_corpus(&sentences, &rules, &model)?;
            info!("predicted {} graphs with rules {}", entries.len(), rules.name());
            emit(&a.out, &write_amr_corpus(&entries))
        }
        Command::Eval(EvalCommand::Smatch(a)) => {
            let preds = read_amr_corpus(open(&a.pred)?).with_context(|| format!("reading {}", a.pred.display()))?;
            let golds = read_amr_corpus(open(&a.amr)?).with_context(|| format!("reading {}", a.amr.display()))?;
            if a.restarts == 0 {
                return Err(indoamr::Error::Config("restarts must be at least 1".into()).into());
            }
            let report = corpus_smatch(&preds, &golds, a.restarts, seed)?;
            emit(&a.out, &render_smatch(&report))?;
            write_json(&cli.report_json, &report)
        }
        Command::Eval(EvalCommand::Pairs(a)) => {
            let rules = a.rules.resolve("all")?;
            let corpus = read_corpus(&a.corpus)?;
            let score = corpus_pair_score(&corpus, &rules);
            let text = format!("# rules={}\n{}", rules.name(), render_pair_score(&score));
            emit(&a.out, &text)?;
            write_json(&cli.report_json, &score)
        }
        Command::AblateRules(a) => {
            let base = match &a.rules_file {
                Some(p) => indoamr::pairgen::FilterRuleSet::from_json(open(p)?)
                    .with_context(|| format!("reading {}", p.display()))?,
                None => indoamr::pairgen::FilterRuleSet::default(),
            };
            let corpus = read_corpus(&a.corpus)?;
            let report = ablate_rules(&corpus, &base);
            emit(&a.out, &render_rule_ablation(&report))?;
            write_json(&cli.report_json, &report)
        }
        Command::AblateFeatures(a) => {
            let rules = a.rules.resolve("all")?;
            let params = a.model_args.params(Algorithm::Dt)?;
            let embeddings = read_embeddings(&a.emb)?;
            if embeddings.is_none() {
                warn!("no embedding file; rows with lexical features need one");
            }
            let corpus = read_corpus(&a.corpus)?;
            let report = ablate_features(&corpus, embeddings, &rules, &params, a.k, seed)?;
            emit(&a.out, &render_feature_ablation(&report))?;
            write_json(&cli.report_json, &report)
        }
        Command::Grid(a) => {
            let rules = a.rules.resolve("all")?;
            let text = fs::read_to_string(&a.grid_file)
                .with_context(|| format!("cannot open {}", a.grid_file.display()))?;
            let grid = GridSpec::from_json(
                &text,
                a.model_args.algorithm(Algorithm::Gbt)?,
                &a.model_args.tree_params()?,
                &a.model_args.gbt_params()?,
            )?;
            let embeddings = read_embeddings(&a.emb)?;
            let corpus = read_corpus(&a.corpus)?;
            let report = run_grid(&corpus, embeddings, &rules, &a.features, &grid, a.k, seed)?;
            emit(&a.out, &render_grid(&report))?;
            write_json(&cli.report_json, &report)
        }
    }
}
