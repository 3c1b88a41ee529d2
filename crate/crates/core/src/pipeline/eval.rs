use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

use super::{encoded_dataset, AlignedSentence};
use crate::classifier::{cross_validate, ModelParams};
use crate::error::Result;
use crate::features::FeatureConfig;
use crate::ingest::EmbeddingTable;
use crate::metrics::{pair_f1, CorpusSmatch, PairScore, Prf};
use crate::pairgen::{apply_filter, extract_pairs, FilterRule, FilterRuleSet};

/// Pair precision/recall/F1 summed over the corpus: kept dependency pairs
/// against gold edges, both as (parent, child) lemma/concept pairs.
pub fn corpus_pair_score(corpus: &[AlignedSentence], rules: &FilterRuleSet) -> PairScore {
    let (mut matched, mut predicted, mut gold) = (0, 0, 0);
    for a in corpus {
        let kept = apply_filter(&extract_pairs(&a.sentence), rules);
        let pred: Vec<(&str, &str)> = kept
            .iter()
            .map(|p| (p.parent.lemma.as_str(), p.child.lemma.as_str()))
            .collect();
        let edges = a.gold.graph.concept_edges();
        let gold_pairs: Vec<(&str, &str)> = edges.iter().map(|&(s, t, _)| (s, t)).collect();
        let s = pair_f1(&pred, &gold_pairs);
        matched += s.matched;
        predicted += s.predicted_total;
        gold += s.gold_total;
    }
    Prf::from_counts(matched, predicted, gold)
}

pub fn render_pair_score(s: &PairScore) -> String {
    format!(
        "precision\trecall\tf1\tmatched\tpredicted\tgold\n{:.6}\t{:.6}\t{:.6}\t{}\t{}\t{}\n",
        s.precision, s.recall, s.f1, s.matched, s.predicted_total, s.gold_total
    )
}

/// Per-sentence lines followed by the corpus line.
pub fn render_smatch(c: &CorpusSmatch) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# restarts={} seed={}", c.restarts, c.seed);
    let _ = writeln!(out, "id\tprecision\trecall\tf1\tmatched\tpredicted\tgold");
    let mut line = |id: &str, s: &Prf| {
        let _ = writeln!(
            out,
            "{id}\t{:.6}\t{:.6}\t{:.6}\t{}\t{}\t{}",
            s.precision, s.recall, s.f1, s.matched, s.predicted_total, s.gold_total
        );
    };
    for s in &c.sentences {
        line(&s.id, &s.score);
    }
    line("corpus", &c.total);
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RuleAblationRow {
    pub no: usize,
    pub determiner: bool,
    pub preposition: bool,
    pub subordinate_conjunction: bool,
    pub rules: String,
    #[serde(flatten)]
    pub score: PairScore,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RuleAblation {
    pub rows: Vec<RuleAblationRow>,
}

/// Pair scores for all eight on/off combinations of the three rules, with
/// the word lists and tag sets of `base`.
pub fn ablate_rules(corpus: &[AlignedSentence], base: &FilterRuleSet) -> RuleAblation {
    let rows = base
        .combinations()
        .into_iter()
        .enumerate()
        .map(|(no, rules)| {
            let enabled = rules.enabled();
            RuleAblationRow {
                no,
                determiner: enabled.contains(&FilterRule::Determiner),
                preposition: enabled.contains(&FilterRule::Preposition),
                subordinate_conjunction: enabled.contains(&FilterRule::SubordinateConjunction),
                rules: rules.name(),
                score: corpus_pair_score(corpus, &rules),
            }
        })
        .collect();
    RuleAblation { rows }
}

fn mark(b: bool) -> &'static str {
    if b {
        "x"
    } else {
        "-"
    }
}

pub fn render_rule_ablation(r: &RuleAblation) -> String {
    let mut out = String::from("no\tdeterminer\tpreposition\tsconj\tprecision\trecall\tf1\n");
    for row in &r.rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}",
            row.no,
            mark(row.determiner),
            mark(row.preposition),
            mark(row.subordinate_conjunction),
            row.score.precision,
            row.score.recall,
            row.score.f1
        );
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeatureAblationRow {
    pub no: usize,
    pub features: FeatureConfig,
    pub examples: usize,
    pub dimension: usize,
    pub accuracy: f64,
    pub f1_macro: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeatureAblation {
    pub k: usize,
    pub seed: u64,
    pub model: String,
    pub rules: String,
    pub rows: Vec<FeatureAblationRow>,
}

/// Cross-validated accuracy and F1-macro for the five feature category
/// combinations. Every row uses the same folds.
pub fn ablate_features(
    corpus: &[AlignedSentence],
    embeddings: Option<Arc<EmbeddingTable>>,
    rules: &FilterRuleSet,
    params: &ModelParams,
    k: usize,
    seed: u64,
) -> Result<FeatureAblation> {
    let mut rows = Vec::new();
    for (no, features) in FeatureConfig::ablation_combinations().into_iter().enumerate() {
        let (set, encoder, ds) = encoded_dataset(corpus, rules, &features, embeddings.clone())?;
        let cv = cross_validate(&ds, params, k, seed)?;
        rows.push(FeatureAblationRow {
            no: no + 1,
            features,
            examples: set.examples.len(),
            dimension: encoder.dimension(),
            accuracy: cv.mean_accuracy,
            f1_macro: cv.mean_f1_macro,
        });
    }
    Ok(FeatureAblation {
        k,
        seed,
        model: params.describe(),
        rules: rules.name(),
        rows,
    })
}

pub fn render_feature_ablation(r: &FeatureAblation) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# model={} rules={} k={} seed={}", r.model, r.rules, r.k, r.seed);
    out.push_str("no\tlexical\tsyntactic\tpositional\taccuracy\tf1_macro\n");
    for row in &r.rows {
        use crate::features::FeatureCategory::*;
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{:.6}\t{:.6}",
            row.no,
            mark(row.features.has(Lexical)),
            mark(row.features.has(Syntactic)),
            mark(row.features.has(Positional)),
            row.accuracy,
            row.f1_macro
        );
    }
    out
}
