//! End-to-end commands: training, prediction, evaluation and the three
//! experiment harnesses (rule ablation, feature ablation, grid search).
//!
//! Everything here works on in-memory corpora and returns report values; the
//! binary only reads files and prints.

mod eval;
mod grid;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

use crate::amr::EdgeLabel;
use crate::classifier::{cross_validate, train, CvReport, Dataset, GbtParams, ModelFile, ModelParams};
use crate::constructor::{build_graph, LabeledPair};
use crate::error::{Error, Result};
use crate::features::{combine_features, fit_encoder, match_pairs_detailed, FeatureCategory, FeatureConfig, FeatureEncoder, LabeledExample};
use crate::ingest::{AmrEntry, AnnotatedSentence, EmbeddingTable};
use crate::pairgen::{apply_filter, extract_pairs, DepPair, FilterRuleSet};

pub use eval::{
    ablate_features, ablate_rules, corpus_pair_score, render_feature_ablation, render_pair_score,
    render_rule_ablation, render_smatch, FeatureAblation, FeatureAblationRow, RuleAblation,
    RuleAblationRow,
};
pub use grid::{render_grid, run_grid, GridCell, GridReport, GridSpec};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_FOLDS: usize = 5;

/// A sentence with its gold graph.
#[derive(Clone, Debug, PartialEq)]
pub struct AlignedSentence {
    pub sentence: AnnotatedSentence,
    pub gold: AmrEntry,
}

/// Pairs annotated sentences with gold entries by id, in sentence order.
/// Every sentence needs exactly one gold entry and vice versa.
pub fn align_by_id(sentences: Vec<AnnotatedSentence>, gold: Vec<AmrEntry>) -> Result<Vec<AlignedSentence>> {
    let mut by_id: BTreeMap<String, AmrEntry> = BTreeMap::new();
    for entry in gold {
        let id = entry.id.clone();
        if by_id.insert(id.clone(), entry).is_some() {
            return Err(Error::Alignment {
                sentence_id: id,
                message: "appears twice in the gold corpus".into(),
            });
        }
    }
    let mut out = Vec::with_capacity(sentences.len());
    for sentence in sentences {
        let gold = by_id.remove(&sentence.id).ok_or_else(|| Error::Alignment {
            sentence_id: sentence.id.clone(),
            message: "has no gold graph".into(),
        })?;
        out.push(AlignedSentence { sentence, gold });
    }
    if let Some(id) = by_id.into_keys().next() {
        return Err(Error::Alignment {
            sentence_id: id,
            message: "has a gold graph but no annotated sentence".into(),
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct DatasetStats {
    pub sentences: usize,
    /// Dependency pairs before filtering.
    pub pairs: usize,
    /// Pairs surviving the filter rules.
    pub kept_pairs: usize,
    /// Kept pairs that aligned with a gold edge.
    pub examples: usize,
    pub unmatched_gold_edges: usize,
    pub label_counts: BTreeMap<String, usize>,
}

/// Gold edges of one sentence that no kept pair aligned with.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnmatchedGold {
    pub sentence_id: String,
    pub edges: Vec<(String, String, EdgeLabel)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingSet {
    pub examples: Vec<LabeledExample>,
    pub stats: DatasetStats,
    pub unmatched: Vec<UnmatchedGold>,
}

/// Extracts, filters and labels pairs for every aligned sentence.
pub fn training_set(corpus: &[AlignedSentence], rules: &FilterRuleSet) -> TrainingSet {
    let mut examples = Vec::new();
    let mut stats = DatasetStats {
        sentences: corpus.len(),
        ..DatasetStats::default()
    };
    let mut unmatched = Vec::new();
    for a in corpus {
        let pairs = extract_pairs(&a.sentence);
        let kept = apply_filter(&pairs, rules);
        stats.pairs += pairs.len();
        stats.kept_pairs += kept.len();
        let m = match_pairs_detailed(&combine_features(&a.sentence, &kept), &a.gold.graph);
        stats.unmatched_gold_edges += m.unmatched_gold.len();
        if !m.unmatched_gold.is_empty() {
            unmatched.push(UnmatchedGold {
                sentence_id: a.sentence.id.clone(),
                edges: m.unmatched_gold,
            });
        }
        examples.extend(m.examples);
    }
    stats.examples = examples.len();
    for e in &examples {
        *stats.label_counts.entry(e.label.as_str().to_string()).or_default() += 1;
    }
    TrainingSet {
        examples,
        stats,
        unmatched,
    }
}

/// Names of the six classes in class-index order.
pub fn class_names() -> Vec<String> {
    EdgeLabel::CLOSED.iter().map(|l| l.as_str().to_string()).collect()
}

/// Encodes labeled examples into a classifier dataset over the six classes.
pub fn to_dataset(encoder: &FeatureEncoder, examples: &[LabeledExample]) -> Result<Dataset> {
    encoder.check_ready()?;
    let mut rows = Vec::with_capacity(examples.len());
    let mut labels = Vec::with_capacity(examples.len());
    for e in examples {
        let class = e
            .label
            .class_index()
            .ok_or_else(|| Error::Data(format!("label {} is outside the label set", e.label)))?;
        rows.push(encoder.encode(&e.features));
        labels.push(class);
    }
    Dataset::new(rows, labels, class_names())
}

fn check_embeddings(features: &FeatureConfig, embeddings: &Option<Arc<EmbeddingTable>>) -> Result<()> {
    if features.has(FeatureCategory::Lexical) && embeddings.is_none() {
        return Err(Error::Config(
            "lexical features are enabled but no embedding file was given".into(),
        ));
    }
    Ok(())
}

fn encoded_dataset(
    corpus: &[AlignedSentence],
    rules: &FilterRuleSet,
    features: &FeatureConfig,
    embeddings: Option<Arc<EmbeddingTable>>,
) -> Result<(TrainingSet, FeatureEncoder, Dataset)> {
    check_embeddings(features, &embeddings)?;
    let set = training_set(corpus, rules);
    if set.examples.is_empty() {
        return Err(Error::Data(
            "no training examples: no kept dependency pair matches a gold edge".into(),
        ));
    }
    let encoder = fit_encoder(&set.examples, features, embeddings)?;
    let ds = to_dataset(&encoder, &set.examples)?;
    Ok((set, encoder, ds))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub rules: FilterRuleSet,
    pub features: FeatureConfig,
    pub params: ModelParams,
    pub seed: u64,
    /// Run k-fold cross-validation before the final fit.
    pub k: Option<usize>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            rules: FilterRuleSet::all(),
            features: FeatureConfig::new([FeatureCategory::Lexical, FeatureCategory::Syntactic])
                .expect("non-empty"),
            params: ModelParams::Gbt(GbtParams::default()),
            seed: DEFAULT_SEED,
            k: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainOutcome {
    pub model: ModelFile,
    pub stats: DatasetStats,
    pub unmatched: Vec<UnmatchedGold>,
    pub cv: Option<CvReport>,
}

/// Builds the training set, optionally cross-validates, then fits on
/// everything.
pub fn train_model(
    corpus: &[AlignedSentence],
    embeddings: Option<Arc<EmbeddingTable>>,
    cfg: &TrainConfig,
) -> Result<TrainOutcome> {
    let (set, encoder, ds) = encoded_dataset(corpus, &cfg.rules, &cfg.features, embeddings)?;
    let cv = cfg
        .k
        .map(|k| cross_validate(&ds, &cfg.params, k, cfg.seed))
        .transpose()?;
    let classifier = train(&ds, &cfg.params, cfg.seed)?;
    Ok(TrainOutcome {
        model: ModelFile::new(cfg.seed, cfg.params.clone(), cfg.rules.clone(), encoder, classifier),
        stats: set.stats,
        unmatched: set.unmatched,
        cv,
    })
}

/// Anything that can label the kept pairs of a sentence.
pub trait PairLabeler {
    /// One `(label, confidence)` per pair, in pair order.
    fn label_pairs(&self, sentence: &AnnotatedSentence, pairs: &[DepPair]) -> Result<Vec<(EdgeLabel, f64)>>;
}

impl PairLabeler for ModelFile {
    fn label_pairs(&self, sentence: &AnnotatedSentence, pairs: &[DepPair]) -> Result<Vec<(EdgeLabel, f64)>> {
        self.encoder.check_ready()?;
        let classes = self.classifier.classes();
        combine_features(sentence, pairs)
            .iter()
            .map(|f| {
                let p = self.classifier.predict(&self.encoder.encode(f))?;
                Ok((EdgeLabel::from_role(&classes[p.class]), p.confidence()))
            })
            .collect()
    }
}

/// Filters, labels and assembles one sentence.
pub fn predict_sentence<L: PairLabeler + ?Sized>(
    sentence: &AnnotatedSentence,
    rules: &FilterRuleSet,
    labeler: &L,
) -> Result<AmrEntry> {
    let kept = apply_filter(&extract_pairs(sentence), rules);
    let labels = labeler.label_pairs(sentence, &kept)?;
    if labels.len() != kept.len() {
        return Err(Error::Model(format!(
            "labeler returned {} labels for {} pairs",
            labels.len(),
            kept.len()
        )));
    }
    let labeled: Vec<LabeledPair> = kept
        .into_iter()
        .zip(labels)
        .map(|(pair, (label, confidence))| LabeledPair {
            pair,
            label,
            confidence,
        })
        .collect();
    Ok(AmrEntry {
        id: sentence.id.clone(),
        sentence: sentence.text.clone(),
        graph: build_graph(&labeled, sentence)?,
    })
}

/// One entry per sentence, ids and order preserved.
pub fn predict_corpus<L: PairLabeler + ?Sized>(
    sentences: &[AnnotatedSentence],
    rules: &FilterRuleSet,
    labeler: &L,
) -> Result<Vec<AmrEntry>> {
    sentences
        .iter()
        .map(|s| predict_sentence(s, rules, labeler))
        .collect()
}

pub fn render_stats(stats: &DatasetStats) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "sentences\t{}", stats.sentences);
    let _ = writeln!(out, "pairs\t{}", stats.pairs);
    let _ = writeln!(out, "kept_pairs\t{}", stats.kept_pairs);
    let _ = writeln!(out, "examples\t{}", stats.examples);
    let _ = writeln!(out, "unmatched_gold_edges\t{}", stats.unmatched_gold_edges);
    for (label, n) in &stats.label_counts {
        let _ = writeln!(out, "label\t{label}\t{n}");
    }
    out
}

pub fn render_cv(cv: &CvReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# cross-validation k={} seed={} stratified={}",
        cv.k, cv.seed, cv.stratified
    );
    let _ = writeln!(out, "fold\ttrain\tvalidation\taccuracy\tf1_macro");
    for f in &cv.folds {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{:.6}\t{:.6}",
            f.fold, f.train_size, f.validation_size, f.accuracy, f.f1_macro
        );
    }
    let _ = writeln!(out, "mean\t\t\t{:.6}\t{:.6}", cv.mean_accuracy, cv.mean_f1_macro);
    out
}

pub fn render_unmatched(unmatched: &[UnmatchedGold]) -> String {
    let mut out = String::new();
    for u in unmatched {
        for (s, t, l) in &u.edges {
            let _ = writeln!(out, "unmatched\t{}\t{s}\t{l}\t{t}", u.sentence_id);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amr::AmrGraph;
    use crate::ingest::Token;

    fn tok(index: usize, lemma: &str, upos: &str, head: usize, deprel: &str) -> Token {
        Token {
            index,
            form: lemma.into(),
            lemma: lemma.into(),
            upos: upos.into(),
            ner: "O".into(),
            head,
            deprel: deprel.into(),
        }
    }

    fn aligned(id: &str, tokens: Vec<Token>, gold: &str) -> AlignedSentence {
        AlignedSentence {
            sentence: AnnotatedSentence {
                id: id.into(),
                text: String::new(),
                tokens,
            },
            gold: AmrEntry {
                id: id.into(),
                sentence: String::new(),
                graph: gold.parse::<AmrGraph>().unwrap(),
            },
        }
    }

    fn makan() -> AlignedSentence {
        aligned(
            "s1",
            vec![
                tok(1, "aku", "PRON", 2, "nsubj"),
                tok(2, "makan", "VERB", 0, "root"),
                tok(3, "kue", "NOUN", 2, "obj"),
                tok(4, "di", "ADP", 5, "case"),
                tok(5, "teras", "NOUN", 2, "obl"),
            ],
            "(m / makan :ARG0 (a / aku) :ARG1 (k / kue) :location (t / teras))",
        )
    }

    #[test]
    fn alignment_errors() {
        let a = makan();
        let ok = align_by_id(vec![a.sentence.clone()], vec![a.gold.clone()]).unwrap();
        assert_eq!(ok.len(), 1);
        let missing = align_by_id(vec![a.sentence.clone()], vec![]).unwrap_err();
        assert!(matches!(missing, Error::Alignment { .. }));
        let extra = align_by_id(vec![], vec![a.gold.clone()]).unwrap_err();
        assert!(extra.to_string().contains("no annotated sentence"));
        let dup = align_by_id(vec![a.sentence.clone()], vec![a.gold.clone(), a.gold]).unwrap_err();
        assert!(dup.to_string().contains("twice"));
    }

    #[test]
    fn training_set_counts() {
        let set = training_set(&[makan()], &FilterRuleSet::all());
        assert_eq!(set.stats.pairs, 4);
        assert_eq!(set.stats.kept_pairs, 3);
        assert_eq!(set.stats.examples, 3);
        assert_eq!(set.stats.unmatched_gold_edges, 0);
        assert_eq!(set.stats.label_counts["location"], 1);

        let none = training_set(&[makan()], &FilterRuleSet::default());
        assert_eq!(none.stats.kept_pairs, 4);
        assert_eq!(none.stats.examples, 3);
    }

    #[test]
    fn lexical_without_embeddings_is_a_config_error() {
        let e = train_model(&[makan()], None, &TrainConfig::default()).unwrap_err();
        assert!(e.is_config(), "{e}");
    }

    #[test]
    fn no_examples_is_a_data_error() {
        let a = aligned("x", vec![tok(1, "tidur", "VERB", 0, "root")], "(t / tidur)");
        let cfg = TrainConfig {
            features: "syn".parse().unwrap(),
            ..TrainConfig::default()
        };
        let e = train_model(&[a], None, &cfg).unwrap_err();
        assert!(matches!(e, Error::Data(_)), "{e}");
    }

    struct Fixed(EdgeLabel);

    impl PairLabeler for Fixed {
        fn label_pairs(&self, _: &AnnotatedSentence, pairs: &[DepPair]) -> Result<Vec<(EdgeLabel, f64)>> {
            Ok(vec![(self.0.clone(), 1.0); pairs.len()])
        }
    }

    #[test]
    fn predict_with_a_fixed_labeler() {
        let a = makan();
        let e = predict_sentence(&a.sentence, &FilterRuleSet::all(), &Fixed(EdgeLabel::Mod)).unwrap();
        assert_eq!(e.id, "s1");
        assert_eq!(
            e.graph.to_penman(),
            "(vv1 / makan :mod (vv2 / aku) :mod (vv3 / kue) :mod (vv4 / teras))"
        );
        assert!(predict_corpus(&[], &FilterRuleSet::all(), &Fixed(EdgeLabel::Mod)).unwrap().is_empty());
    }
}
