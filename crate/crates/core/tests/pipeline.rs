mod common;

use std::collections::BTreeMap;

use indoamr::amr::EdgeLabel;
use indoamr::classifier::{load_model, save_model, Algorithm, Classifier, Criterion, GbtParams, ModelParams, TreeParams};
use indoamr::ingest::{write_amr_corpus, AnnotatedSentence};
use indoamr::pairgen::{DepPair, FilterRuleSet};
use indoamr::pipeline::{
    ablate_features, ablate_rules, corpus_pair_score, predict_corpus, render_rule_ablation, run_grid,
    train_model, training_set, GridSpec, PairLabeler, TrainConfig,
};
use indoamr::Result;

use common::{mini_corpus, mini_embeddings};

// Counts from an independent re-implementation of punctuation removal,
// filtering and gold matching over data/mini.*.
#[test]
fn mini_corpus_statistics() {
    let set = training_set(&mini_corpus(), &FilterRuleSet::all());
    assert_eq!(set.stats.sentences, 30);
    assert_eq!(set.stats.pairs, 122);
    assert_eq!(set.stats.kept_pairs, 97);
    assert_eq!(set.stats.examples, 94);
    assert_eq!(set.stats.unmatched_gold_edges, 2);
    let expected: BTreeMap<String, usize> = [("ARG0", 26), ("ARG1", 23), ("location", 14), ("mod", 16), ("name", 6), ("time", 9)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    assert_eq!(set.stats.label_counts, expected);
    // The lemmatizer left "tertawa" where the annotator wrote "tawa".
    assert_eq!(set.unmatched.len(), 1);
    assert_eq!(set.unmatched[0].sentence_id, "s12");
    assert!(set.unmatched[0].edges.iter().all(|(s, _, _)| s == "tawa"));
}

#[test]
fn three_sentences_with_a_depth_six_tree() {
    let corpus = mini_corpus();
    let cfg = TrainConfig {
        params: ModelParams::Dt(TreeParams::new(6, Criterion::Gini).unwrap()),
        ..TrainConfig::default()
    };
    let out = train_model(&corpus[..3], Some(mini_embeddings()), &cfg).unwrap();
    // Hand alignment: three kept pairs per sentence, all matched.
    assert_eq!(out.stats.examples, 9);
    let Classifier::Tree(tree) = &out.model.classifier else {
        panic!("expected a tree");
    };
    assert!(tree.depth() <= 6);
    let mut buf = Vec::new();
    save_model(&out.model, &mut buf).unwrap();
    assert!(!buf.is_empty());
}

#[test]
fn training_is_byte_for_byte_deterministic() {
    let corpus = mini_corpus();
    let cfg = TrainConfig {
        params: ModelParams::Gbt(GbtParams::new(0.1, 4, 10).unwrap()),
        k: Some(3),
        ..TrainConfig::default()
    };
    let a = train_model(&corpus, Some(mini_embeddings()), &cfg).unwrap();
    let b = train_model(&corpus, Some(mini_embeddings()), &cfg).unwrap();
    assert_eq!(a.model.to_json(), b.model.to_json());
    assert_eq!(a.cv, b.cv);
}

#[test]
fn model_file_round_trip_predicts_identically() {
    let corpus = mini_corpus();
    let cfg = TrainConfig {
        params: ModelParams::Gbt(GbtParams::new(0.2, 4, 15).unwrap()),
        ..TrainConfig::default()
    };
    let model = train_model(&corpus, Some(mini_embeddings()), &cfg).unwrap().model;
    let mut buf = Vec::new();
    save_model(&model, &mut buf).unwrap();
    let mut loaded = load_model(buf.as_slice()).unwrap();
    assert_eq!(loaded.to_json(), model.to_json());
    // The table is not stored in the file.
    let sentences: Vec<AnnotatedSentence> = corpus.iter().map(|a| a.sentence.clone()).collect();
    assert!(predict_corpus(&sentences, &loaded.rules, &loaded).unwrap_err().is_config());
    loaded.encoder.attach_embeddings(mini_embeddings()).unwrap();
    let mut original = model.clone();
    original.encoder.attach_embeddings(mini_embeddings()).unwrap();
    assert_eq!(
        write_amr_corpus(&predict_corpus(&sentences, &loaded.rules, &loaded).unwrap()),
        write_amr_corpus(&predict_corpus(&sentences, &original.rules, &original).unwrap()),
    );
}

// (matched, predicted, gold) per row, from the same independent count.
const ABLATION: [(usize, usize, usize); 8] = [
    (94, 122, 96),
    (94, 115, 96),
    (94, 105, 96),
    (94, 118, 96),
    (94, 98, 96),
    (94, 111, 96),
    (94, 104, 96),
    (94, 97, 96),
];

#[test]
fn rule_ablation_matches_independent_counts() {
    let corpus = mini_corpus();
    let r = ablate_rules(&corpus, &FilterRuleSet::default());
    assert_eq!(r.rows.len(), 8);
    for (row, &(m, p, g)) in r.rows.iter().zip(&ABLATION) {
        assert_eq!((row.score.matched, row.score.predicted_total, row.score.gold_total), (m, p, g), "{}", row.rules);
    }
    let names: Vec<&str> = r.rows.iter().map(|r| r.rules.as_str()).collect();
    assert_eq!(
        names,
        ["none", "det", "prep", "sconj", "det,prep", "det,sconj", "prep,sconj", "det,prep,sconj"]
    );
    assert!((r.rows[0].score.precision - 0.7704918032786885).abs() < 1e-12);
    assert!((r.rows[7].score.f1 - 0.9740932642487047).abs() < 1e-12);
    assert_eq!(render_rule_ablation(&r), render_rule_ablation(&ablate_rules(&corpus, &FilterRuleSet::default())));
}

#[test]
fn pair_score_with_all_rules() {
    let s = corpus_pair_score(&mini_corpus(), &FilterRuleSet::all());
    assert_eq!((s.matched, s.predicted_total, s.gold_total), (94, 97, 96));
}

#[test]
fn rules_file_matches_the_defaults() {
    let f = std::fs::File::open(common::path("data/rules.json")).unwrap();
    assert_eq!(FilterRuleSet::from_json(f).unwrap(), FilterRuleSet::all());
}

struct AllMod;

impl PairLabeler for AllMod {
    fn label_pairs(&self, _: &AnnotatedSentence, pairs: &[DepPair]) -> Result<Vec<(EdgeLabel, f64)>> {
        Ok(vec![(EdgeLabel::Mod, 1.0); pairs.len()])
    }
}

#[test]
fn predict_degenerate_inputs() {
    assert_eq!(write_amr_corpus(&predict_corpus(&[], &FilterRuleSet::all(), &AllMod).unwrap()), "");
    // Every pair touches "di", so only the root is left.
    let s = indoamr::ingest::read_conllu(
        "1\tdi\tdi\tADP\t_\t_\t0\troot\t_\t_\n2\tsini\tsini\tPRON\t_\t_\t1\tobj\t_\t_\n".as_bytes(),
    )
    .unwrap();
    let out = predict_corpus(&s, &FilterRuleSet::all(), &AllMod).unwrap();
    assert_eq!(out[0].graph.to_penman(), "(vv1 / di)");
}

#[test]
fn grid_ranks_every_cell() {
    let grid = GridSpec::from_json(
        r#"{"lr": [0.05, 0.1], "depth": [5, 8]}"#,
        Algorithm::Gbt,
        &TreeParams::default(),
        &GbtParams::new(0.1, 8, 10).unwrap(),
    )
    .unwrap();
    let features = "syn".parse().unwrap();
    let r = run_grid(&mini_corpus(), None, &FilterRuleSet::all(), &features, &grid, 3, 7).unwrap();
    assert_eq!(r.cells.len(), 4);
    let ranks: Vec<usize> = r.cells.iter().map(|c| c.rank).collect();
    assert_eq!(ranks, [1, 2, 3, 4]);
    assert!(r.cells.windows(2).all(|w| w[0].f1_macro >= w[1].f1_macro));
}

#[test]
fn feature_ablation_has_five_rows() {
    let r = ablate_features(
        &mini_corpus(),
        Some(mini_embeddings()),
        &FilterRuleSet::all(),
        &ModelParams::Dt(TreeParams::default()),
        5,
        42,
    )
    .unwrap();
    let names: Vec<String> = r.rows.iter().map(|r| r.features.to_string()).collect();
    assert_eq!(names, ["lex,syn,pos", "syn,pos", "lex,syn", "lex,pos", "syn"]);
    assert!(r.rows.iter().all(|row| row.examples == 94));
    assert!(r.rows.iter().all(|row| (0.0..=1.0).contains(&row.f1_macro)));
    let missing = ablate_features(&mini_corpus(), None, &FilterRuleSet::all(), &ModelParams::Dt(TreeParams::default()), 5, 42);
    assert!(missing.unwrap_err().is_config());
}
