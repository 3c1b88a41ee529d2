//! Per-pair feature bundles, training-time alignment with gold AMR edges,
//! and numeric encoding.
//!
//! Features fall into the categories below; the sentence id is carried along
//! for bookkeeping only and never encoded.
//!
//! | feature                          | category    |
//! |----------------------------------|-------------|
//! | sentence id                      | identifier  |
//! | parent, child lemma              | lexical     |
//! | parent/child POS, parent/child NER | syntactic |
//! | dependency role, is-root, parent/child position | positional |

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::amr::{AmrGraph, EdgeLabel};
use crate::error::{Error, Result};
use crate::ingest::{AnnotatedSentence, EmbeddingTable};
use crate::pairgen::DepPair;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairFeatures {
    pub sentence_id: String,
    pub parent_lemma: String,
    pub child_lemma: String,
    pub parent_pos: String,
    pub child_pos: String,
    pub parent_ner: String,
    pub child_ner: String,
    pub deprel: String,
    pub is_root: bool,
    pub parent_position: usize,
    pub child_position: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledExample {
    pub features: PairFeatures,
    pub label: EdgeLabel,
}

pub fn combine_features(s: &AnnotatedSentence, pairs: &[DepPair]) -> Vec<PairFeatures> {
    pairs
        .iter()
        .map(|p| PairFeatures {
            sentence_id: s.id.clone(),
            parent_lemma: p.parent.lemma.clone(),
            child_lemma: p.child.lemma.clone(),
            parent_pos: p.parent.upos.clone(),
            child_pos: p.child.upos.clone(),
            parent_ner: p.parent.ner.clone(),
            child_ner: p.child.ner.clone(),
            deprel: p.deprel.clone(),
            is_root: p.parent.head == 0,
            parent_position: p.parent.index,
            child_position: p.child.index,
        })
        .collect()
}

/// Result of aligning feature rows with a gold graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairMatch {
    pub examples: Vec<LabeledExample>,
    /// Gold edges `(source concept, target concept, label)` no row claimed.
    pub unmatched_gold: Vec<(String, String, EdgeLabel)>,
}

/// Labels feature rows from the gold edges they align with.
///
/// A row aligns with a gold edge when its (parent lemma, child lemma) equals
/// the edge's (source concept, target concept). Each gold edge is used at most
/// once, rows claim edges in order, and unaligned rows yield no example.
/// Gold edges outside the closed label set are never used.
pub fn match_pairs_detailed(feats: &[PairFeatures], gold: &AmrGraph) -> PairMatch {
    let gold_edges = gold.concept_edges();
    let mut used = vec![false; gold_edges.len()];
    let mut examples = Vec::new();
    for row in feats {
        let hit = gold_edges.iter().enumerate().position(|(i, (s, t, l))| {
            !used[i] && l.is_closed() && *s == row.parent_lemma && *t == row.child_lemma
        });
        if let Some(i) = hit {
            used[i] = true;
            examples.push(LabeledExample {
                features: row.clone(),
                label: gold_edges[i].2.clone(),
            });
        }
    }
    let unmatched_gold = gold_edges
        .iter()
        .zip(&used)
        .filter(|(_, u)| !**u)
        .map(|((s, t, l), _)| (s.to_string(), t.to_string(), (*l).clone()))
        .collect();
    PairMatch {
        examples,
        unmatched_gold,
    }
}

pub fn match_pairs(feats: &[PairFeatures], gold: &AmrGraph) -> Vec<LabeledExample> {
    match_pairs_detailed(feats, gold).examples
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureCategory {
    Lexical,
    Syntactic,
    Positional,
}

impl FeatureCategory {
    pub fn short_name(self) -> &'static str {
        match self {
            FeatureCategory::Lexical => "lex",
            FeatureCategory::Syntactic => "syn",
            FeatureCategory::Positional => "pos",
        }
    }
}

impl FromStr for FeatureCategory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "lex" | "lexical" => Ok(FeatureCategory::Lexical),
            "syn" | "syntactic" => Ok(FeatureCategory::Syntactic),
            "pos" | "positional" => Ok(FeatureCategory::Positional),
            other => Err(Error::Config(format!("unknown feature category {other:?}"))),
        }
    }
}

/// Non-empty set of enabled feature categories.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "BTreeSet<FeatureCategory>", into = "BTreeSet<FeatureCategory>")]
pub struct FeatureConfig(BTreeSet<FeatureCategory>);

impl FeatureConfig {
    pub fn new<I: IntoIterator<Item = FeatureCategory>>(cats: I) -> Result<Self> {
        let set: BTreeSet<_> = cats.into_iter().collect();
        if set.is_empty() {
            return Err(Error::Config("at least one feature category must be enabled".into()));
        }
        Ok(FeatureConfig(set))
    }

    pub fn all() -> Self {
        FeatureConfig(
            [
                FeatureCategory::Lexical,
                FeatureCategory::Syntactic,
                FeatureCategory::Positional,
            ]
            .into(),
        )
    }

    pub fn has(&self, c: FeatureCategory) -> bool {
        self.0.contains(&c)
    }

    pub fn categories(&self) -> impl Iterator<Item = FeatureCategory> + '_ {
        self.0.iter().copied()
    }

    /// The five category combinations compared in the feature ablation:
    /// lex+syn+pos, syn+pos, lex+syn, lex+pos, syn.
    pub fn ablation_combinations() -> Vec<FeatureConfig> {
        use FeatureCategory::*;
        [
            vec![Lexical, Syntactic, Positional],
            vec![Syntactic, Positional],
            vec![Lexical, Syntactic],
            vec![Lexical, Positional],
            vec![Syntactic],
        ]
        .into_iter()
        .map(|c| FeatureConfig(c.into_iter().collect()))
        .collect()
    }
}

impl TryFrom<BTreeSet<FeatureCategory>> for FeatureConfig {
    type Error = String;

    fn try_from(set: BTreeSet<FeatureCategory>) -> std::result::Result<Self, String> {
        FeatureConfig::new(set).map_err(|e| e.to_string())
    }
}

impl From<FeatureConfig> for BTreeSet<FeatureCategory> {
    fn from(c: FeatureConfig) -> Self {
        c.0
    }
}

impl fmt::Display for FeatureConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.0.iter().map(|c| c.short_name()).collect();
        f.write_str(&names.join(","))
    }
}

impl FromStr for FeatureConfig {
    type Err = Error;

    /// Parses `"lex,syn,pos"`, `"all"` and similar.
    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("all") {
            return Ok(FeatureConfig::all());
        }
        FeatureConfig::new(
            s.split(',')
                .filter(|p| !p.trim().is_empty())
                .map(str::parse)
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

/// Fitted state for turning [`PairFeatures`] into vectors.
///
/// Layout: parent and child embeddings (lexical); one-hot parent POS, child
/// POS, parent NER, child NER (syntactic); one-hot dependency role, is-root
/// bit, parent position, child position (positional). Values outside a fitted
/// vocabulary encode as an all-zero block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureEncoder {
    config: FeatureConfig,
    embedding_dim: usize,
    parent_pos: Vec<String>,
    child_pos: Vec<String>,
    parent_ner: Vec<String>,
    child_ner: Vec<String>,
    deprel: Vec<String>,
    dimension: usize,
    #[serde(skip)]
    embeddings: Option<Arc<EmbeddingTable>>,
}

fn vocabulary<'a>(values: impl Iterator<Item = &'a str>) -> Vec<String> {
    values
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(str::to_owned)
        .collect()
}

fn one_hot(out: &mut Vec<f64>, vocab: &[String], value: &str) {
    let start = out.len();
    out.resize(start + vocab.len(), 0.0);
    if let Ok(i) = vocab.binary_search_by(|v| v.as_str().cmp(value)) {
        out[start + i] = 1.0;
    }
}

/// Fits categorical vocabularies on the training rows.
///
/// `embeddings` is required when the lexical category is enabled.
pub fn fit_encoder(
    train: &[LabeledExample],
    config: &FeatureConfig,
    embeddings: Option<Arc<EmbeddingTable>>,
) -> Result<FeatureEncoder> {
    if train.is_empty() {
        return Err(Error::Data("cannot fit an encoder on an empty training set".into()));
    }
    let lexical = config.has(FeatureCategory::Lexical);
    let embedding_dim = match (&embeddings, lexical) {
        (Some(t), true) => t.dimension(),
        (None, true) => {
            return Err(Error::Config(
                "lexical features need an embedding table".into(),
            ))
        }
        (_, false) => 0,
    };
    let rows = || train.iter().map(|e| &e.features);
    let mut enc = FeatureEncoder {
        config: config.clone(),
        embedding_dim,
        parent_pos: vocabulary(rows().map(|f| f.parent_pos.as_str())),
        child_pos: vocabulary(rows().map(|f| f.child_pos.as_str())),
        parent_ner: vocabulary(rows().map(|f| f.parent_ner.as_str())),
        child_ner: vocabulary(rows().map(|f| f.child_ner.as_str())),
        deprel: vocabulary(rows().map(|f| f.deprel.as_str())),
        dimension: 0,
        embeddings: if lexical { embeddings } else { None },
    };
    enc.dimension = enc.expected_dimension();
    Ok(enc)
}

impl FeatureEncoder {
    fn expected_dimension(&self) -> usize {
        let mut d = 0;
        if self.config.has(FeatureCategory::Lexical) {
            d += 2 * self.embedding_dim;
        }
        if self.config.has(FeatureCategory::Syntactic) {
            d += self.parent_pos.len() + self.child_pos.len() + self.parent_ner.len() + self.child_ner.len();
        }
        if self.config.has(FeatureCategory::Positional) {
            d += self.deprel.len() + 3;
        }
        d
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn config(&self) -> &FeatureConfig {
        &self.config
    }

    pub fn embedding_dim(&self) -> usize {
        self.embedding_dim
    }

    pub fn needs_embeddings(&self) -> bool {
        self.config.has(FeatureCategory::Lexical)
    }

    /// Attaches the embedding table after loading from a model file.
    pub fn attach_embeddings(&mut self, table: Arc<EmbeddingTable>) -> Result<()> {
        if !self.needs_embeddings() {
            return Ok(());
        }
        if table.dimension() != self.embedding_dim {
            return Err(Error::Config(format!(
                "embedding table has dimension {}, the model was trained with {}",
                table.dimension(),
                self.embedding_dim
            )));
        }
        self.embeddings = Some(table);
        Ok(())
    }

    /// Fails when lexical features are enabled but no table is attached.
    pub fn check_ready(&self) -> Result<()> {
        if self.needs_embeddings() && self.embeddings.is_none() {
            return Err(Error::Config(
                "lexical features need an embedding table".into(),
            ));
        }
        if self.dimension != self.expected_dimension() {
            return Err(Error::Model("encoder dimension does not match its vocabularies".into()));
        }
        Ok(())
    }

    /// # Panics
    ///
    /// If lexical features are enabled and no embedding table is attached.
    pub fn encode(&self, f: &PairFeatures) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dimension);
        if self.config.has(FeatureCategory::Lexical) {
            let table = self
                .embeddings
                .as_ref()
                .expect("lexical encoding without an embedding table");
            out.extend_from_slice(table.embed(&f.parent_lemma));
            out.extend_from_slice(table.embed(&f.child_lemma));
        }
        if self.config.has(FeatureCategory::Syntactic) {
            one_hot(&mut out, &self.parent_pos, &f.parent_pos);
            one_hot(&mut out, &self.child_pos, &f.child_pos);
            one_hot(&mut out, &self.parent_ner, &f.parent_ner);
            one_hot(&mut out, &self.child_ner, &f.child_ner);
        }
        if self.config.has(FeatureCategory::Positional) {
            one_hot(&mut out, &self.deprel, &f.deprel);
            out.push(if f.is_root { 1.0 } else { 0.0 });
            out.push(f.parent_position as f64);
            out.push(f.child_position as f64);
        }
        debug_assert_eq!(out.len(), self.dimension);
        out
    }
}

pub fn encode(enc: &FeatureEncoder, f: &PairFeatures) -> Vec<f64> {
    enc.encode(f)
}

/// Tab-separated dump of feature rows, with an optional label column.
pub fn write_feature_table(rows: &[PairFeatures], labels: Option<&[EdgeLabel]>) -> String {
    let mut out = String::from(
        "Sentence ID\tParent\tChild\tParent POS\tChild POS\tParent NER\tChild NER\tDependency role\tIs Root\tParent position\tChild position",
    );
    if labels.is_some() {
        out.push_str("\tLabel");
    }
    out.push('\n');
    for (i, f) in rows.iter().enumerate() {
        let _ = write!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            f.sentence_id,
            f.parent_lemma,
            f.child_lemma,
            f.parent_pos,
            f.child_pos,
            f.parent_ner,
            f.child_ner,
            f.deprel,
            f.is_root,
            f.parent_position,
            f.child_position
        );
        if let Some(l) = labels.and_then(|l| l.get(i)) {
            let _ = write!(out, "\t{}", l.as_str());
        }
        out.push('\n');
    }
    out
}
