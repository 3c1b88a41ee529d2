//! Edge-label classifiers: a CART decision tree and softmax gradient-boosted
//! trees, k-fold cross-validation, and the versioned model file.

mod cv;
mod gbt;
mod model_file;
mod split;
mod tree;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cv::{cross_validate, fold_assignment, CvReport, FoldResult};
pub use gbt::{train_gbt, GbtModel, GbtParams, RegressionTree};
pub use model_file::{load_model, save_model, ModelFile, FORMAT_NAME, FORMAT_VERSION};
pub use split::Node;
pub use tree::{entropy, gini, train_tree, Criterion, TreeModel, TreeParams};

/// Feature matrix with one class index per row.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    rows: Vec<Vec<f64>>,
    labels: Vec<usize>,
    classes: Vec<String>,
}

impl Dataset {
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<usize>, classes: Vec<String>) -> Result<Self> {
        if rows.len() != labels.len() {
            return Err(Error::Data(format!(
                "{} rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        if classes.is_empty() {
            return Err(Error::Data("empty class table".into()));
        }
        if let Some(d) = rows.first().map(Vec::len) {
            if let Some(bad) = rows.iter().position(|r| r.len() != d) {
                return Err(Error::Data(format!(
                    "row {bad} has length {}, expected {d}",
                    rows[bad].len()
                )));
            }
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= classes.len()) {
            return Err(Error::Data(format!(
                "label {bad} outside class table of size {}",
                classes.len()
            )));
        }
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Data("feature values must be finite".into()));
        }
        Ok(Dataset {
            rows,
            labels,
            classes,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn n_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.classes.len()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Rows at `indices`, in that order, sharing the class table.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            classes: self.classes.clone(),
        }
    }
}

/// Predicted class with the full probability vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub class: usize,
    pub probabilities: Vec<f64>,
}

impl Prediction {
    /// Argmax with ties resolved to the lowest class index.
    pub fn from_probabilities(probabilities: Vec<f64>) -> Self {
        let mut class = 0;
        for (i, &p) in probabilities.iter().enumerate() {
            if p > probabilities[class] {
                class = i;
            }
        }
        Prediction {
            class,
            probabilities,
        }
    }

    pub fn confidence(&self) -> f64 {
        self.probabilities[self.class]
    }
}

pub(crate) fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Learning algorithm selectable from the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// CART decision tree.
    Dt,
    /// Softmax gradient-boosted trees.
    Gbt,
    /// Feed-forward network; reserved, not implemented.
    Ffnn,
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "dt" | "tree" | "decision-tree" => Ok(Algorithm::Dt),
            "gbt" | "xgboost" | "boosting" => Ok(Algorithm::Gbt),
            "ffnn" | "mlp" => Ok(Algorithm::Ffnn),
            other => Err(Error::Config(format!("unknown algorithm {other:?}"))),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Dt => "dt",
            Algorithm::Gbt => "gbt",
            Algorithm::Ffnn => "ffnn",
        })
    }
}

impl Algorithm {
    pub fn ensure_supported(self) -> Result<()> {
        if self == Algorithm::Ffnn {
            return Err(Error::Config(
                "the feed-forward network classifier is not implemented; use dt or gbt".into(),
            ));
        }
        Ok(())
    }
}

/// Algorithm together with its hyperparameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm", rename_all = "lowercase")]
pub enum ModelParams {
    Dt(TreeParams),
    Gbt(GbtParams),
}

impl ModelParams {
    pub fn algorithm(&self) -> Algorithm {
        match self {
            ModelParams::Dt(_) => Algorithm::Dt,
            ModelParams::Gbt(_) => Algorithm::Gbt,
        }
    }

    /// Compact description such as `dt(max_depth=8,criterion=gini)`.
    pub fn describe(&self) -> String {
        match self {
            ModelParams::Dt(p) => format!("dt(max_depth={},criterion={})", p.max_depth, p.criterion),
            ModelParams::Gbt(p) => format!(
                "gbt(learning_rate={},max_depth={},n_rounds={})",
                p.learning_rate, p.max_depth, p.n_rounds
            ),
        }
    }
}

/// A trained label classifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Classifier {
    Tree(TreeModel),
    Gbt(GbtModel),
}

impl Classifier {
    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        match self {
            Classifier::Tree(m) => m.predict(x),
            Classifier::Gbt(m) => m.predict(x),
        }
    }

    pub fn classes(&self) -> &[String] {
        match self {
            Classifier::Tree(m) => &m.classes,
            Classifier::Gbt(m) => &m.classes,
        }
    }

    pub fn n_features(&self) -> usize {
        match self {
            Classifier::Tree(m) => m.n_features,
            Classifier::Gbt(m) => m.n_features,
        }
    }
}

pub fn train(ds: &Dataset, params: &ModelParams, seed: u64) -> Result<Classifier> {
    match params {
        ModelParams::Dt(p) => train_tree(ds, p, seed).map(Classifier::Tree),
        ModelParams::Gbt(p) => train_gbt(ds, p, seed).map(Classifier::Gbt),
    }
}

pub fn predict(model: &Classifier, x: &[f64]) -> Result<Prediction> {
    model.predict(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_validation() {
        let classes = vec!["a".to_string(), "b".to_string()];
        assert!(Dataset::new(vec![vec![1.0]], vec![0, 1], classes.clone()).is_err());
        assert!(Dataset::new(vec![vec![1.0], vec![1.0, 2.0]], vec![0, 1], classes.clone()).is_err());
        assert!(Dataset::new(vec![vec![1.0]], vec![2], classes.clone()).is_err());
        assert!(Dataset::new(vec![vec![f64::NAN]], vec![0], classes.clone()).is_err());
        let ds = Dataset::new(vec![vec![1.0], vec![2.0], vec![3.0]], vec![0, 1, 1], classes).unwrap();
        assert_eq!(ds.class_counts(), vec![1, 2]);
        let sub = ds.subset(&[2, 0]);
        assert_eq!(sub.labels(), &[1, 0]);
        assert_eq!(sub.rows()[0], vec![3.0]);
    }

    #[test]
    fn argmax_ties_pick_lowest_index() {
        let p = Prediction::from_probabilities(vec![0.25, 0.375, 0.375]);
        assert_eq!(p.class, 1);
        assert_eq!(p.confidence(), 0.375);
    }

    #[test]
    fn softmax_sums_to_one() {
        let p = softmax(&[1000.0, 999.0, -5.0]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p[0] > p[1] && p[1] > p[2]);
    }

    #[test]
    fn ffnn_is_rejected() {
        let a: Algorithm = "ffnn".parse().unwrap();
        let e = a.ensure_supported().unwrap_err();
        assert!(e.is_config());
        assert!(e.to_string().contains("not implemented"));
        assert!("svm".parse::<Algorithm>().is_err());
    }
}
