//! Multi-class gradient-boosted regression trees with a softmax objective.
//!
//! Each round fits one regression tree per class to the residuals `y - p`
//! of the current softmax probabilities. Leaves hold the Newton step
//! `sum(residual) / (sum(p * (1 - p)) + l2_leaf_penalty)`, scaled by the
//! learning rate, and a sample's class score is the sum of its leaves.

use serde::{Deserialize, Serialize};

use super::split::{depth, leaf_for, Accumulator, Grower, Node};
use super::{softmax, Dataset, Prediction};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GbtParams {
    pub learning_rate: f64,
    pub max_depth: usize,
    pub n_rounds: usize,
    pub l2_leaf_penalty: f64,
}

impl Default for GbtParams {
    fn default() -> Self {
        GbtParams {
            learning_rate: 0.1,
            max_depth: 8,
            n_rounds: 100,
            l2_leaf_penalty: 1.0,
        }
    }
}

impl GbtParams {
    pub fn new(learning_rate: f64, max_depth: usize, n_rounds: usize) -> Result<Self> {
        let p = GbtParams {
            learning_rate,
            max_depth,
            n_rounds,
            ..GbtParams::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::Config(format!(
                "learning_rate must be in (0, 1], got {}",
                self.learning_rate
            )));
        }
        if self.max_depth == 0 {
            return Err(Error::Config("max_depth must be positive".into()));
        }
        if self.n_rounds == 0 {
            return Err(Error::Config("n_rounds must be positive".into()));
        }
        if self.l2_leaf_penalty.is_nan() || self.l2_leaf_penalty < 0.0 {
            return Err(Error::Config("l2_leaf_penalty must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Clone)]
struct Residuals<'a> {
    residual: &'a [f64],
    hessian: &'a [f64],
    sum: f64,
    sum_sq: f64,
    sum_hess: f64,
    n: usize,
    scale: f64,
    l2: f64,
}

impl Accumulator for Residuals<'_> {
    type Leaf = f64;

    fn cleared(&self) -> Self {
        Residuals {
            sum: 0.0,
            sum_sq: 0.0,
            sum_hess: 0.0,
            n: 0,
            ..self.clone()
        }
    }

    fn add(&mut self, i: usize) {
        let r = self.residual[i];
        self.sum += r;
        self.sum_sq += r * r;
        self.sum_hess += self.hessian[i];
        self.n += 1;
    }

    fn remove(&mut self, i: usize) {
        let r = self.residual[i];
        self.sum -= r;
        self.sum_sq -= r * r;
        self.sum_hess -= self.hessian[i];
        self.n -= 1;
    }

    /// Sum of squared deviations from the mean.
    fn cost(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.sum_sq - self.sum * self.sum / self.n as f64).max(0.0)
        }
    }

    fn leaf(&self) -> f64 {
        let denom = (self.sum_hess + self.l2).max(1e-12);
        self.scale * self.sum / denom
    }

    fn is_pure(&self, members: &[usize]) -> bool {
        members
            .split_first()
            .is_none_or(|(&first, rest)| rest.iter().all(|&i| self.residual[i] == self.residual[first]))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionTree {
    pub nodes: Vec<Node<f64>>,
}

impl RegressionTree {
    pub fn predict(&self, x: &[f64]) -> f64 {
        *leaf_for(&self.nodes, x)
    }

    pub fn depth(&self) -> usize {
        depth(&self.nodes)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GbtModel {
    pub n_features: usize,
    pub classes: Vec<String>,
    pub params: GbtParams,
    pub base_scores: Vec<f64>,
    /// `trees[class][round]`.
    pub trees: Vec<Vec<RegressionTree>>,
    /// Mean training cross-entropy before the first round and after each round.
    pub training_loss: Vec<f64>,
}

fn cross_entropy(scores: &[Vec<f64>], labels: &[usize]) -> f64 {
    let total: f64 = scores
        .iter()
        .zip(labels)
        .map(|(s, &y)| {
            let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let log_sum = s.iter().map(|v| (v - max).exp()).sum::<f64>().ln() + max;
            log_sum - s[y]
        })
        .sum();
    total / labels.len() as f64
}

/// Fits softmax gradient-boosted trees. Training is deterministic; the seed
/// is accepted for interface symmetry.
pub fn train_gbt(ds: &Dataset, p: &GbtParams, _seed: u64) -> Result<GbtModel> {
    p.validate()?;
    if ds.is_empty() {
        return Err(Error::Data("cannot train on an empty dataset".into()));
    }
    let present = ds.class_counts().iter().filter(|&&c| c > 0).count();
    if present < 2 {
        return Err(Error::Data(
            "gradient boosting needs at least two classes in the training data".into(),
        ));
    }

    let n = ds.len();
    let k = ds.n_classes();
    let labels = ds.labels();
    let base_scores = vec![0.0; k];
    let mut scores = vec![base_scores.clone(); n];
    let mut trees: Vec<Vec<RegressionTree>> = vec![Vec::with_capacity(p.n_rounds); k];
    let mut training_loss = vec![cross_entropy(&scores, labels)];
    let grower = Grower {
        rows: ds.rows(),
        max_depth: p.max_depth,
        min_samples_split: 2,
    };
    let members: Vec<usize> = (0..n).collect();
    let mut residual = vec![0.0; n];
    let mut hessian = vec![0.0; n];

    for _ in 0..p.n_rounds {
        let probs: Vec<Vec<f64>> = scores.iter().map(|s| softmax(s)).collect();
        let mut round = Vec::with_capacity(k);
        for class in 0..k {
            for i in 0..n {
                let pi = probs[i][class];
                let y = if labels[i] == class { 1.0 } else { 0.0 };
                residual[i] = y - pi;
                hessian[i] = pi * (1.0 - pi);
            }
            let mut acc = Residuals {
                residual: &residual,
                hessian: &hessian,
                sum: 0.0,
                sum_sq: 0.0,
                sum_hess: 0.0,
                n: 0,
                scale: p.learning_rate,
                l2: p.l2_leaf_penalty,
            };
            for &i in &members {
                acc.add(i);
            }
            let tree = RegressionTree {
                nodes: grower.grow(members.clone(), acc),
            };
            round.push(tree);
        }
        for (class, tree) in round.into_iter().enumerate() {
            for (i, row) in ds.rows().iter().enumerate() {
                scores[i][class] += tree.predict(row);
            }
            trees[class].push(tree);
        }
        training_loss.push(cross_entropy(&scores, labels));
    }

    Ok(GbtModel {
        n_features: ds.n_features(),
        classes: ds.classes().to_vec(),
        params: p.clone(),
        base_scores,
        trees,
        training_loss,
    })
}

impl GbtModel {
    pub fn scores(&self, x: &[f64]) -> Vec<f64> {
        self.base_scores
            .iter()
            .zip(&self.trees)
            .map(|(base, seq)| base + seq.iter().map(|t| t.predict(x)).sum::<f64>())
            .collect()
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        if x.len() != self.n_features {
            return Err(Error::Data(format!(
                "feature vector has length {}, model expects {}",
                x.len(),
                self.n_features
            )));
        }
        Ok(Prediction::from_probabilities(softmax(&self.scores(x))))
    }

    pub fn max_tree_depth(&self) -> usize {
        self.trees
            .iter()
            .flatten()
            .map(RegressionTree::depth)
            .max()
            .unwrap_or(0)
    }
}
