use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::split::{depth, leaf_for, Accumulator, Grower, Node};
use super::{Dataset, Prediction};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Gini,
    Entropy,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Gini => "gini",
            Criterion::Entropy => "entropy",
        })
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_lowercase().as_str() {
            "gini" => Ok(Criterion::Gini),
            "entropy" => Ok(Criterion::Entropy),
            other => Err(Error::Config(format!("unknown split criterion {other:?}"))),
        }
    }
}

/// Gini impurity of a class-count vector.
pub fn gini(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

/// Shannon entropy in bits of a class-count vector.
pub fn entropy(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    -counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            p * p.log2()
        })
        .sum::<f64>()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    pub max_depth: usize,
    pub criterion: Criterion,
    pub min_samples_split: usize,
}

impl TreeParams {
    pub fn new(max_depth: usize, criterion: Criterion) -> Result<Self> {
        let p = TreeParams {
            max_depth,
            criterion,
            min_samples_split: 2,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_depth == 0 {
            return Err(Error::Config("max_depth must be positive".into()));
        }
        if self.min_samples_split < 2 {
            return Err(Error::Config("min_samples_split must be at least 2".into()));
        }
        Ok(())
    }
}

impl Default for TreeParams {
    /// Gini, effectively unbounded depth.
    fn default() -> Self {
        TreeParams {
            max_depth: 64,
            criterion: Criterion::Gini,
            min_samples_split: 2,
        }
    }
}

#[derive(Clone)]
struct ClassCounts<'a> {
    labels: &'a [usize],
    counts: Vec<u64>,
    n: u64,
    criterion: Criterion,
}

impl Accumulator for ClassCounts<'_> {
    type Leaf = Vec<u64>;

    fn cleared(&self) -> Self {
        ClassCounts {
            labels: self.labels,
            counts: vec![0; self.counts.len()],
            n: 0,
            criterion: self.criterion,
        }
    }

    fn add(&mut self, i: usize) {
        self.counts[self.labels[i]] += 1;
        self.n += 1;
    }

    fn remove(&mut self, i: usize) {
        self.counts[self.labels[i]] -= 1;
        self.n -= 1;
    }

    fn cost(&self) -> f64 {
        let impurity = match self.criterion {
            Criterion::Gini => gini(&self.counts),
            Criterion::Entropy => entropy(&self.counts),
        };
        self.n as f64 * impurity
    }

    fn leaf(&self) -> Vec<u64> {
        self.counts.clone()
    }

    fn is_pure(&self, _: &[usize]) -> bool {
        self.counts.iter().filter(|&&c| c > 0).count() <= 1
    }
}

/// CART classification tree with class-count leaves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub n_features: usize,
    pub classes: Vec<String>,
    pub params: TreeParams,
    pub nodes: Vec<Node<Vec<u64>>>,
}

/// Fits a CART tree.
///
/// Candidate thresholds are midpoints between consecutive distinct values.
/// Growth stops at `max_depth`, at pure nodes and at nodes smaller than
/// `min_samples_split`. Splits that do not lower impurity are still taken
/// when they are the best available. The seed is accepted for interface
/// symmetry; training is deterministic.
pub fn train_tree(ds: &Dataset, p: &TreeParams, _seed: u64) -> Result<TreeModel> {
    p.validate()?;
    if ds.is_empty() {
        return Err(Error::Data("cannot train a tree on an empty dataset".into()));
    }
    let mut acc = ClassCounts {
        labels: ds.labels(),
        counts: vec![0; ds.n_classes()],
        n: 0,
        criterion: p.criterion,
    };
    let members: Vec<usize> = (0..ds.len()).collect();
    for &i in &members {
        acc.add(i);
    }
    let grower = Grower {
        rows: ds.rows(),
        max_depth: p.max_depth,
        min_samples_split: p.min_samples_split,
    };
    let nodes = grower.grow(members, acc);
    Ok(TreeModel {
        n_features: ds.n_features(),
        classes: ds.classes().to_vec(),
        params: p.clone(),
        nodes,
    })
}

impl TreeModel {
    pub fn depth(&self) -> usize {
        depth(&self.nodes)
    }

    pub fn predict(&self, x: &[f64]) -> Result<Prediction> {
        if x.len() != self.n_features {
            return Err(Error::Data(format!(
                "feature vector has length {}, model expects {}",
                x.len(),
                self.n_features
            )));
        }
        let counts = leaf_for(&self.nodes, x);
        let total: u64 = counts.iter().sum();
        let probabilities = counts
            .iter()
            .map(|&c| c as f64 / total as f64)
            .collect();
        Ok(Prediction::from_probabilities(probabilities))
    }

    /// Class counts of every leaf.
    pub fn leaves(&self) -> impl Iterator<Item = &Vec<u64>> {
        self.nodes.iter().filter_map(|n| match n {
            Node::Leaf(c) => Some(c),
            Node::Split { .. } => None,
        })
    }
}
