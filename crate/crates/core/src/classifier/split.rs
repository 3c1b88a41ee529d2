//! Exact greedy split search shared by the classification and regression
//! trees.
//!
//! Each feature's sample indices are sorted once at the root and partitioned
//! stably at every split, so a node costs O(features x samples).

use serde::{Deserialize, Serialize};

/// Flat binary tree. Samples with `x[feature] <= threshold` go left.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Node<L> {
    Leaf(L),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

pub(crate) fn leaf_for<'a, L>(nodes: &'a [Node<L>], x: &[f64]) -> &'a L {
    let mut at = 0;
    loop {
        match &nodes[at] {
            Node::Leaf(l) => return l,
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => at = if x[*feature] <= *threshold { *left } else { *right },
        }
    }
}

pub(crate) fn depth<L>(nodes: &[Node<L>]) -> usize {
    fn go<L>(nodes: &[Node<L>], at: usize) -> usize {
        match &nodes[at] {
            Node::Leaf(_) => 0,
            Node::Split { left, right, .. } => 1 + go(nodes, *left).max(go(nodes, *right)),
        }
    }
    if nodes.is_empty() {
        0
    } else {
        go(nodes, 0)
    }
}

/// Running statistics over a set of samples.
pub(crate) trait Accumulator: Clone {
    type Leaf;

    /// Same shape, no samples.
    fn cleared(&self) -> Self;
    fn add(&mut self, i: usize);
    fn remove(&mut self, i: usize);
    /// Sample count times impurity; lower is better.
    fn cost(&self) -> f64;
    fn leaf(&self) -> Self::Leaf;
    /// True when no split can make the node any purer.
    fn is_pure(&self, members: &[usize]) -> bool;
}

pub(crate) struct Grower<'a> {
    pub rows: &'a [Vec<f64>],
    pub max_depth: usize,
    pub min_samples_split: usize,
}

// Splits whose cost differs by less than this are treated as ties.
const TIE_EPS: f64 = 1e-12;

fn midpoint(a: f64, b: f64) -> f64 {
    let m = a + (b - a) / 2.0;
    if m >= b {
        a
    } else {
        m
    }
}

impl Grower<'_> {
    /// Grows a tree over `members`, using `acc` (holding exactly `members`)
    /// for statistics.
    pub fn grow<A: Accumulator>(&self, members: Vec<usize>, acc: A) -> Vec<Node<A::Leaf>> {
        let n_features = self.rows.first().map_or(0, Vec::len);
        let sorted: Vec<Vec<usize>> = (0..n_features)
            .map(|f| {
                let mut idx = members.clone();
                idx.sort_by(|&a, &b| self.rows[a][f].total_cmp(&self.rows[b][f]).then(a.cmp(&b)));
                idx
            })
            .collect();
        let mut nodes = Vec::new();
        let mut in_left = vec![false; self.rows.len()];
        self.grow_node(members, sorted, acc, 0, &mut nodes, &mut in_left);
        nodes
    }

    fn grow_node<A: Accumulator>(
        &self,
        members: Vec<usize>,
        sorted: Vec<Vec<usize>>,
        acc: A,
        depth: usize,
        nodes: &mut Vec<Node<A::Leaf>>,
        in_left: &mut [bool],
    ) -> usize {
        let id = nodes.len();
        nodes.push(Node::Leaf(acc.leaf()));
        if depth >= self.max_depth || members.len() < self.min_samples_split || acc.is_pure(&members) {
            return id;
        }
        let Some((feature, threshold)) = self.best_split(&sorted, &acc) else {
            return id;
        };

        let mut left_acc = acc.cleared();
        let mut right_acc = acc.cleared();
        for &i in &members {
            let goes_left = self.rows[i][feature] <= threshold;
            in_left[i] = goes_left;
            if goes_left {
                left_acc.add(i);
            } else {
                right_acc.add(i);
            }
        }
        let (left_members, right_members): (Vec<usize>, Vec<usize>) =
            members.iter().partition(|&&i| in_left[i]);
        let mut left_sorted = Vec::with_capacity(sorted.len());
        let mut right_sorted = Vec::with_capacity(sorted.len());
        for list in sorted {
            let (l, r): (Vec<usize>, Vec<usize>) = list.into_iter().partition(|&i| in_left[i]);
            left_sorted.push(l);
            right_sorted.push(r);
        }
        let left = self.grow_node(left_members, left_sorted, left_acc, depth + 1, nodes, in_left);
        let right = self.grow_node(right_members, right_sorted, right_acc, depth + 1, nodes, in_left);
        nodes[id] = Node::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }

    /// Lowest-cost `(feature, threshold)`; ties go to the lowest feature,
    /// then the lowest threshold.
    fn best_split<A: Accumulator>(&self, sorted: &[Vec<usize>], acc: &A) -> Option<(usize, f64)> {
        let mut best: Option<(f64, usize, f64)> = None;
        for (f, idx) in sorted.iter().enumerate() {
            let mut left = acc.cleared();
            let mut right = acc.clone();
            for k in 0..idx.len().saturating_sub(1) {
                let i = idx[k];
                left.add(i);
                right.remove(i);
                let a = self.rows[i][f];
                let b = self.rows[idx[k + 1]][f];
                if a >= b {
                    continue;
                }
                let cost = left.cost() + right.cost();
                if best.is_none_or(|(c, _, _)| cost < c - TIE_EPS) {
                    best = Some((cost, f, midpoint(a, b)));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn midpoint_stays_below_upper_value() {
        assert_eq!(midpoint(0.0, 1.0), 0.5);
        let a = 1.0f64;
        let b = f64::from_bits(a.to_bits() + 1);
        let m = midpoint(a, b);
        assert!(a <= m && m < b);
    }

    #[test]
    fn leaf_lookup_follows_thresholds() {
        let nodes = vec![
            Node::Split {
                feature: 0,
                threshold: 0.5,
                left: 1,
                right: 2,
            },
            Node::Leaf("left"),
            Node::Leaf("right"),
        ];
        assert_eq!(*leaf_for(&nodes, &[0.5]), "left");
        assert_eq!(*leaf_for(&nodes, &[0.6]), "right");
        assert_eq!(depth(&nodes), 1);
    }
}
