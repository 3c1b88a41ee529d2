use std::collections::HashMap;

use serde::Serialize;

/// Precision, recall and F1 from match counts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Prf {
    pub matched: usize,
    pub predicted_total: usize,
    pub gold_total: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

impl Prf {
    /// Zero denominators give zero scores.
    pub fn from_counts(matched: usize, predicted_total: usize, gold_total: usize) -> Self {
        let precision = ratio(matched, predicted_total);
        let recall = ratio(matched, gold_total);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Prf {
            matched,
            predicted_total,
            gold_total,
            precision,
            recall,
            f1,
        }
    }
}

/// Dependency-pair precision/recall/F1.
pub type PairScore = Prf;

/// Compares directed, unlabeled lemma pairs as multisets; each gold pair can
/// be matched once.
pub fn pair_f1<S: AsRef<str>>(pred: &[(S, S)], gold: &[(S, S)]) -> PairScore {
    let mut remaining: HashMap<(&str, &str), usize> = HashMap::new();
    for (p, c) in gold {
        *remaining.entry((p.as_ref(), c.as_ref())).or_default() += 1;
    }
    let mut matched = 0;
    for (p, c) in pred {
        if let Some(n) = remaining.get_mut(&(p.as_ref(), c.as_ref())) {
            if *n > 0 {
                *n -= 1;
                matched += 1;
            }
        }
    }
    Prf::from_counts(matched, pred.len(), gold.len())
}

/// `k x k` counts, rows indexed by true class and columns by predicted class.
pub fn confusion_matrix(truth: &[usize], predicted: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut m = vec![vec![0; k]; k];
    for (&t, &p) in truth.iter().zip(predicted) {
        m[t][p] += 1;
    }
    m
}

/// Unweighted mean of per-class F1. A class nobody predicted and nobody
/// labeled contributes 0.
pub fn f1_macro(confusion: &[Vec<usize>]) -> f64 {
    let k = confusion.len();
    if k == 0 {
        return 0.0;
    }
    let total: f64 = (0..k)
        .map(|c| {
            let tp = confusion[c][c];
            let predicted: usize = confusion.iter().map(|row| row[c]).sum();
            let actual: usize = confusion[c].iter().sum();
            Prf::from_counts(tp, predicted, actual).f1
        })
        .sum();
    total / k as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(v: &[(&'static str, &'static str)]) -> Vec<(&'static str, &'static str)> {
        v.to_vec()
    }

    #[test]
    fn identical_pairs() {
        let p = pairs(&[("makan", "aku"), ("makan", "kue")]);
        let s = pair_f1(&p, &p);
        assert_eq!((s.precision, s.recall, s.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn extra_prediction() {
        let pred = pairs(&[("makan", "aku"), ("makan", "kue"), ("makan", "teras")]);
        let gold = pairs(&[("makan", "aku"), ("makan", "kue")]);
        let s = pair_f1(&pred, &gold);
        assert_eq!(s.matched, 2);
        assert!((s.precision - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.recall, 1.0);
        assert!((s.f1 - 0.8).abs() < 1e-15);
    }

    #[test]
    fn duplicates_are_consumed_once() {
        let pred = pairs(&[("a", "b"), ("a", "b")]);
        let gold = pairs(&[("a", "b")]);
        assert_eq!(pair_f1(&pred, &gold).matched, 1);
        assert_eq!(pair_f1(&gold, &pred).matched, 1);
        let empty: Vec<(&str, &str)> = vec![];
        assert_eq!(pair_f1(&empty, &empty).f1, 0.0);
    }

    #[test]
    fn macro_f1_examples() {
        assert_eq!(f1_macro(&[vec![3, 0], vec![0, 4]]), 1.0);
        let f = f1_macro(&[vec![5, 5], vec![0, 10]]);
        assert!((f - (2.0 / 3.0 + 0.8) / 2.0).abs() < 1e-15);
        assert_eq!(f1_macro(&[vec![0, 0], vec![0, 0]]), 0.0);
        assert_eq!(f1_macro(&[]), 0.0);
    }

    #[test]
    fn one_class_predictor_on_balanced_six_classes() {
        // Everything predicted as class 0, 10 rows per class.
        let truth: Vec<usize> = (0..60).map(|i| i % 6).collect();
        let pred = vec![0; 60];
        let f = f1_macro(&confusion_matrix(&truth, &pred, 6));
        let expected = (2.0 * (1.0 / 6.0) / (1.0 + 1.0 / 6.0)) / 6.0;
        assert!((f - expected).abs() < 1e-15);
        assert!((f - 0.0476).abs() < 1e-4);
    }

    #[test]
    fn zero_denominators() {
        let s = Prf::from_counts(0, 0, 5);
        assert_eq!((s.precision, s.recall, s.f1), (0.0, 0.0, 0.0));
    }
}
