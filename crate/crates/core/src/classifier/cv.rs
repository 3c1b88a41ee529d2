use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{train, Dataset, ModelParams};
use crate::error::{Error, Result};
use crate::metrics::{confusion_matrix, f1_macro};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FoldResult {
    pub fold: usize,
    pub train_size: usize,
    pub validation_size: usize,
    pub accuracy: f64,
    pub f1_macro: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CvReport {
    pub k: usize,
    pub seed: u64,
    /// False when some class had fewer than `k` members.
    pub stratified: bool,
    pub folds: Vec<FoldResult>,
    pub mean_accuracy: f64,
    pub mean_f1_macro: f64,
    /// Validation fold of every row.
    #[serde(skip)]
    pub assignment: Vec<usize>,
}

/// Assigns every row to one of `k` folds.
///
/// Rows are shuffled with the seed, then dealt round-robin class by class so
/// each fold gets a near-equal share of every class. When a class present in
/// the data has fewer than `k` rows the shuffled rows are dealt without regard
/// to class. Returns the assignment and whether it is stratified.
pub fn fold_assignment(labels: &[usize], n_classes: usize, k: usize, seed: u64) -> (Vec<usize>, bool) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.shuffle(&mut rng);

    let mut counts = vec![0usize; n_classes];
    for &l in labels {
        counts[l] += 1;
    }
    let stratified = counts.iter().all(|&c| c == 0 || c >= k);
    let mut folds = vec![0; labels.len()];
    if stratified {
        let mut next = 0;
        for class in 0..n_classes {
            for &i in order.iter().filter(|&&i| labels[i] == class) {
                folds[i] = next % k;
                next += 1;
            }
        }
    } else {
        warn!("a class has fewer than {k} rows; using unstratified folds");
        for (pos, &i) in order.iter().enumerate() {
            folds[i] = pos % k;
        }
    }
    (folds, stratified)
}

/// k-fold cross-validation reporting accuracy and F1-macro per fold.
///
/// Folds are trained on separate threads; results are ordered by fold.
pub fn cross_validate(ds: &Dataset, params: &ModelParams, k: usize, seed: u64) -> Result<CvReport> {
    if k < 2 {
        return Err(Error::Config(format!("k must be at least 2, got {k}")));
    }
    if ds.len() < k {
        return Err(Error::Data(format!(
            "{} rows cannot be split into {k} folds",
            ds.len()
        )));
    }
    let (assignment, stratified) = fold_assignment(ds.labels(), ds.n_classes(), k, seed);

    let run_fold = |fold: usize| -> Result<FoldResult> {
        let train_idx: Vec<usize> = (0..ds.len()).filter(|&i| assignment[i] != fold).collect();
        let val_idx: Vec<usize> = (0..ds.len()).filter(|&i| assignment[i] == fold).collect();
        let model = train(&ds.subset(&train_idx), params, seed)?;
        let mut predicted = Vec::with_capacity(val_idx.len());
        for &i in &val_idx {
            predicted.push(model.predict(&ds.rows()[i])?.class);
        }
        let truth: Vec<usize> = val_idx.iter().map(|&i| ds.labels()[i]).collect();
        let correct = truth.iter().zip(&predicted).filter(|(a, b)| a == b).count();
        let confusion = confusion_matrix(&truth, &predicted, ds.n_classes());
        Ok(FoldResult {
            fold,
            train_size: train_idx.len(),
            validation_size: val_idx.len(),
            accuracy: correct as f64 / val_idx.len() as f64,
            f1_macro: f1_macro(&confusion),
        })
    };

    let folds: Vec<FoldResult> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..k).map(|f| scope.spawn(move || run_fold(f))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("cross-validation worker panicked"))
            .collect::<Result<_>>()
    })?;

    let mean_accuracy = folds.iter().map(|f| f.accuracy).sum::<f64>() / k as f64;
    let mean_f1_macro = folds.iter().map(|f| f.f1_macro).sum::<f64>() / k as f64;
    Ok(CvReport {
        k,
        seed,
        stratified,
        folds,
        mean_accuracy,
        mean_f1_macro,
        assignment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{TreeParams};

    fn balanced(n: usize, classes: usize) -> Dataset {
        let rows = (0..n).map(|i| vec![(i % classes) as f64]).collect();
        let labels = (0..n).map(|i| i % classes).collect();
        let names = (0..classes).map(|c| format!("c{c}")).collect();
        Dataset::new(rows, labels, names).unwrap()
    }

    #[test]
    fn seven_hundred_rows_make_folds_of_140() {
        let ds = balanced(700, 6);
        let (folds, stratified) = fold_assignment(ds.labels(), 6, 5, 7);
        assert!(stratified);
        for f in 0..5 {
            assert_eq!(folds.iter().filter(|&&x| x == f).count(), 140);
        }
    }

    #[test]
    fn stratification_spreads_each_class() {
        let ds = balanced(60, 3);
        let (folds, _) = fold_assignment(ds.labels(), 3, 5, 1);
        for c in 0..3 {
            for f in 0..5 {
                let n = (0..60).filter(|&i| ds.labels()[i] == c && folds[i] == f).count();
                assert_eq!(n, 4);
            }
        }
    }

    #[test]
    fn rare_class_falls_back_to_unstratified() {
        let labels = vec![0, 0, 0, 0, 0, 0, 1];
        let (folds, stratified) = fold_assignment(&labels, 2, 3, 0);
        assert!(!stratified);
        assert_eq!(folds.len(), 7);
    }

    #[test]
    fn memorisable_data_is_perfect() {
        // Every class is one repeated vector, so each fold's training part has seen it.
        let ds = balanced(30, 3);
        let r = cross_validate(&ds, &ModelParams::Dt(TreeParams::default()), 5, 3).unwrap();
        assert_eq!(r.folds.len(), 5);
        assert_eq!(r.mean_accuracy, 1.0);
        assert_eq!(r.mean_f1_macro, 1.0);
    }

    #[test]
    fn same_seed_same_report() {
        let rows = (0..40).map(|i| vec![((i * 7) % 11) as f64, (i % 3) as f64]).collect();
        let labels = (0..40).map(|i| (i * 5 % 7) % 3).collect();
        let ds = Dataset::new(rows, labels, vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let p = ModelParams::Dt(TreeParams::new(3, crate::classifier::Criterion::Entropy).unwrap());
        let a = cross_validate(&ds, &p, 4, 11).unwrap();
        let b = cross_validate(&ds, &p, 4, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.assignment, b.assignment);
        let c = cross_validate(&ds, &p, 4, 12).unwrap();
        assert_ne!(a.assignment, c.assignment);
    }

    #[test]
    fn invalid_k() {
        let ds = balanced(3, 3);
        let p = ModelParams::Dt(TreeParams::default());
        assert!(cross_validate(&ds, &p, 1, 0).is_err());
        assert!(cross_validate(&ds, &p, 4, 0).is_err());
    }
}
