//! Stratified, grouped k-fold splitting and cross-validated evaluation.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::dataset::Dataset;
use super::model::{accuracy, train, ForestParams};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Splits rows into `k` folds such that no group straddles folds.
///
/// Each group is assigned to its majority class. Within a class, groups are
/// shuffled with `seed`, ordered by size (largest first) and dealt to the
/// fold currently holding the fewest rows of that class; ties go to the
/// fold with fewer rows overall, then the lowest fold index.
pub fn stratified_group_kfold(
    y: &[usize],
    groups: &[String],
    k: usize,
    seed: u64,
) -> Result<Vec<Fold>> {
    if y.len() != groups.len() {
        return Err(Error::LengthMismatch(format!(
            "{} labels, {} groups",
            y.len(),
            groups.len()
        )));
    }
    if k < 2 {
        return Err(Error::invalid(format!("k must be >= 2, got {k}")));
    }
    if y.is_empty() {
        return Err(Error::EmptyData("no rows to split".into()));
    }
    let n_classes = y.iter().max().map_or(0, |m| m + 1);

    let mut members: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, g) in groups.iter().enumerate() {
        members.entry(g.as_str()).or_default().push(i);
    }

    let mut groups_per_class = vec![0usize; n_classes];
    let mut by_class: Vec<Vec<(&str, usize)>> = vec![Vec::new(); n_classes];
    for (name, rows) in &members {
        let mut hist = vec![0usize; n_classes];
        for &i in rows {
            hist[y[i]] += 1;
        }
        for (c, &h) in hist.iter().enumerate() {
            if h > 0 {
                groups_per_class[c] += 1;
            }
        }
        let major = (0..n_classes).fold(0, |b, c| if hist[c] > hist[b] { c } else { b });
        by_class[major].push((name, rows.len()));
    }
    for (c, &g) in groups_per_class.iter().enumerate() {
        if g > 0 && g < k {
            return Err(Error::TooFewGroups {
                class: c.to_string(),
                groups: g,
                k,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of: BTreeMap<&str, usize> = BTreeMap::new();
    let mut fold_total = vec![0usize; k];
    for class_groups in by_class.iter_mut() {
        class_groups.shuffle(&mut rng);
        class_groups.sort_by_key(|g| std::cmp::Reverse(g.1));
        let mut fold_class = vec![0usize; k];
        for &(name, size) in class_groups.iter() {
            let f = (0..k)
                .min_by_key(|&f| (fold_class[f], fold_total[f], f))
                .expect("k >= 2");
            fold_class[f] += size;
            fold_total[f] += size;
            fold_of.insert(name, f);
        }
    }

    Ok((0..k)
        .map(|f| {
            let (test, train): (Vec<usize>, Vec<usize>) =
                (0..y.len()).partition(|&i| fold_of[groups[i].as_str()] == f);
            Fold { train, test }
        })
        .collect())
}

/// Folds for a dataset, reporting class names in errors.
pub fn dataset_folds(data: &Dataset, k: usize, seed: u64) -> Result<Vec<Fold>> {
    stratified_group_kfold(data.labels(), data.groups(), k, seed).map_err(|e| match e {
        Error::TooFewGroups { class, groups, k } => Error::TooFewGroups {
            class: class
                .parse::<usize>()
                .ok()
                .and_then(|c| data.class_names().get(c).cloned())
                .unwrap_or(class),
            groups,
            k,
        },
        other => other,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CvOutcome {
    pub fold_accuracy: Vec<f64>,
    /// Out-of-fold prediction for every row.
    pub predictions: Vec<usize>,
}

impl CvOutcome {
    pub fn mean_accuracy(&self) -> f64 {
        crate::geom::mean(&self.fold_accuracy)
    }

    pub fn std_accuracy(&self) -> f64 {
        crate::geom::std_dev(&self.fold_accuracy)
    }
}

/// Trains on each fold's training rows and predicts its test rows.
pub fn cross_validate(data: &Dataset, params: &ForestParams, folds: &[Fold]) -> Result<CvOutcome> {
    let mut predictions = vec![0usize; data.len()];
    let mut fold_accuracy = Vec::with_capacity(folds.len());
    for fold in folds {
        let model = train(&data.subset(&fold.train), params)?;
        let test = data.subset(&fold.test);
        let pred = model.predict_dataset(&test)?;
        fold_accuracy.push(accuracy(test.labels(), &pred));
        for (&i, p) in fold.test.iter().zip(pred) {
            predictions[i] = p;
        }
    }
    Ok(CvOutcome {
        fold_accuracy,
        predictions,
    })
}
