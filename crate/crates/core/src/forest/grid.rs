//! Exhaustive hyperparameter search with grouped cross-validation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{mean, std_dev};

use super::cv::{cross_validate, dataset_folds};
use super::dataset::Dataset;
use super::model::ForestParams;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParamGrid {
    pub n_trees: Vec<usize>,
    /// `None` entries mean unlimited depth; written as `"none"`.
    #[serde(with = "depth_list")]
    pub max_depth: Vec<Option<usize>>,
    pub min_samples_leaf: Vec<usize>,
}

impl Default for ParamGrid {
    fn default() -> Self {
        Self {
            n_trees: vec![50, 100, 200],
            max_depth: vec![Some(8), Some(12), None],
            min_samples_leaf: vec![1, 5],
        }
    }
}

mod depth_list {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Depth {
        Limit(usize),
        Word(String),
    }

    pub fn serialize<S: Serializer>(v: &[Option<usize>], s: S) -> Result<S::Ok, S::Error> {
        let items: Vec<Depth> = v
            .iter()
            .map(|d| match d {
                Some(n) => Depth::Limit(*n),
                None => Depth::Word("none".into()),
            })
            .collect();
        items.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Option<usize>>, D::Error> {
        Vec::<Depth>::deserialize(d)?
            .into_iter()
            .map(|item| match item {
                Depth::Limit(n) => Ok(Some(n)),
                Depth::Word(w) if w == "none" => Ok(None),
                Depth::Word(w) => Err(serde::de::Error::custom(format!(
                    "max_depth entries must be integers or \"none\", got {w:?}"
                ))),
            })
            .collect()
    }
}

impl ParamGrid {
    /// Lattice points in row-major order (trees, depth, leaf size); other
    /// fields come from `base`.
    pub fn lattice(&self, base: &ForestParams) -> Vec<ForestParams> {
        let mut out = Vec::new();
        for &n_trees in &self.n_trees {
            for &max_depth in &self.max_depth {
                for &min_samples_leaf in &self.min_samples_leaf {
                    out.push(ForestParams {
                        n_trees,
                        max_depth,
                        min_samples_leaf,
                        ..base.clone()
                    });
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridPoint {
    pub params: ForestParams,
    pub fold_accuracy: Vec<f64>,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    /// Out-of-fold prediction for every row.
    #[serde(skip)]
    pub predictions: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSearchReport {
    pub best: ForestParams,
    pub best_index: usize,
    pub points: Vec<GridPoint>,
}

fn depth_key(d: Option<usize>) -> usize {
    d.unwrap_or(usize::MAX)
}

/// Evaluates every lattice point on the same grouped folds and picks the
/// highest mean validation accuracy; ties prefer fewer trees, then
/// shallower depth, then the earlier lattice point.
pub fn grid_search(
    data: &Dataset,
    lattice: &[ForestParams],
    k: usize,
    seed: u64,
) -> Result<GridSearchReport> {
    if lattice.is_empty() {
        return Err(Error::invalid("parameter grid is empty"));
    }
    let folds = dataset_folds(data, k, seed)?;
    let mut points = Vec::with_capacity(lattice.len());
    for params in lattice {
        let cv = cross_validate(data, params, &folds)?;
        points.push(GridPoint {
            params: params.clone(),
            mean_accuracy: mean(&cv.fold_accuracy),
            std_accuracy: std_dev(&cv.fold_accuracy),
            fold_accuracy: cv.fold_accuracy,
            predictions: cv.predictions,
        });
    }
    let mut best_index = 0;
    for (i, p) in points.iter().enumerate().skip(1) {
        let b = &points[best_index];
        let better = p.mean_accuracy > b.mean_accuracy
            || (p.mean_accuracy == b.mean_accuracy
                && (p.params.n_trees, depth_key(p.params.max_depth))
                    < (b.params.n_trees, depth_key(b.params.max_depth)));
        if better {
            best_index = i;
        }
    }
    Ok(GridSearchReport {
        best: points[best_index].params.clone(),
        best_index,
        points,
    })
}
