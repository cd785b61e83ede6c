//! Permutation importance on a held-out dataset.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::{classification_report, derive_seed, Dataset, ForestModel};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImportanceMetric {
    #[default]
    Accuracy,
    MacroF1,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeatureImportance {
    pub feature: usize,
    pub name: String,
    /// Mean drop in the metric when the column is shuffled.
    pub mean: f64,
    pub std: f64,
}

fn score(model: &ForestModel, data: &Dataset, metric: ImportanceMetric) -> Result<f64> {
    let pred = model.predict_dataset(data)?;
    Ok(match metric {
        ImportanceMetric::Accuracy => crate::forest::accuracy(data.labels(), &pred),
        ImportanceMetric::MacroF1 => {
            classification_report(data.labels(), &pred, data.class_names())?.macro_f1
        }
    })
}

/// Each (feature, repeat) shuffle has its own seed, so the result is the
/// same for any thread count.
pub fn permutation_importance(
    model: &ForestModel,
    data: &Dataset,
    metric: ImportanceMetric,
    repeats: usize,
    seed: u64,
) -> Result<Vec<FeatureImportance>> {
    if repeats == 0 {
        return Err(Error::invalid("repeats must be positive"));
    }
    if data.is_empty() {
        return Err(Error::EmptyData("no rows to score".into()));
    }
    if data.n_features() != model.n_features() {
        return Err(Error::LengthMismatch(format!(
            "data has {} features, model expects {}",
            data.n_features(),
            model.n_features()
        )));
    }
    let baseline = score(model, data, metric)?;
    (0..data.n_features())
        .into_par_iter()
        .map(|f| {
            let column = data.column(f);
            let drops = (0..repeats)
                .map(|r| {
                    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
                        derive_seed(seed, f as u64),
                        r as u64,
                    ));
                    let mut shuffled = column.clone();
                    shuffled.shuffle(&mut rng);
                    Ok(baseline - score(model, &data.with_column(f, &shuffled), metric)?)
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(FeatureImportance {
                feature: f,
                name: data.feature_names()[f].clone(),
                mean: crate::geom::mean(&drops),
                std: crate::geom::std_dev(&drops),
            })
        })
        .collect()
}
