//! Bagged random forest over [`Tree`]s.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::dataset::Dataset;
use super::tree::{normalize, GrowParams, Grower, Node, Tree};

pub const MODEL_FORMAT_VERSION: &str = "lma-forest/1";

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub n_trees: usize,
    /// `None` grows until purity or `min_samples_leaf`.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    /// `None` means ⌈√n_features⌉.
    pub features_per_split: Option<usize>,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 100,
            max_depth: None,
            min_samples_leaf: 1,
            features_per_split: None,
            bootstrap: true,
            seed: 42,
        }
    }
}

impl ForestParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::invalid("n_trees must be >= 1"));
        }
        if self.max_depth == Some(0) {
            return Err(Error::invalid("max_depth must be >= 1"));
        }
        if self.min_samples_leaf == 0 {
            return Err(Error::invalid("min_samples_leaf must be >= 1"));
        }
        if self.features_per_split == Some(0) {
            return Err(Error::invalid("features_per_split must be >= 1"));
        }
        Ok(())
    }

    pub fn resolved_features_per_split(&self, n_features: usize) -> usize {
        self.features_per_split
            .unwrap_or_else(|| (n_features as f64).sqrt().ceil() as usize)
            .clamp(1, n_features.max(1))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub format_version: String,
    pub params: ForestParams,
    pub class_names: Vec<String>,
    pub feature_names: Vec<String>,
    pub trees: Vec<Tree>,
}

/// SplitMix64 finalizer, used to derive independent per-tree streams.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    mix64(seed ^ mix64(stream))
}

/// Trains a forest. Trees are grown in parallel on the current rayon pool,
/// each from its own seed, so the result does not depend on thread count.
pub fn train(data: &Dataset, params: &ForestParams) -> Result<ForestModel> {
    params.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyData("training set has no rows".into()));
    }
    if data.n_features() == 0 {
        return Err(Error::EmptyData("training set has no features".into()));
    }
    let grow = GrowParams {
        max_depth: params.max_depth,
        min_samples_leaf: params.min_samples_leaf,
        features_per_split: params.resolved_features_per_split(data.n_features()),
    };
    let n = data.len();
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(params.seed, t as u64));
            let mut samples: Vec<usize> = if params.bootstrap {
                (0..n).map(|_| rng.random_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            Grower::new(data, &grow, rng).grow(&mut samples)
        })
        .collect();
    Ok(ForestModel {
        format_version: MODEL_FORMAT_VERSION.to_string(),
        params: params.clone(),
        class_names: data.class_names().to_vec(),
        feature_names: data.feature_names().to_vec(),
        trees,
    })
}

impl ForestModel {
    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_features() {
            return Err(Error::LengthMismatch(format!(
                "input has {} features, model expects {}",
                x.len(),
                self.n_features()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("input has non-finite features"));
        }
        Ok(())
    }

    /// Mean of the per-tree leaf class frequencies.
    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let mut p = vec![0.0; self.n_classes()];
        for tree in &self.trees {
            for (acc, v) in p.iter_mut().zip(tree.leaf_distribution(x)) {
                *acc += v;
            }
        }
        let n = self.trees.len() as f64;
        Ok(p.into_iter().map(|v| v / n).collect())
    }

    /// Most probable class; ties go to the lowest class index.
    pub fn predict(&self, x: &[f64]) -> Result<usize> {
        Ok(argmax(&self.predict_proba(x)?))
    }

    pub fn predict_dataset(&self, data: &Dataset) -> Result<Vec<usize>> {
        (0..data.len())
            .into_par_iter()
            .map(|i| self.predict(data.row(i)))
            .collect()
    }

    pub fn accuracy(&self, data: &Dataset) -> Result<f64> {
        let pred = self.predict_dataset(data)?;
        Ok(accuracy(data.labels(), &pred))
    }

    /// Structural checks for a loaded model.
    pub fn validate(&self) -> Result<()> {
        if self.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(self.format_version.clone()));
        }
        if self.trees.is_empty() {
            return Err(Error::invalid("model has no trees"));
        }
        for (t, tree) in self.trees.iter().enumerate() {
            for (i, node) in tree.nodes.iter().enumerate() {
                match node {
                    Node::Split {
                        feature,
                        left,
                        right,
                        ..
                    } => {
                        if *feature >= self.n_features()
                            || *left >= tree.nodes.len()
                            || *right >= tree.nodes.len()
                            || *left <= i
                            || *right <= i
                        {
                            return Err(Error::invalid(format!("tree {t} node {i} is malformed")));
                        }
                    }
                    Node::Leaf { counts } => {
                        if counts.len() != self.n_classes() {
                            return Err(Error::invalid(format!(
                                "tree {t} leaf {i} has {} classes",
                                counts.len()
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        if let Some(v) = value.get("format_version").and_then(|v| v.as_str()) {
            if v != MODEL_FORMAT_VERSION {
                return Err(Error::UnsupportedVersion(v.to_string()));
            }
        }
        let model: Self = serde_json::from_value(value)?;
        model.validate()?;
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut w = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
        serde_json::to_writer(&mut w, self)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut text = String::new();
        std::io::Read::read_to_string(
            &mut BufReader::new(File::open(path).map_err(|e| Error::io(path, e))?),
            &mut text,
        )
        .map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

pub fn argmax(p: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in p.iter().enumerate() {
        if *v > p[best] {
            best = i;
        }
    }
    best
}

pub fn accuracy(truth: &[usize], pred: &[usize]) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    truth.iter().zip(pred).filter(|(a, b)| a == b).count() as f64 / truth.len() as f64
}

/// Distribution of a single-leaf tree, exposed for hand-built models.
pub fn leaf_distribution(counts: &[f64]) -> Vec<f64> {
    normalize(counts)
}
