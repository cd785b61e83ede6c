use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::lma::{feature_names, WindowFeatures};

/// Row-major feature matrix with class labels and source-group ids.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    x: Vec<f64>,
    n_features: usize,
    y: Vec<usize>,
    groups: Vec<String>,
    feature_names: Vec<String>,
    class_names: Vec<String>,
}

impl Dataset {
    pub fn new(
        rows: Vec<Vec<f64>>,
        y: Vec<usize>,
        groups: Vec<String>,
        feature_names: Vec<String>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        let n_features = feature_names.len();
        if rows.len() != y.len() || rows.len() != groups.len() {
            return Err(Error::LengthMismatch(format!(
                "{} rows, {} labels, {} groups",
                rows.len(),
                y.len(),
                groups.len()
            )));
        }
        let mut x = Vec::with_capacity(rows.len() * n_features);
        for (i, r) in rows.into_iter().enumerate() {
            if r.len() != n_features {
                return Err(Error::LengthMismatch(format!(
                    "row {i} has {} features, expected {n_features}",
                    r.len()
                )));
            }
            if r.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("row {i} has non-finite features")));
            }
            x.extend(r);
        }
        if let Some(bad) = y.iter().find(|&&c| c >= class_names.len()) {
            return Err(Error::invalid(format!(
                "label {bad} outside {} classes",
                class_names.len()
            )));
        }
        Ok(Self {
            x,
            n_features,
            y,
            groups,
            feature_names,
            class_names,
        })
    }

    /// Builds a dataset from labeled descriptors; classes are the sorted
    /// distinct labels.
    pub fn from_features(rows: &[WindowFeatures]) -> Result<Self> {
        let classes: BTreeSet<&str> = rows
            .iter()
            .map(|r| {
                r.label.as_deref().ok_or_else(|| {
                    Error::invalid(format!(
                        "window {} of group `{}` has no label",
                        r.window_start, r.group_id
                    ))
                })
            })
            .collect::<Result<_>>()?;
        let class_names: Vec<String> = classes.into_iter().map(str::to_string).collect();
        Self::from_features_with_classes(rows, class_names)
    }

    pub fn from_features_with_classes(
        rows: &[WindowFeatures],
        class_names: Vec<String>,
    ) -> Result<Self> {
        let y = rows
            .iter()
            .map(|r| {
                let label = r.label.as_deref().unwrap_or_default();
                class_names
                    .iter()
                    .position(|c| c == label)
                    .ok_or_else(|| Error::SchemaMismatch(format!("unknown class `{label}`")))
            })
            .collect::<Result<_>>()?;
        Self::new(
            rows.iter().map(|r| r.values.to_vec()).collect(),
            y,
            rows.iter().map(|r| r.group_id.clone()).collect(),
            feature_names(),
            class_names,
        )
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.x[i * self.n_features..(i + 1) * self.n_features]
    }

    pub fn value(&self, i: usize, feature: usize) -> f64 {
        self.x[i * self.n_features + feature]
    }

    pub fn labels(&self) -> &[usize] {
        &self.y
    }

    pub fn groups(&self) -> &[String] {
        &self.groups
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let mut x = Vec::with_capacity(indices.len() * self.n_features);
        for &i in indices {
            x.extend_from_slice(self.row(i));
        }
        Self {
            x,
            n_features: self.n_features,
            y: indices.iter().map(|&i| self.y[i]).collect(),
            groups: indices.iter().map(|&i| self.groups[i].clone()).collect(),
            feature_names: self.feature_names.clone(),
            class_names: self.class_names.clone(),
        }
    }

    /// Copy with column `feature` replaced.
    pub fn with_column(&self, feature: usize, values: &[f64]) -> Self {
        let mut out = self.clone();
        for (i, v) in values.iter().enumerate() {
            out.x[i * self.n_features + feature] = *v;
        }
        out
    }

    pub fn column(&self, feature: usize) -> Vec<f64> {
        (0..self.len()).map(|i| self.value(i, feature)).collect()
    }
}
