//! Exact path-dependent Shapley values for decision trees.

use crate::error::{Error, Result};
use crate::forest::{normalize, ForestModel, Node, Tree};

#[derive(Clone, Copy, Debug)]
struct PathElem {
    /// `usize::MAX` marks the root placeholder.
    feature: usize,
    zero: f64,
    one: f64,
    weight: f64,
}

/// Probability that a sample at `node` continues into `child`, using
/// training cover. Shared with the brute-force evaluator so both define the
/// same conditional expectation.
pub(crate) fn child_fractions(tree: &Tree, left: usize, right: usize) -> Result<(f64, f64)> {
    let l = tree.nodes[left].cover();
    let r = tree.nodes[right].cover();
    let total = l + r;
    if !(l >= 0.0 && r >= 0.0 && total > 0.0 && total.is_finite()) {
        return Err(Error::MissingCover);
    }
    Ok((l / total, r / total))
}

fn extend(path: &mut Vec<PathElem>, zero: f64, one: f64, feature: usize) {
    let l = path.len();
    path.push(PathElem {
        feature,
        zero,
        one,
        weight: if l == 0 { 1.0 } else { 0.0 },
    });
    let lf = l as f64;
    for i in (0..l).rev() {
        path[i + 1].weight += one * path[i].weight * (i as f64 + 1.0) / (lf + 1.0);
        path[i].weight = zero * path[i].weight * (lf - i as f64) / (lf + 1.0);
    }
}

fn unwind(path: &mut Vec<PathElem>, idx: usize) {
    let l = path.len() - 1;
    let lf = l as f64;
    let one = path[idx].one;
    let zero = path[idx].zero;
    let mut next = path[l].weight;
    for j in (0..l).rev() {
        if one != 0.0 {
            let t = path[j].weight;
            path[j].weight = next * (lf + 1.0) / ((j as f64 + 1.0) * one);
            next = t - path[j].weight * zero * (lf - j as f64) / (lf + 1.0);
        } else {
            path[j].weight = path[j].weight * (lf + 1.0) / (zero * (lf - j as f64));
        }
    }
    for j in idx..l {
        path[j].feature = path[j + 1].feature;
        path[j].zero = path[j + 1].zero;
        path[j].one = path[j + 1].one;
    }
    path.truncate(l);
}

/// Sum of the weights `unwind(path, idx)` would leave, without mutating.
fn unwound_sum(path: &[PathElem], idx: usize) -> f64 {
    let l = path.len() - 1;
    let lf = l as f64;
    let one = path[idx].one;
    let zero = path[idx].zero;
    let mut next = path[l].weight;
    let mut total = 0.0;
    for j in (0..l).rev() {
        if one != 0.0 {
            let t = next * (lf + 1.0) / ((j as f64 + 1.0) * one);
            total += t;
            next = path[j].weight - t * zero * (lf - j as f64) / (lf + 1.0);
        } else {
            total += path[j].weight * (lf + 1.0) / (zero * (lf - j as f64));
        }
    }
    total
}

struct Walker<'a> {
    tree: &'a Tree,
    x: &'a [f64],
    n_classes: usize,
    /// `phi[feature * n_classes + class]`
    phi: &'a mut [f64],
}

impl Walker<'_> {
    fn recurse(
        &mut self,
        node: usize,
        mut path: Vec<PathElem>,
        zero: f64,
        one: f64,
        feature: usize,
    ) -> Result<()> {
        extend(&mut path, zero, one, feature);
        match &self.tree.nodes[node] {
            Node::Leaf { counts } => {
                if counts.len() != self.n_classes {
                    return Err(Error::invalid("leaf class count mismatch"));
                }
                let value = normalize(counts);
                for i in 1..path.len() {
                    let w = unwound_sum(&path, i);
                    let e = path[i];
                    let scale = w * (e.one - e.zero);
                    let row = &mut self.phi[e.feature * self.n_classes..][..self.n_classes];
                    for (p, v) in row.iter_mut().zip(&value) {
                        *p += scale * v;
                    }
                }
            }
            Node::Split {
                feature: f,
                threshold,
                left,
                right,
                ..
            } => {
                let (fl, fr) = child_fractions(self.tree, *left, *right)?;
                let go_left = self.x[*f] <= *threshold;
                let (hot, cold, fh, fc) = if go_left {
                    (*left, *right, fl, fr)
                } else {
                    (*right, *left, fr, fl)
                };
                let mut iz = 1.0;
                let mut io = 1.0;
                if let Some(k) = path.iter().skip(1).position(|e| e.feature == *f) {
                    let k = k + 1;
                    iz = path[k].zero;
                    io = path[k].one;
                    unwind(&mut path, k);
                }
                self.recurse(hot, path.clone(), iz * fh, io, *f)?;
                self.recurse(cold, path, iz * fc, 0.0, *f)?;
            }
        }
        Ok(())
    }
}

/// Cover-weighted expected leaf distribution of a tree.
pub fn tree_expected_value(tree: &Tree, n_classes: usize) -> Result<Vec<f64>> {
    fn go(tree: &Tree, i: usize, w: f64, out: &mut [f64]) -> Result<()> {
        match &tree.nodes[i] {
            Node::Leaf { counts } => {
                for (o, v) in out.iter_mut().zip(normalize(counts)) {
                    *o += w * v;
                }
                Ok(())
            }
            Node::Split { left, right, .. } => {
                let (fl, fr) = child_fractions(tree, *left, *right)?;
                go(tree, *left, w * fl, out)?;
                go(tree, *right, w * fr, out)
            }
        }
    }
    let mut out = vec![0.0; n_classes];
    go(tree, 0, 1.0, &mut out)?;
    Ok(out)
}

/// Adds one tree's Shapley values into `phi` (feature-major, class-minor).
pub fn tree_shap_into(tree: &Tree, x: &[f64], n_classes: usize, phi: &mut [f64]) -> Result<()> {
    let mut walker = Walker {
        tree,
        x,
        n_classes,
        phi,
    };
    let path = Vec::with_capacity(32);
    walker.recurse(0, path, 1.0, 1.0, usize::MAX)
}

/// Per-class attributions for one instance.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapExplanation {
    pub n_features: usize,
    pub n_classes: usize,
    /// Expected model output per class.
    pub base: Vec<f64>,
    /// `phi[feature * n_classes + class]`
    pub phi: Vec<f64>,
}

impl ShapExplanation {
    pub fn zeros(n_features: usize, n_classes: usize) -> Self {
        Self {
            n_features,
            n_classes,
            base: vec![0.0; n_classes],
            phi: vec![0.0; n_features * n_classes],
        }
    }

    pub fn value(&self, feature: usize, class: usize) -> f64 {
        self.phi[feature * self.n_classes + class]
    }

    /// `base + sum(phi)` per class; equals the model output when exact.
    pub fn reconstructed(&self) -> Vec<f64> {
        let mut out = self.base.clone();
        for f in 0..self.n_features {
            for (c, o) in out.iter_mut().enumerate() {
                *o += self.value(f, c);
            }
        }
        out
    }

    /// Largest `|base + sum(phi) - output|` over classes.
    pub fn local_accuracy_error(&self, output: &[f64]) -> f64 {
        self.reconstructed()
            .iter()
            .zip(output)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Exact Shapley values of the forest's class probabilities at `x`.
pub fn tree_shap(model: &ForestModel, x: &[f64]) -> Result<ShapExplanation> {
    if x.len() != model.n_features() {
        return Err(Error::LengthMismatch(format!(
            "input has {} features, model expects {}",
            x.len(),
            model.n_features()
        )));
    }
    let k = model.n_classes();
    let mut out = ShapExplanation::zeros(model.n_features(), k);
    for tree in &model.trees {
        tree_shap_into(tree, x, k, &mut out.phi)?;
        for (b, v) in out.base.iter_mut().zip(tree_expected_value(tree, k)?) {
            *b += v;
        }
    }
    let n = model.trees.len() as f64;
    out.phi.iter_mut().for_each(|p| *p /= n);
    out.base.iter_mut().for_each(|b| *b /= n);
    Ok(out)
}
