//! Shapley values by explicit subset enumeration. Exponential in the
//! number of features the model actually uses; meant as a reference.

use crate::error::{Error, Result};
use crate::forest::{normalize, ForestModel, Node, Tree};

use super::tree::{child_fractions, tree_expected_value, ShapExplanation};

pub const BRUTE_FEATURE_LIMIT: usize = 12;

/// Expected tree output when features in `known` are fixed to `x` and the
/// rest are averaged out along training cover.
fn conditional_value(
    tree: &Tree,
    x: &[f64],
    known: &dyn Fn(usize) -> bool,
    n_classes: usize,
) -> Result<Vec<f64>> {
    fn go(
        tree: &Tree,
        i: usize,
        x: &[f64],
        known: &dyn Fn(usize) -> bool,
        w: f64,
        out: &mut [f64],
    ) -> Result<()> {
        match &tree.nodes[i] {
            Node::Leaf { counts } => {
                for (o, v) in out.iter_mut().zip(normalize(counts)) {
                    *o += w * v;
                }
                Ok(())
            }
            Node::Split {
                feature,
                threshold,
                left,
                right,
                ..
            } => {
                if known(*feature) {
                    let next = if x[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    };
                    go(tree, next, x, known, w, out)
                } else {
                    let (fl, fr) = child_fractions(tree, *left, *right)?;
                    go(tree, *left, x, known, w * fl, out)?;
                    go(tree, *right, x, known, w * fr, out)
                }
            }
        }
    }
    let mut out = vec![0.0; n_classes];
    go(tree, 0, x, known, 1.0, &mut out)?;
    Ok(out)
}

/// Reference Shapley values for the forest at `x`, enumerating every
/// subset of the features used by any split.
pub fn brute_shap(model: &ForestModel, x: &[f64]) -> Result<ShapExplanation> {
    if x.len() != model.n_features() {
        return Err(Error::LengthMismatch(format!(
            "input has {} features, model expects {}",
            x.len(),
            model.n_features()
        )));
    }
    let mut used: Vec<usize> = model.trees.iter().flat_map(|t| t.features()).collect();
    used.sort_unstable();
    used.dedup();
    let m = used.len();
    if m > BRUTE_FEATURE_LIMIT {
        return Err(Error::TooManyFeatures {
            found: m,
            limit: BRUTE_FEATURE_LIMIT,
        });
    }
    let k = model.n_classes();
    let n_trees = model.trees.len() as f64;

    let mut slot = vec![usize::MAX; model.n_features()];
    for (s, &f) in used.iter().enumerate() {
        slot[f] = s;
    }
    let mut values = Vec::with_capacity(1 << m);
    for mask in 0u32..(1u32 << m) {
        let known = |f: usize| slot[f] != usize::MAX && mask & (1 << slot[f]) != 0;
        let mut v = vec![0.0; k];
        for tree in &model.trees {
            for (a, b) in v.iter_mut().zip(conditional_value(tree, x, &known, k)?) {
                *a += b / n_trees;
            }
        }
        values.push(v);
    }

    // |S|! (m - |S| - 1)! / m!
    let mut fact = vec![1.0f64; m + 1];
    for i in 1..=m {
        fact[i] = fact[i - 1] * i as f64;
    }
    let mut out = ShapExplanation::zeros(model.n_features(), k);
    for (s, &f) in used.iter().enumerate() {
        let bit = 1u32 << s;
        for mask in 0u32..(1u32 << m) {
            if mask & bit != 0 {
                continue;
            }
            let size = mask.count_ones() as usize;
            let w = fact[size] * fact[m - size - 1] / fact[m];
            let with = &values[(mask | bit) as usize];
            let without = &values[mask as usize];
            for c in 0..k {
                out.phi[f * k + c] += w * (with[c] - without[c]);
            }
        }
    }
    for tree in &model.trees {
        for (b, v) in out.base.iter_mut().zip(tree_expected_value(tree, k)?) {
            *b += v / n_trees;
        }
    }
    Ok(out)
}
