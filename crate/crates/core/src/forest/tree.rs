//! CART classification trees with Gini impurity.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dataset::Dataset;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Node {
    /// `x[feature] <= threshold` goes left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        cover: f64,
    },
    /// Training class counts reaching this leaf.
    Leaf { counts: Vec<f64> },
}

impl Node {
    pub fn cover(&self) -> f64 {
        match self {
            Node::Split { cover, .. } => *cover,
            Node::Leaf { counts } => counts.iter().sum(),
        }
    }
}

/// Binary tree stored as a node arena; the root is node 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf(counts: Vec<f64>) -> Self {
        Self {
            nodes: vec![Node::Leaf { counts }],
        }
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    /// Index of the leaf reached by `x`.
    pub fn leaf_index(&self, x: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    i = if x[*feature] <= *threshold {
                        *left
                    } else {
                        *right
                    }
                }
                Node::Leaf { .. } => return i,
            }
        }
    }

    /// Class distribution of the leaf reached by `x`.
    pub fn leaf_distribution(&self, x: &[f64]) -> Vec<f64> {
        match &self.nodes[self.leaf_index(x)] {
            Node::Leaf { counts } => normalize(counts),
            Node::Split { .. } => unreachable!("leaf_index returns leaves"),
        }
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Tree, i: usize) -> usize {
            match &t.nodes[i] {
                Node::Split { left, right, .. } => 1 + go(t, *left).max(go(t, *right)),
                Node::Leaf { .. } => 0,
            }
        }
        go(self, 0)
    }

    /// Sorted distinct split features.
    pub fn features(&self) -> Vec<usize> {
        let mut f: Vec<usize> = self
            .nodes
            .iter()
            .filter_map(|n| match n {
                Node::Split { feature, .. } => Some(*feature),
                Node::Leaf { .. } => None,
            })
            .collect();
        f.sort_unstable();
        f.dedup();
        f
    }
}

pub fn normalize(counts: &[f64]) -> Vec<f64> {
    let total: f64 = counts.iter().sum();
    if total > 0.0 {
        counts.iter().map(|c| c / total).collect()
    } else {
        vec![1.0 / counts.len() as f64; counts.len()]
    }
}

pub(crate) struct GrowParams {
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub features_per_split: usize,
}

struct Candidate {
    impurity: f64,
    feature: usize,
    threshold: f64,
}

pub(crate) struct Grower<'a, R: Rng> {
    data: &'a Dataset,
    params: &'a GrowParams,
    rng: R,
    nodes: Vec<Node>,
    scratch: Vec<(f64, usize)>,
    feature_order: Vec<usize>,
}

impl<'a, R: Rng> Grower<'a, R> {
    pub fn new(data: &'a Dataset, params: &'a GrowParams, rng: R) -> Self {
        Self {
            data,
            params,
            rng,
            nodes: Vec::new(),
            scratch: Vec::new(),
            feature_order: (0..data.n_features()).collect(),
        }
    }

    pub fn grow(mut self, samples: &mut [usize]) -> Tree {
        self.build(samples, 0);
        Tree { nodes: self.nodes }
    }

    fn counts(&self, samples: &[usize]) -> Vec<f64> {
        let mut c = vec![0.0; self.data.n_classes()];
        for &i in samples {
            c[self.data.labels()[i]] += 1.0;
        }
        c
    }

    fn build(&mut self, samples: &mut [usize], depth: usize) -> usize {
        let counts = self.counts(samples);
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf {
            counts: counts.clone(),
        });

        let pure = counts.iter().filter(|&&c| c > 0.0).count() <= 1;
        let depth_reached = self.params.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_reached || samples.len() < 2 * self.params.min_samples_leaf {
            return id;
        }
        let Some(best) = self.best_split(samples, &counts) else {
            return id;
        };

        let data = self.data;
        let mut mid = 0;
        for k in 0..samples.len() {
            if data.value(samples[k], best.feature) <= best.threshold {
                samples.swap(k, mid);
                mid += 1;
            }
        }
        let (l, r) = samples.split_at_mut(mid);
        let left = self.build(l, depth + 1);
        let right = self.build(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
            cover: counts.iter().sum(),
        };
        id
    }

    /// Draws candidate features until `features_per_split` non-constant ones
    /// are found, then scans them in ascending index order so that ties go to
    /// the lowest feature index and the lowest threshold.
    fn best_split(&mut self, samples: &[usize], counts: &[f64]) -> Option<Candidate> {
        let data = self.data;
        self.feature_order.shuffle(&mut self.rng);
        let mut chosen = Vec::with_capacity(self.params.features_per_split);
        for &f in &self.feature_order {
            if chosen.len() == self.params.features_per_split {
                break;
            }
            let first = data.value(samples[0], f);
            if samples.iter().any(|&i| data.value(i, f) != first) {
                chosen.push(f);
            }
        }
        chosen.sort_unstable();

        let total_sq: f64 = counts.iter().map(|c| c * c).sum();
        let min_leaf = self.params.min_samples_leaf;
        let mut best: Option<Candidate> = None;
        let mut left = vec![0.0; counts.len()];
        for f in chosen {
            self.scratch.clear();
            self.scratch.extend(
                samples
                    .iter()
                    .map(|&i| (data.value(i, f), data.labels()[i])),
            );
            self.scratch.sort_by(|a, b| a.0.total_cmp(&b.0));
            left.iter_mut().for_each(|c| *c = 0.0);
            let mut left_sq = 0.0;
            let mut right_sq = total_sq;
            for k in 0..self.scratch.len() - 1 {
                let (v, c) = self.scratch[k];
                let r = counts[c] - left[c];
                right_sq += (r - 1.0) * (r - 1.0) - r * r;
                left_sq += (left[c] + 1.0) * (left[c] + 1.0) - left[c] * left[c];
                left[c] += 1.0;
                let next = self.scratch[k + 1].0;
                let n_left = k + 1;
                let n_right = self.scratch.len() - n_left;
                if v == next || n_left < min_leaf || n_right < min_leaf {
                    continue;
                }
                let (nl, nr) = (n_left as f64, n_right as f64);
                // n · weighted Gini of the children
                let impurity = (nl - left_sq / nl) + (nr - right_sq / nr);
                if best.as_ref().is_none_or(|b| impurity < b.impurity) {
                    let mut threshold = v + (next - v) / 2.0;
                    if threshold >= next {
                        threshold = v;
                    }
                    best = Some(Candidate {
                        impurity,
                        feature: f,
                        threshold,
                    });
                }
            }
        }
        best
    }
}
