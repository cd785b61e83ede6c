//! Feature attributions for forest models.

mod brute;
mod permutation;
mod summary;
mod tree;

pub use brute::{brute_shap, BRUTE_FEATURE_LIMIT};
pub use permutation::{permutation_importance, FeatureImportance, ImportanceMetric};
pub use summary::{summary_rank, write_shap_csv, write_summary_csv, RankedFeature, DEFAULT_TOP_K};
pub use tree::{tree_expected_value, tree_shap, tree_shap_into, ShapExplanation};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest::{ForestModel, ForestParams, Node, Tree, MODEL_FORMAT_VERSION};

    fn model(trees: Vec<Tree>, n_features: usize, n_classes: usize) -> ForestModel {
        ForestModel {
            format_version: MODEL_FORMAT_VERSION.into(),
            params: ForestParams::default(),
            class_names: (0..n_classes).map(|c| format!("c{c}")).collect(),
            feature_names: (0..n_features).map(|f| format!("f{f}")).collect(),
            trees,
        }
    }

    fn stump(feature: usize, threshold: f64, left: Vec<f64>, right: Vec<f64>) -> Tree {
        let cover = left.iter().sum::<f64>() + right.iter().sum::<f64>();
        Tree {
            nodes: vec![
                Node::Split {
                    feature,
                    threshold,
                    left: 1,
                    right: 2,
                    cover,
                },
                Node::Leaf { counts: left },
                Node::Leaf { counts: right },
            ],
        }
    }

    #[test]
    fn stump_attribution_is_output_minus_mean() {
        // left: p(c0)=1 with cover 3; right: p(c0)=0 with cover 1
        let m = model(vec![stump(1, 0.5, vec![3.0, 0.0], vec![0.0, 1.0])], 2, 2);
        let e = tree_shap(&m, &[9.0, 0.0]).unwrap();
        assert!((e.base[0] - 0.75).abs() < 1e-15);
        assert!((e.value(1, 0) - 0.25).abs() < 1e-15);
        assert!((e.value(1, 1) + 0.25).abs() < 1e-15);
        assert_eq!(e.value(0, 0), 0.0);
    }

    #[test]
    fn repeated_feature_on_path() {
        let t = Tree {
            nodes: vec![
                Node::Split {
                    feature: 0,
                    threshold: 0.0,
                    left: 1,
                    right: 2,
                    cover: 10.0,
                },
                Node::Split {
                    feature: 1,
                    threshold: 0.0,
                    left: 3,
                    right: 4,
                    cover: 6.0,
                },
                Node::Leaf {
                    counts: vec![1.0, 3.0],
                },
                Node::Split {
                    feature: 0,
                    threshold: -1.0,
                    left: 5,
                    right: 6,
                    cover: 4.0,
                },
                Node::Leaf {
                    counts: vec![2.0, 0.0],
                },
                Node::Leaf {
                    counts: vec![3.0, 0.0],
                },
                Node::Leaf {
                    counts: vec![0.0, 1.0],
                },
            ],
        };
        let m = model(vec![t], 3, 2);
        for x in [
            [-0.5, -1.0, 0.0],
            [-2.0, -1.0, 1.0],
            [1.0, 1.0, 1.0],
            [-0.5, 2.0, 0.0],
        ] {
            let fast = tree_shap(&m, &x).unwrap();
            let slow = brute_shap(&m, &x).unwrap();
            for (a, b) in fast.phi.iter().zip(&slow.phi) {
                assert!((a - b).abs() < 1e-12, "{a} vs {b}");
            }
            let out = m.predict_proba(&x).unwrap();
            assert!(fast.local_accuracy_error(&out) < 1e-12);
        }
    }

    #[test]
    fn zero_cover_is_rejected() {
        let m = model(vec![stump(0, 0.0, vec![0.0, 0.0], vec![0.0, 0.0])], 1, 2);
        assert!(matches!(
            tree_shap(&m, &[0.0]),
            Err(crate::Error::MissingCover)
        ));
    }

    #[test]
    fn summary_ranks_and_ties() {
        let mut a = ShapExplanation::zeros(3, 1);
        a.phi = vec![0.1, -0.5, 0.1];
        let names: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let r = summary_rank(&[a], &names, None).unwrap();
        let order: Vec<usize> = r.iter().map(|f| f.feature).collect();
        assert_eq!(order, vec![1, 0, 2]);
        assert_eq!(r[0].rank, 1);
    }
}
