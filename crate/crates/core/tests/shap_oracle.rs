use lma_core::forest::{
    train, Dataset, ForestModel, ForestParams, Node, Tree, MODEL_FORMAT_VERSION,
};
use lma_core::shap::{brute_shap, summary_rank, tree_shap, BRUTE_FEATURE_LIMIT};
use lma_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_dataset(rng: &mut ChaCha8Rng, n: usize, nf: usize, k: usize) -> Dataset {
    let mut rows = Vec::new();
    let mut y = Vec::new();
    for _ in 0..n {
        let row: Vec<f64> = (0..nf)
            .map(|_| (rng.random_range(-3.0f64..3.0) * 4.0).round() / 4.0)
            .collect();
        let score = row[0] + 0.5 * row[1 % nf] - row[nf - 1] + rng.random_range(-1.0..1.0);
        y.push(((score + 4.0).max(0.0) as usize * k / 8).min(k - 1));
        rows.push(row);
    }
    // every class present
    for (c, label) in y.iter_mut().take(k).enumerate() {
        *label = c;
    }
    Dataset::new(
        rows,
        y,
        (0..n).map(|i| format!("g{}", i % 7)).collect(),
        (0..nf).map(|f| format!("f{f}")).collect(),
        (0..k).map(|c| format!("c{c}")).collect(),
    )
    .unwrap()
}

/// Random tree of depth ≤ `depth` with arbitrary covers and repeated features.
fn random_tree(rng: &mut ChaCha8Rng, nf: usize, k: usize, depth: usize) -> Tree {
    fn build(
        rng: &mut ChaCha8Rng,
        nodes: &mut Vec<Node>,
        nf: usize,
        k: usize,
        depth: usize,
    ) -> usize {
        let id = nodes.len();
        if depth == 0 || rng.random_bool(0.2) {
            let counts = (0..k)
                .map(|_| rng.random_range(0..5) as f64 + 0.5)
                .collect();
            nodes.push(Node::Leaf { counts });
            return id;
        }
        nodes.push(Node::Leaf { counts: vec![] });
        let left = build(rng, nodes, nf, k, depth - 1);
        let right = build(rng, nodes, nf, k, depth - 1);
        let cover = nodes[left].cover() + nodes[right].cover();
        nodes[id] = Node::Split {
            feature: rng.random_range(0..nf.min(3)),
            threshold: rng.random_range(-1.0..1.0),
            left,
            right,
            cover,
        };
        id
    }
    let mut nodes = Vec::new();
    build(rng, &mut nodes, nf, k, depth);
    Tree { nodes }
}

fn assert_close(a: &[f64], b: &[f64], tol: f64, what: &str) {
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        assert!((x - y).abs() <= tol, "{what}[{i}]: {x} vs {y}");
    }
}

#[test]
fn trained_forests_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for case in 0..50 {
        let nf = rng.random_range(2..=12);
        let k = rng.random_range(2..=4);
        let data = random_dataset(&mut rng, 80, nf, k);
        let params = ForestParams {
            n_trees: rng.random_range(1..=8),
            max_depth: Some(rng.random_range(1..=3)),
            seed: case,
            ..ForestParams::default()
        };
        let model = train(&data, &params).unwrap();
        for _ in 0..4 {
            let x: Vec<f64> = if rng.random_bool(0.5) {
                data.row(rng.random_range(0..data.len())).to_vec()
            } else {
                (0..nf).map(|_| rng.random_range(-3.5..3.5)).collect()
            };
            let fast = tree_shap(&model, &x).unwrap();
            let slow = brute_shap(&model, &x).unwrap();
            assert_close(&fast.phi, &slow.phi, 1e-9, &format!("case {case} phi"));
            assert_close(&fast.base, &slow.base, 1e-12, &format!("case {case} base"));
            let out = model.predict_proba(&x).unwrap();
            assert!(fast.local_accuracy_error(&out) <= 1e-9);
        }
    }
}

#[test]
fn hand_built_trees_with_repeated_features() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for case in 0..50 {
        let nf = 4;
        let k = 3;
        let trees = (0..rng.random_range(1..4))
            .map(|_| random_tree(&mut rng, nf, k, 3))
            .collect();
        let model = ForestModel {
            format_version: MODEL_FORMAT_VERSION.into(),
            params: ForestParams::default(),
            class_names: (0..k).map(|c| format!("c{c}")).collect(),
            feature_names: (0..nf).map(|f| format!("f{f}")).collect(),
            trees,
        };
        for _ in 0..5 {
            let x: Vec<f64> = (0..nf).map(|_| rng.random_range(-1.2..1.2)).collect();
            let fast = tree_shap(&model, &x).unwrap();
            let slow = brute_shap(&model, &x).unwrap();
            assert_close(&fast.phi, &slow.phi, 1e-9, &format!("case {case}"));
            assert!(fast.local_accuracy_error(&model.predict_proba(&x).unwrap()) <= 1e-9);
        }
    }
}

#[test]
fn brute_force_refuses_wide_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let data = random_dataset(&mut rng, 200, 20, 2);
    let params = ForestParams {
        n_trees: 30,
        features_per_split: Some(20),
        ..ForestParams::default()
    };
    let model = train(&data, &params).unwrap();
    let used: std::collections::BTreeSet<usize> =
        model.trees.iter().flat_map(|t| t.features()).collect();
    if used.len() > BRUTE_FEATURE_LIMIT {
        assert!(matches!(
            brute_shap(&model, data.row(0)),
            Err(Error::TooManyFeatures { .. })
        ));
    }
}

#[test]
fn unused_features_get_zero_and_dominant_feature_ranks_first() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 300;
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            vec![
                rng.random_range(0.0..1.0),
                rng.random_range(0.0..1.0),
                rng.random_range(0.0..1.0),
            ]
        })
        .collect();
    let y: Vec<usize> = rows.iter().map(|r| usize::from(r[1] > 0.5)).collect();
    let data = Dataset::new(
        rows,
        y,
        (0..n).map(|i| format!("g{}", i % 5)).collect(),
        vec!["a".into(), "b".into(), "c".into()],
        vec!["no".into(), "yes".into()],
    )
    .unwrap();
    let model = train(
        &data,
        &ForestParams {
            n_trees: 20,
            ..ForestParams::default()
        },
    )
    .unwrap();
    let ex: Vec<_> = (0..50)
        .map(|i| tree_shap(&model, data.row(i)).unwrap())
        .collect();
    let ranked = summary_rank(&ex, data.feature_names(), None).unwrap();
    assert_eq!(ranked[0].name, "b");
    // class attributions of a two-class model mirror each other
    for e in &ex {
        for f in 0..3 {
            assert!((e.value(f, 0) + e.value(f, 1)).abs() < 1e-12);
        }
    }
}
