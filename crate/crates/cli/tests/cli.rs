use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Arc;

use lma_core::motion::save_sequence;
use lma_core::synth::standing_pose;
use lma_core::{JointSequence, Role, SkeletonSpec, Vec3};

const SMALL: &str = r#"
[forest]
n_trees = 12
bootstrap = false

[grid]
n_trees = [5, 10]
max_depth = [3, "none"]
min_samples_leaf = [1]
"#;

fn lma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lma"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Standing pose moved by `offset(t)` for every joint.
fn sequence(frames: usize, offset: impl Fn(f64) -> Vec3) -> JointSequence {
    let pose = standing_pose();
    let rows = (0..frames)
        .map(|t| {
            let o = offset(t as f64 / 60.0);
            Role::CANONICAL
                .iter()
                .map(|r| std::array::from_fn(|k| pose[r][k] + o[k]))
                .collect()
        })
        .collect();
    JointSequence::new(
        60.0,
        rows,
        Arc::new(SkeletonSpec::canonical()),
        Some("walk".into()),
        "walk-00",
    )
    .unwrap()
}

fn write_seq(dir: &Path, name: &str, seq: &JointSequence) -> PathBuf {
    let path = dir.join(name);
    save_sequence(seq, &path).unwrap();
    path
}

fn write_config(dir: &Path) -> PathBuf {
    let path = dir.join("small.toml");
    fs::write(&path, SMALL).unwrap();
    path
}

/// Synthesizes a small labeled corpus and extracts its features.
fn corpus(dir: &Path, cfg: &Path) -> PathBuf {
    let data = dir.join("data");
    let o = lma(&[
        "synth",
        "--per-style",
        "3",
        "--duration",
        "4",
        "--out",
        s(&data),
        "--config",
        s(cfg),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let feats = dir.join("feats");
    let o = lma(&[
        "extract",
        s(&data),
        "--window",
        "30",
        "--stride",
        "10",
        "--out",
        s(&feats),
        "--config",
        s(cfg),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    feats.join("features.csv")
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&lma(&["--help"])), 0);
    assert_eq!(code(&lma(&[])), 1);
    assert_eq!(code(&lma(&["dance"])), 1);
    assert_eq!(code(&lma(&["extract", "x.jsonl", "--bogus"])), 1);
    assert_eq!(code(&lma(&["--threads", "0", "kinplot", "x.jsonl"])), 1);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[forest]\nn_trees = 0\n").unwrap();
    assert_eq!(code(&lma(&["--config", s(&bad), "kinplot", "x.jsonl"])), 1);
    fs::write(&bad, "[nonsense]\n").unwrap();
    assert_eq!(code(&lma(&["--config", s(&bad), "kinplot", "x.jsonl"])), 1);
}

#[test]
fn missing_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = lma(&["extract", "/no/such/file.jsonl", "--out", s(dir.path())]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("/no/such/file.jsonl"));
}

#[test]
fn extract_counts_windows_and_records_flat_floor() {
    let dir = tempfile::tempdir().unwrap();
    let seq = write_seq(dir.path(), "walk.jsonl", &sequence(120, |t| [t, 0.0, 0.0]));
    let out = dir.path().join("out");
    let o = lma(&[
        "extract",
        s(&seq),
        "--window",
        "55",
        "--stride",
        "1",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("features.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 67);
    assert_eq!(lines[0].split(',').count(), 55 + 3);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let notes = manifest["notes"].as_array().unwrap();
    assert!(notes.iter().any(|n| n == "floor=assumed-flat"), "{notes:?}");
    assert_eq!(manifest["command"], "extract");
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 1);
}

#[test]
fn corrupt_frame_names_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let seq = write_seq(dir.path(), "broken.jsonl", &sequence(80, |_| [0.0; 3]));
    let text = fs::read_to_string(&seq).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[6] = "{\"frame\": oops".into();
    fs::write(&seq, lines.join("\n")).unwrap();
    let o = lma(&["extract", s(&seq), "--out", s(&dir.path().join("out"))]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(
        err.contains("broken.jsonl") && err.contains("line 7"),
        "{err}"
    );
}

#[test]
fn kinplot_reports_constant_and_zero_speed() {
    let dir = tempfile::tempdir().unwrap();
    for (name, speed) in [("moving.jsonl", 1.0), ("still.jsonl", 0.0)] {
        let seq = write_seq(dir.path(), name, &sequence(100, |t| [speed * t, 0.0, 0.0]));
        let out = dir.path().join(name.replace(".jsonl", ""));
        let o = lma(&["kinplot", s(&seq), "--window", "10", "--out", s(&out)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        let csv = fs::read_to_string(out.join("kinematics.csv")).unwrap();
        let values: Vec<f64> = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert_eq!(values.len(), 91);
        assert!(
            values.iter().all(|v| (v - speed).abs() <= 1e-6),
            "{name}: {values:?}"
        );
        assert!(fs::read_to_string(out.join("kinematics.svg"))
            .unwrap()
            .starts_with("<svg"));
    }
}

#[test]
fn train_is_reproducible_and_eval_fits_training_set() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let feats = corpus(dir.path(), &cfg);
    let mut models = Vec::new();
    for (run, threads) in [("a", "1"), ("b", "4")] {
        let out = dir.path().join(run);
        let o = lma(&[
            "train",
            s(&feats),
            "--threads",
            threads,
            "--config",
            s(&cfg),
            "--out",
            s(&out),
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        models.push(fs::read(out.join("model.json")).unwrap());
        for f in [
            "cv_report.txt",
            "cv_metrics.csv",
            "grid.csv",
            "manifest.json",
        ] {
            assert!(out.join(f).exists(), "{f}");
        }
        let grid = fs::read_to_string(out.join("grid.csv")).unwrap();
        assert_eq!(grid.lines().count(), 1 + 4);
    }
    assert_eq!(models[0], models[1]);

    // unlimited depth without bootstrap memorizes its training rows
    let model = dir.path().join("a/model.json");
    let no_grid = dir.path().join("nogrid");
    let o = lma(&[
        "train",
        s(&feats),
        "--no-grid",
        "--config",
        s(&cfg),
        "--out",
        s(&no_grid),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let eval = dir.path().join("eval");
    let o = lma(&[
        "eval",
        s(&no_grid.join("model.json")),
        s(&feats),
        "--vote",
        "--out",
        s(&eval),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let metrics = fs::read_to_string(eval.join("eval_metrics.csv")).unwrap();
    let macro_row = metrics
        .lines()
        .find(|l| l.starts_with("macro avg"))
        .unwrap();
    let f1: f64 = macro_row.split(',').nth(3).unwrap().parse().unwrap();
    assert_eq!(f1, 1.0, "{metrics}");
    assert!(eval.join("eval_vote_metrics.csv").exists());

    // explanation summaries hold exactly top_k features
    let ex = dir.path().join("explain");
    let o = lma(&[
        "explain",
        s(&model),
        s(&feats),
        "--top-k",
        "5",
        "--every",
        "7",
        "--permutation",
        "2",
        "--out",
        s(&ex),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let summary = fs::read_to_string(ex.join("shap_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 5);
    let perm = fs::read_to_string(ex.join("permutation_importance.csv")).unwrap();
    assert_eq!(perm.lines().count(), 1 + 55);
}

#[test]
fn sweep_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let data = dir.path().join("data");
    let o = lma(&[
        "synth",
        "--per-style",
        "3",
        "--duration",
        "3",
        "--out",
        s(&data),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let o = lma(&[
            "sweep",
            s(&data),
            "--windows",
            "15,30",
            "--stride",
            "10",
            "--seed",
            "7",
            "--config",
            s(&cfg),
            "--out",
            s(&out),
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        outputs.push(fs::read_to_string(out.join("sweep.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0].lines().count(), 3);
    let o = lma(&[
        "sweep",
        s(&data),
        "--windows",
        "900",
        "--out",
        s(&dir.path().join("c")),
    ]);
    assert_ne!(code(&o), 0);
}

#[test]
fn floor_fits_point_cloud() {
    let dir = tempfile::tempdir().unwrap();
    let cloud = dir.path().join("scene.xyz");
    let mut text = String::new();
    for i in 0..40 {
        let z = i as f64 * 0.1;
        text.push_str(&format!("{} {} {}\n", (i % 5) as f64, 0.05 * z - 0.2, z));
        text.push_str(&format!("{} {} {}\n", (i % 3) as f64, 1.0 + 0.05 * z, z));
    }
    fs::write(&cloud, text).unwrap();
    let out = dir.path().join("out");
    let o = lma(&["floor", s(&cloud), "--tau", "0.05", "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let plane: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("floor.json")).unwrap()).unwrap();
    assert!(
        (plane["slope"].as_f64().unwrap() - 0.05).abs() < 1e-9,
        "{plane}"
    );
    assert!(
        (plane["intercept"].as_f64().unwrap() + 0.2).abs() < 1e-9,
        "{plane}"
    );

    let seq = write_seq(dir.path(), "walk.jsonl", &sequence(60, |t| [0.0, 0.0, t]));
    let feats = dir.path().join("feats");
    let o = lma(&[
        "extract",
        s(&seq),
        "--pointcloud",
        s(&cloud),
        "--window",
        "20",
        "--out",
        s(&feats),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let manifest = fs::read_to_string(feats.join("manifest.json")).unwrap();
    assert!(manifest.contains("floor=fitted:"), "{manifest}");
}
