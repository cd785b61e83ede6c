use std::fmt::Write as _;
use std::path::PathBuf;

use lma_core::forest::{classification_report, cross_validate, dataset_folds, Dataset};
use lma_core::{assemble_corpus, FloorPlane, JointSequence};
use serde::Serialize;

use super::{expand_inputs, load_all, Context};
use crate::config::Config;
use crate::svg::LineChart;

pub const SWEEP_FILE: &str = "sweep.csv";
pub const SWEEP_SVG: &str = "sweep.svg";

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Labeled sequence files, or directories of `.jsonl` files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Window lengths to compare, in frames.
    #[arg(long, value_delimiter = ',', default_value = "5,15,30,55")]
    pub windows: Vec<usize>,
    /// Window stride in frames.
    #[arg(long)]
    pub stride: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub w: usize,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub macro_f1: f64,
    pub windows: usize,
}

/// Extracts features at each window length and cross-validates the
/// `[forest]` parameters on the same grouped folds policy.
pub fn sweep_accuracy(
    seqs: &[JointSequence],
    sizes: &[usize],
    cfg: &Config,
) -> anyhow::Result<Vec<SweepRow>> {
    let shortest = seqs.iter().map(|s| s.frame_count()).min().unwrap_or(0);
    if let Some(&w) = sizes.iter().find(|&&w| w > shortest) {
        anyhow::bail!("window {w} is longer than the shortest sequence ({shortest} frames)");
    }
    let plane = FloorPlane::flat(cfg.floor.up_axis, cfg.floor.depth_axis)?;
    let mut rows = Vec::with_capacity(sizes.len());
    for &w in sizes {
        let mut lma = cfg.lma.clone();
        lma.window.w = w;
        lma.validate().map_err(|e| crate::usage(e.to_string()))?;
        let feats = assemble_corpus(seqs, &plane, &lma)?;
        let data = Dataset::from_features(&feats)?;
        let folds = dataset_folds(&data, cfg.cv.folds, cfg.seed)?;
        let cv = cross_validate(&data, &cfg.forest, &folds)?;
        let report = classification_report(data.labels(), &cv.predictions, data.class_names())?;
        rows.push(SweepRow {
            w,
            mean_accuracy: cv.mean_accuracy(),
            std_accuracy: cv.std_accuracy(),
            macro_f1: report.macro_f1,
            windows: data.len(),
        });
    }
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("w,mean_accuracy,std_accuracy,macro_f1,windows\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{:.6},{:.6},{:.6},{}",
            r.w, r.mean_accuracy, r.std_accuracy, r.macro_f1, r.windows
        );
    }
    s
}

pub fn run(args: &Args, ctx: &Context) -> anyhow::Result<()> {
    if args.windows.is_empty() {
        return Err(crate::usage("--windows needs at least one size"));
    }
    let mut cfg = ctx.config.clone();
    if let Some(s) = args.stride {
        cfg.lma.window.stride = s;
    }
    cfg.validate()?;
    let inputs = expand_inputs(&args.inputs)?;
    let seqs = load_all(&inputs, &cfg)?;
    let rows = sweep_accuracy(&seqs, &args.windows, &cfg)?;

    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.w as f64, r.mean_accuracy)).collect();
    let svg = LineChart {
        title: "Accuracy by window size",
        x_label: "window size (frames)",
        y_label: "mean cross-validated accuracy",
        points: &points,
        markers: true,
    }
    .render();

    let mut manifest = ctx.manifest("sweep");
    manifest.config = cfg;
    for p in &inputs {
        manifest.add_input(p)?;
    }
    manifest.notes.push("floor=assumed-flat".into());
    ctx.create_out()?;
    let csv = sweep_csv(&rows);
    ctx.write(SWEEP_FILE, &csv, &mut manifest)?;
    ctx.write(SWEEP_SVG, svg, &mut manifest)?;
    eprint!("{csv}");
    manifest.write(&ctx.out)
}
