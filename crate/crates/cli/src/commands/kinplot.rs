use std::fmt::Write as _;
use std::path::PathBuf;

use lma_core::geom::norm;
use lma_core::lma::format_sig9;
use lma_core::{derivative, JointSequence, Role};

use super::{load_prepared, Context};
use crate::svg::LineChart;

pub const CURVE_FILE: &str = "kinematics.csv";
pub const CURVE_SVG: &str = "kinematics.svg";

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Sequence file.
    pub sequence: PathBuf,
    /// Averaging window in frames.
    #[arg(long)]
    pub window: Option<usize>,
}

/// Mean speed over `joints` at each frame, averaged over the `w` frames
/// starting there: one `(start frame, m/s)` point per full window.
pub fn kinematics_curve(
    seq: &JointSequence,
    w: usize,
    joints: &[Role],
) -> lma_core::Result<Vec<(usize, f64)>> {
    let t = seq.frame_count();
    if w < 1 || w > t {
        return Err(lma_core::Error::TooShort {
            found: t,
            required: w.max(1),
        });
    }
    let mut speed = vec![0.0; t];
    for role in joints {
        let track = seq.role_track(*role)?;
        let v = derivative(&track, 1, seq.dt())?;
        for (s, x) in speed.iter_mut().zip(&v.values) {
            *s += norm(*x) / joints.len() as f64;
        }
    }
    // running sums keep this linear in T
    let mut prefix = vec![0.0; t + 1];
    for i in 0..t {
        prefix[i + 1] = prefix[i] + speed[i];
    }
    Ok((0..=t - w)
        .map(|s| (s, (prefix[s + w] - prefix[s]) / w as f64))
        .collect())
}

pub fn run(args: &Args, ctx: &Context) -> anyhow::Result<()> {
    let mut cfg = ctx.config.clone();
    if let Some(w) = args.window {
        cfg.lma.window.w = w;
    }
    cfg.validate()?;
    let seq = load_prepared(&args.sequence, &cfg)?;
    let curve = kinematics_curve(&seq, cfg.lma.window.w, &cfg.lma.selected_joints)?;

    let mut csv = String::from("frame,mean_speed\n");
    for (f, v) in &curve {
        let _ = writeln!(csv, "{f},{}", format_sig9(*v));
    }
    let points: Vec<(f64, f64)> = curve.iter().map(|&(f, v)| (f as f64, v)).collect();
    let svg = LineChart {
        title: &format!("Mean joint speed, {}", seq.group_id),
        x_label: "frame",
        y_label: "velocity (m/s)",
        points: &points,
        markers: false,
    }
    .render();

    let mut manifest = ctx.manifest("kinplot");
    manifest.config = cfg;
    manifest.add_input(&args.sequence)?;
    ctx.create_out()?;
    ctx.write(CURVE_FILE, csv, &mut manifest)?;
    ctx.write(CURVE_SVG, svg, &mut manifest)?;
    manifest.write(&ctx.out)
}
