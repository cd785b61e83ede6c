use std::path::PathBuf;

use lma_core::floor::{fit_floor, read_point_cloud};
use lma_core::lma::write_features_csv;
use lma_core::{assemble_features, FloorPlane};
use rayon::prelude::*;

use super::{at, expand_inputs, load_prepared, Context};

pub const FEATURES_FILE: &str = "features.csv";

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Sequence files, or directories of `.jsonl` files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Scene point cloud used to fit the floor; a flat floor at height 0
    /// is assumed otherwise.
    #[arg(long)]
    pub pointcloud: Option<PathBuf>,
    /// Window length in frames.
    #[arg(long)]
    pub window: Option<usize>,
    /// Window stride in frames.
    #[arg(long)]
    pub stride: Option<usize>,
}

pub fn run(args: &Args, ctx: &Context) -> anyhow::Result<()> {
    let mut cfg = ctx.config.clone();
    if let Some(w) = args.window {
        cfg.lma.window.w = w;
    }
    if let Some(s) = args.stride {
        cfg.lma.window.stride = s;
    }
    cfg.validate()?;

    let inputs = expand_inputs(&args.inputs)?;
    let (plane, note) = match &args.pointcloud {
        Some(p) => {
            let cloud = read_point_cloud(p).map_err(at(p))?;
            let plane = fit_floor(
                &cloud,
                cfg.floor.tau,
                cfg.floor.up_axis,
                cfg.floor.depth_axis,
            )
            .map_err(at(p))?;
            (plane, format!("floor=fitted:{}", p.display()))
        }
        None => (
            FloorPlane::flat(cfg.floor.up_axis, cfg.floor.depth_axis)?,
            "floor=assumed-flat".to_string(),
        ),
    };

    let per_file: Vec<_> = inputs
        .par_iter()
        .map(|path| {
            let seq = load_prepared(path, &cfg)?;
            assemble_features(&seq, &plane, &cfg.lma).map_err(at(path))
        })
        .collect::<anyhow::Result<_>>()?;
    let rows: Vec<_> = per_file.into_iter().flatten().collect();

    let mut manifest = ctx.manifest("extract");
    manifest.config = cfg;
    for p in inputs.iter().chain(args.pointcloud.as_ref()) {
        manifest.add_input(p)?;
    }
    manifest.notes.push(note);
    ctx.create_out()?;
    let mut buf = Vec::new();
    write_features_csv(&rows, &mut buf)?;
    ctx.write(FEATURES_FILE, buf, &mut manifest)?;
    eprintln!("{} windows from {} sequences", rows.len(), inputs.len());
    manifest.write(&ctx.out)
}
