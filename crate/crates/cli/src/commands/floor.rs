use std::path::PathBuf;

use lma_core::floor::{fit_floor, read_point_cloud};

use super::{at, Context};

pub const FLOOR_FILE: &str = "floor.json";

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Point cloud file: one `x y z` point per line.
    pub pointcloud: PathBuf,
    /// Quantile level of the floor line.
    #[arg(long)]
    pub tau: Option<f64>,
}

pub fn run(args: &Args, ctx: &Context) -> anyhow::Result<()> {
    let mut cfg = ctx.config.clone();
    if let Some(t) = args.tau {
        cfg.floor.tau = t;
    }
    cfg.validate()?;
    let p = &args.pointcloud;
    let cloud = read_point_cloud(p).map_err(at(p))?;
    let plane = fit_floor(
        &cloud,
        cfg.floor.tau,
        cfg.floor.up_axis,
        cfg.floor.depth_axis,
    )
    .map_err(at(p))?;

    let mut manifest = ctx.manifest("floor");
    manifest.config = cfg;
    manifest.add_input(p)?;
    ctx.create_out()?;
    ctx.write(
        FLOOR_FILE,
        serde_json::to_string_pretty(&plane)? + "\n",
        &mut manifest,
    )?;
    eprintln!(
        "floor: slope {:.6}, intercept {:.6}, pinball loss {:.6}",
        plane.slope, plane.intercept, plane.pinball_loss
    );
    manifest.write(&ctx.out)
}
