use std::path::PathBuf;

use lma_core::motion::write_sequence;
use lma_core::synth::{default_styles, generate_corpus, StyleBundle, MIN_PER_STYLE};

use super::{at, Context};

pub const STYLES_FILE: &str = "styles.toml";

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Style bundle (TOML); the built-in ten styles otherwise.
    #[arg(long)]
    pub styles: Option<PathBuf>,
    /// Sequences per style.
    #[arg(long, default_value_t = 6)]
    pub per_style: usize,
    /// Seconds per sequence.
    #[arg(long, default_value_t = 20.0)]
    pub duration: f64,
    #[arg(long, default_value_t = 60.0)]
    pub fps: f64,
    /// Replace every style's jitter sigma, meters.
    #[arg(long)]
    pub noise: Option<f64>,
}

pub fn run(args: &Args, ctx: &Context) -> anyhow::Result<()> {
    if args.per_style < MIN_PER_STYLE {
        return Err(crate::usage(format!(
            "--per-style must be at least {MIN_PER_STYLE}"
        )));
    }
    let mut bundle = match &args.styles {
        Some(p) => StyleBundle::load(p).map_err(at(p))?,
        None => StyleBundle {
            styles: default_styles(),
        },
    };
    if let Some(sigma) = args.noise {
        for s in &mut bundle.styles {
            s.noise_sigma = sigma;
        }
    }
    let seqs = generate_corpus(
        &bundle.styles,
        args.per_style,
        args.duration,
        args.fps,
        ctx.config.seed,
    )?;

    let mut manifest = ctx.manifest("synth");
    if let Some(p) = &args.styles {
        manifest.add_input(p)?;
    }
    ctx.create_out()?;
    ctx.write(STYLES_FILE, bundle.to_toml()?, &mut manifest)?;
    for seq in &seqs {
        let mut buf = Vec::new();
        write_sequence(seq, &mut buf)?;
        ctx.write(&format!("{}.jsonl", seq.group_id), buf, &mut manifest)?;
    }
    eprintln!("{} sequences, {} styles", seqs.len(), bundle.styles.len());
    manifest.write(&ctx.out)
}
