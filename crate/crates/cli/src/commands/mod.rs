//! Subcommand implementations.

pub mod eval;
pub mod explain;
pub mod extract;
pub mod floor;
pub mod kinplot;
pub mod sweep;
pub mod synth;
pub mod train;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context as _;
use lma_core::motion::{load_sequence, resample, validate_and_repair};
use lma_core::JointSequence;
use rayon::prelude::*;

use crate::config::Config;
use crate::manifest::Manifest;
use crate::Command;

pub use kinplot::kinematics_curve;
pub use sweep::{sweep_accuracy, SweepRow};

/// Everything a command needs besides its own arguments.
pub struct Context {
    pub config: Config,
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub argv: Vec<String>,
    pub config_path: Option<PathBuf>,
}

impl Context {
    pub fn manifest(&self, command: &str) -> Manifest {
        Manifest::new(
            command,
            self.argv.clone(),
            &self.config,
            self.config_path.as_ref(),
            self.threads,
        )
    }

    pub fn create_out(&self) -> anyhow::Result<&Path> {
        fs::create_dir_all(&self.out)
            .with_context(|| format!("creating output directory {}", self.out.display()))?;
        Ok(&self.out)
    }

    pub fn write(
        &self,
        name: &str,
        contents: impl AsRef<[u8]>,
        manifest: &mut Manifest,
    ) -> anyhow::Result<()> {
        let path = self.out.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        manifest.outputs.push(name.to_string());
        Ok(())
    }
}

pub fn dispatch(command: &Command, ctx: &Context) -> anyhow::Result<()> {
    match command {
        Command::Extract(a) => extract::run(a, ctx),
        Command::Floor(a) => floor::run(a, ctx),
        Command::Synth(a) => synth::run(a, ctx),
        Command::Train(a) => train::run(a, ctx),
        Command::Eval(a) => eval::run(a, ctx),
        Command::Sweep(a) => sweep::run(a, ctx),
        Command::Explain(a) => explain::run(a, ctx),
        Command::Kinplot(a) => kinplot::run(a, ctx),
    }
}

/// Attaches `path` to a core error unless it already names a file.
pub fn at(path: &Path) -> impl FnOnce(lma_core::Error) -> anyhow::Error + '_ {
    move |e| match e {
        lma_core::Error::Io { .. } => e.into(),
        other => anyhow::Error::from(other).context(path.display().to_string()),
    }
}

/// Files as given, with directories replaced by their `*.jsonl` files in
/// name order.
pub fn expand_inputs(paths: &[PathBuf]) -> anyhow::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .with_context(|| format!("listing {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "jsonl"))
                .collect();
            found.sort();
            if found.is_empty() {
                anyhow::bail!("{}: no .jsonl sequence files", p.display());
            }
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    if out.is_empty() {
        return Err(crate::usage("no input sequences given"));
    }
    Ok(out)
}

/// Loads, gap-repairs and optionally resamples one sequence file.
pub fn load_prepared(path: &Path, cfg: &Config) -> anyhow::Result<JointSequence> {
    let seq = load_sequence(path).map_err(at(path))?;
    let seq = validate_and_repair(&seq, cfg.repair.max_gap).map_err(at(path))?;
    match cfg.repair.target_fps {
        Some(fps) => Ok(resample(&seq, fps).map_err(at(path))?),
        None => Ok(seq),
    }
}

/// Loads every file in parallel, keeping input order.
pub fn load_all(paths: &[PathBuf], cfg: &Config) -> anyhow::Result<Vec<JointSequence>> {
    paths.par_iter().map(|p| load_prepared(p, cfg)).collect()
}
