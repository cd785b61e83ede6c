use std::fmt::Write as _;
use std::path::PathBuf;

use lma_core::forest::{classification_report, grid_search, train, Dataset, GridSearchReport};
use lma_core::lma::FeatureTable;

use super::{at, Context};

pub const MODEL_FILE: &str = "model.json";
pub const REPORT_FILE: &str = "cv_report.txt";
pub const METRICS_FILE: &str = "cv_metrics.csv";
pub const GRID_FILE: &str = "grid.csv";

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Labeled feature CSV from `extract`.
    pub features: PathBuf,
    /// Skip the grid search and use the `[forest]` parameters as given.
    #[arg(long)]
    pub no_grid: bool,
    /// Number of grouped cross-validation folds.
    #[arg(long)]
    pub folds: Option<usize>,
}

fn depth(d: Option<usize>) -> String {
    d.map_or_else(|| "none".to_string(), |d| d.to_string())
}

pub fn grid_csv(report: &GridSearchReport) -> String {
    let mut s =
        String::from("n_trees,max_depth,min_samples_leaf,mean_accuracy,std_accuracy,selected\n");
    for (i, p) in report.points.iter().enumerate() {
        let _ = writeln!(
            s,
            "{},{},{},{:.6},{:.6},{}",
            p.params.n_trees,
            depth(p.params.max_depth),
            p.params.min_samples_leaf,
            p.mean_accuracy,
            p.std_accuracy,
            u8::from(i == report.best_index)
        );
    }
    s
}

pub fn run(args: &Args, ctx: &Context) -> anyhow::Result<()> {
    let mut cfg = ctx.config.clone();
    if let Some(k) = args.folds {
        cfg.cv.folds = k;
    }
    cfg.validate()?;
    let table = FeatureTable::load(&args.features).map_err(at(&args.features))?;
    let data = Dataset::from_features(&table.rows).map_err(at(&args.features))?;

    let lattice = if args.no_grid {
        vec![cfg.forest.clone()]
    } else {
        cfg.grid.lattice(&cfg.forest)
    };
    let search = grid_search(&data, &lattice, cfg.cv.folds, cfg.seed)?;
    let best = &search.points[search.best_index];
    let report = classification_report(data.labels(), &best.predictions, data.class_names())?;
    let model = train(&data, &search.best)?;
    model
        .validate()
        .map_err(|e| crate::invariant(format!("trained model fails validation: {e}")))?;

    let mut text = String::new();
    let _ = writeln!(
        text,
        "{}-fold grouped cross-validation, {} windows, {} groups, {} classes",
        cfg.cv.folds,
        data.len(),
        {
            let mut g: Vec<&String> = data.groups().iter().collect();
            g.sort();
            g.dedup();
            g.len()
        },
        data.n_classes()
    );
    let _ = writeln!(
        text,
        "selected: n_trees={} max_depth={} min_samples_leaf={} (mean accuracy {:.4} ± {:.4})\n",
        search.best.n_trees,
        depth(search.best.max_depth),
        search.best.min_samples_leaf,
        best.mean_accuracy,
        best.std_accuracy
    );
    text.push_str(&report.to_table());

    let mut manifest = ctx.manifest("train");
    manifest.config = cfg;
    manifest.add_input(&args.features)?;
    ctx.create_out()?;
    ctx.write(MODEL_FILE, model.to_json()? + "\n", &mut manifest)?;
    ctx.write(REPORT_FILE, &text, &mut manifest)?;
    ctx.write(METRICS_FILE, report.to_csv(), &mut manifest)?;
    ctx.write(GRID_FILE, grid_csv(&search), &mut manifest)?;
    eprint!("{text}");
    manifest.write(&ctx.out)
}
