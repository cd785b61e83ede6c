use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use lma_core::forest::{argmax, classification_report, Dataset, ForestModel};
use lma_core::lma::FeatureTable;

use super::{at, Context};

pub const PREDICTIONS_FILE: &str = "predictions.csv";
pub const REPORT_FILE: &str = "eval_report.txt";
pub const METRICS_FILE: &str = "eval_metrics.csv";
pub const VOTE_METRICS_FILE: &str = "eval_vote_metrics.csv";

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Model file from `train`.
    pub model: PathBuf,
    /// Feature CSV from `extract`.
    pub features: PathBuf,
    /// Also score one majority-vote prediction per group.
    #[arg(long)]
    pub vote: bool,
}

pub fn run(args: &Args, ctx: &Context) -> anyhow::Result<()> {
    let model = ForestModel::load(&args.model).map_err(at(&args.model))?;
    let table = FeatureTable::load(&args.features).map_err(at(&args.features))?;
    if model.feature_names != lma_core::lma::feature_names() {
        anyhow::bail!(lma_core::Error::SchemaMismatch(
            "model was trained on a different feature layout".into()
        ));
    }
    let predictions: Vec<usize> = {
        use rayon::prelude::*;
        table
            .rows
            .par_iter()
            .map(|r| model.predict(&r.values))
            .collect::<lma_core::Result<_>>()?
    };

    let mut csv = String::from("group_id,window_start,label,predicted\n");
    for (r, p) in table.rows.iter().zip(&predictions) {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            r.group_id,
            r.window_start,
            r.label.as_deref().unwrap_or(""),
            model.class_names[*p]
        );
    }

    let mut manifest = ctx.manifest("eval");
    manifest.add_input(&args.model)?;
    manifest.add_input(&args.features)?;
    ctx.create_out()?;
    ctx.write(PREDICTIONS_FILE, csv, &mut manifest)?;

    if table.rows.iter().all(|r| r.label.is_some()) && !table.rows.is_empty() {
        let data = Dataset::from_features_with_classes(&table.rows, model.class_names.clone())
            .map_err(at(&args.features))?;
        let report = classification_report(data.labels(), &predictions, &model.class_names)?;
        let mut text = format!("per-window evaluation, {} windows\n\n", data.len());
        text.push_str(&report.to_table());
        ctx.write(METRICS_FILE, report.to_csv(), &mut manifest)?;

        if args.vote {
            let mut votes: BTreeMap<&str, (usize, Vec<usize>)> = BTreeMap::new();
            for ((g, &y), &p) in data.groups().iter().zip(data.labels()).zip(&predictions) {
                let e = votes
                    .entry(g.as_str())
                    .or_insert_with(|| (y, vec![0; model.n_classes()]));
                e.1[p] += 1;
            }
            let truth: Vec<usize> = votes.values().map(|v| v.0).collect();
            let voted: Vec<usize> = votes
                .values()
                .map(|v| argmax(&v.1.iter().map(|&c| c as f64).collect::<Vec<_>>()))
                .collect();
            let vote_report = classification_report(&truth, &voted, &model.class_names)?;
            let _ = write!(
                text,
                "\nper-group majority vote, {} groups\n\n",
                truth.len()
            );
            text.push_str(&vote_report.to_table());
            ctx.write(VOTE_METRICS_FILE, vote_report.to_csv(), &mut manifest)?;
        }
        eprint!("{text}");
        ctx.write(REPORT_FILE, text, &mut manifest)?;
    } else {
        manifest
            .notes
            .push("unlabeled rows: predictions only".into());
    }
    manifest.write(&ctx.out)
}
