use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::Context as _;
use lma_core::forest::{Dataset, ForestModel};
use lma_core::lma::{format_sig9, FeatureTable};
use lma_core::shap::{
    permutation_importance, summary_rank, tree_shap, write_shap_csv, write_summary_csv,
    ImportanceMetric, ShapExplanation, DEFAULT_TOP_K,
};
use rayon::prelude::*;

use super::{at, Context};

pub const VALUES_FILE: &str = "shap_values.csv";
pub const SUMMARY_FILE: &str = "shap_summary.csv";
pub const CLASS_SUMMARY_FILE: &str = "shap_summary_by_class.csv";
pub const PERMUTATION_FILE: &str = "permutation_importance.csv";

/// Largest tolerated `|base + sum(phi) - output|`.
pub const LOCAL_ACCURACY_TOL: f64 = 1e-6;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Model file from `train`.
    pub model: PathBuf,
    /// Feature CSV from `extract`.
    pub features: PathBuf,
    /// Features listed in each summary.
    #[arg(long, default_value_t = DEFAULT_TOP_K)]
    pub top_k: usize,
    /// Explain every n-th row only.
    #[arg(long, default_value_t = 1)]
    pub every: usize,
    /// Also compute permutation importance with this many shuffles per feature.
    #[arg(long)]
    pub permutation: Option<usize>,
    #[arg(long, value_enum, default_value = "accuracy")]
    pub metric: Metric,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum Metric {
    Accuracy,
    MacroF1,
}

pub fn run(args: &Args, ctx: &Context) -> anyhow::Result<()> {
    if args.top_k == 0 || args.every == 0 {
        return Err(crate::usage("--top-k and --every must be at least 1"));
    }
    let model = ForestModel::load(&args.model).map_err(at(&args.model))?;
    let table = FeatureTable::load(&args.features).map_err(at(&args.features))?;
    if model.feature_names != lma_core::lma::feature_names() {
        anyhow::bail!(lma_core::Error::SchemaMismatch(
            "model was trained on a different feature layout".into()
        ));
    }
    let rows: Vec<_> = table.rows.iter().step_by(args.every).collect();
    if rows.is_empty() {
        anyhow::bail!(lma_core::Error::EmptyData(format!(
            "{} has no rows",
            args.features.display()
        )));
    }

    let explanations: Vec<ShapExplanation> = rows
        .par_iter()
        .map(|r| -> anyhow::Result<ShapExplanation> {
            let e = tree_shap(&model, &r.values)?;
            let err = e.local_accuracy_error(&model.predict_proba(&r.values)?);
            if err.is_nan() || err > LOCAL_ACCURACY_TOL {
                return Err(crate::invariant(format!(
                    "attributions for {}:{} miss the model output by {err:e}",
                    r.group_id, r.window_start
                )));
            }
            Ok(e)
        })
        .collect::<anyhow::Result<_>>()?;
    let ids: Vec<String> = rows
        .iter()
        .map(|r| format!("{}:{}", r.group_id, r.window_start))
        .collect();

    let mut values = Vec::new();
    write_shap_csv(
        &mut values,
        &ids,
        &explanations,
        &model.feature_names,
        &model.class_names,
    )?;
    let overall = summary_rank(&explanations, &model.feature_names, None)?;
    let mut summary = Vec::new();
    write_summary_csv(&mut summary, &overall[..args.top_k.min(overall.len())])?;

    let mut by_class = String::from("class,feature,mean_abs_phi,rank\n");
    for (c, class) in model.class_names.iter().enumerate() {
        let ranked = summary_rank(&explanations, &model.feature_names, Some(c))?;
        for r in ranked.iter().take(args.top_k) {
            let _ = writeln!(
                by_class,
                "{class},{},{},{}",
                r.name,
                format_sig9(r.mean_abs_phi),
                r.rank
            );
        }
    }

    let mut manifest = ctx.manifest("explain");
    manifest.add_input(&args.model)?;
    manifest.add_input(&args.features)?;
    ctx.create_out()?;
    ctx.write(VALUES_FILE, values, &mut manifest)?;
    ctx.write(SUMMARY_FILE, summary, &mut manifest)?;
    ctx.write(CLASS_SUMMARY_FILE, by_class, &mut manifest)?;

    if let Some(repeats) = args.permutation {
        let owned: Vec<_> = rows.iter().map(|r| (*r).clone()).collect();
        let data = Dataset::from_features_with_classes(&owned, model.class_names.clone())
            .context("permutation importance needs labeled rows")?;
        let metric = match args.metric {
            Metric::Accuracy => ImportanceMetric::Accuracy,
            Metric::MacroF1 => ImportanceMetric::MacroF1,
        };
        let mut imp = permutation_importance(&model, &data, metric, repeats, ctx.config.seed)
            .map_err(|e| match e {
                lma_core::Error::InvalidArgument(m) => crate::usage(m),
                other => other.into(),
            })?;
        imp.sort_by(|a, b| b.mean.total_cmp(&a.mean).then(a.feature.cmp(&b.feature)));
        let mut csv = String::from("feature,mean_drop,std_drop,rank\n");
        for (i, f) in imp.iter().enumerate() {
            let _ = writeln!(
                csv,
                "{},{},{},{}",
                f.name,
                format_sig9(f.mean),
                format_sig9(f.std),
                i + 1
            );
        }
        ctx.write(PERMUTATION_FILE, csv, &mut manifest)?;
    }

    eprintln!("explained {} rows; top features:", explanations.len());
    for r in overall.iter().take(args.top_k) {
        eprintln!("  {:>2}. {} ({:.4})", r.rank, r.name, r.mean_abs_phi);
    }
    manifest.write(&ctx.out)
}
