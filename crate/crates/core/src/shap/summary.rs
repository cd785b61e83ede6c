//! Aggregation and export of per-instance attributions.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lma::format_sig9;

use super::tree::ShapExplanation;

pub const DEFAULT_TOP_K: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankedFeature {
    pub feature: usize,
    pub name: String,
    pub mean_abs_phi: f64,
    /// 1-based.
    pub rank: usize,
}

/// Mean |phi| per feature over instances, and over all classes unless
/// `class` picks one. Sorted descending; ties go to the lower index.
pub fn summary_rank(
    explanations: &[ShapExplanation],
    feature_names: &[String],
    class: Option<usize>,
) -> Result<Vec<RankedFeature>> {
    let first = explanations
        .first()
        .ok_or_else(|| Error::EmptyData("no explanations to summarize".into()))?;
    let (nf, nc) = (first.n_features, first.n_classes);
    if feature_names.len() != nf {
        return Err(Error::LengthMismatch(format!(
            "{} feature names for {nf} features",
            feature_names.len()
        )));
    }
    if let Some(c) = class {
        if c >= nc {
            return Err(Error::invalid(format!("class {c} out of range")));
        }
    }
    let mut totals = vec![0.0; nf];
    for e in explanations {
        if e.n_features != nf || e.n_classes != nc {
            return Err(Error::LengthMismatch(
                "explanations disagree in shape".into(),
            ));
        }
        for (f, t) in totals.iter_mut().enumerate() {
            *t += match class {
                Some(c) => e.value(f, c).abs(),
                None => (0..nc).map(|c| e.value(f, c).abs()).sum::<f64>() / nc as f64,
            };
        }
    }
    let n = explanations.len() as f64;
    let mut order: Vec<usize> = (0..nf).collect();
    order.sort_by(|&a, &b| totals[b].total_cmp(&totals[a]).then(a.cmp(&b)));
    Ok(order
        .into_iter()
        .enumerate()
        .map(|(r, f)| RankedFeature {
            feature: f,
            name: feature_names[f].clone(),
            mean_abs_phi: totals[f] / n,
            rank: r + 1,
        })
        .collect())
}

/// Long format: one row per (instance, class, feature).
pub fn write_shap_csv<W: Write>(
    mut w: W,
    instance_ids: &[String],
    explanations: &[ShapExplanation],
    feature_names: &[String],
    class_names: &[String],
) -> Result<()> {
    if instance_ids.len() != explanations.len() {
        return Err(Error::LengthMismatch(format!(
            "{} ids for {} explanations",
            instance_ids.len(),
            explanations.len()
        )));
    }
    let io = |e| Error::io("<shap csv>", e);
    writeln!(w, "instance,class,feature,phi,base").map_err(io)?;
    for (id, e) in instance_ids.iter().zip(explanations) {
        for (c, class) in class_names.iter().enumerate().take(e.n_classes) {
            for (f, feature) in feature_names.iter().enumerate().take(e.n_features) {
                writeln!(
                    w,
                    "{id},{class},{feature},{},{}",
                    format_sig9(e.value(f, c)),
                    format_sig9(e.base[c])
                )
                .map_err(io)?;
            }
        }
    }
    Ok(())
}

pub fn write_summary_csv<W: Write>(mut w: W, ranked: &[RankedFeature]) -> Result<()> {
    let io = |e| Error::io("<summary csv>", e);
    writeln!(w, "feature,mean_abs_phi,rank").map_err(io)?;
    for r in ranked {
        writeln!(w, "{},{},{}", r.name, format_sig9(r.mean_abs_phi), r.rank).map_err(io)?;
    }
    Ok(())
}
