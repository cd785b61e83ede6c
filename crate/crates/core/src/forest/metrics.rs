//! Classification metrics: per-class precision/recall/F1, macro averages.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub class: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
    /// Set when the metric's denominator was zero and 0 was reported.
    pub precision_undefined: bool,
    pub recall_undefined: bool,
    pub f1_undefined: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub classes: Vec<ClassMetrics>,
    pub confusion: Vec<Vec<usize>>,
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
}

fn ratio(num: f64, den: f64) -> (f64, bool) {
    if den > 0.0 {
        (num / den, false)
    } else {
        (0.0, true)
    }
}

/// `confusion[truth][pred]`.
pub fn confusion_matrix(
    truth: &[usize],
    pred: &[usize],
    n_classes: usize,
) -> Result<Vec<Vec<usize>>> {
    if truth.len() != pred.len() {
        return Err(Error::LengthMismatch(format!(
            "{} labels, {} predictions",
            truth.len(),
            pred.len()
        )));
    }
    let mut m = vec![vec![0usize; n_classes]; n_classes];
    for (&t, &p) in truth.iter().zip(pred) {
        if t >= n_classes || p >= n_classes {
            return Err(Error::invalid(format!("class index out of range: {t}/{p}")));
        }
        m[t][p] += 1;
    }
    Ok(m)
}

/// Macro averages run over every class with support or predictions.
pub fn classification_report(
    truth: &[usize],
    pred: &[usize],
    class_names: &[String],
) -> Result<Report> {
    if truth.is_empty() {
        return Err(Error::EmptyData("no predictions to score".into()));
    }
    let k = class_names.len();
    let confusion = confusion_matrix(truth, pred, k)?;
    let mut classes = Vec::with_capacity(k);
    for c in 0..k {
        let tp = confusion[c][c] as f64;
        let support: usize = confusion[c].iter().sum();
        let predicted: usize = confusion.iter().map(|row| row[c]).sum();
        let (precision, pu) = ratio(tp, predicted as f64);
        let (recall, ru) = ratio(tp, support as f64);
        let (f1, fu) = ratio(2.0 * precision * recall, precision + recall);
        classes.push(ClassMetrics {
            class: class_names[c].clone(),
            precision,
            recall,
            f1,
            support,
            precision_undefined: pu,
            recall_undefined: ru,
            f1_undefined: fu,
        });
    }
    let active: Vec<&ClassMetrics> = classes
        .iter()
        .enumerate()
        .filter(|(c, m)| m.support > 0 || confusion.iter().any(|row| row[*c] > 0))
        .map(|(_, m)| m)
        .collect();
    let avg = |f: fn(&ClassMetrics) -> f64| {
        active.iter().map(|m| f(m)).sum::<f64>() / active.len() as f64
    };
    let correct: usize = (0..k).map(|c| confusion[c][c]).sum();
    Ok(Report {
        macro_precision: avg(|m| m.precision),
        macro_recall: avg(|m| m.recall),
        macro_f1: avg(|m| m.f1),
        accuracy: correct as f64 / truth.len() as f64,
        classes,
        confusion,
    })
}

impl Report {
    /// Fixed-width table: one row per class plus accuracy and macro rows.
    pub fn to_table(&self) -> String {
        let width = self
            .classes
            .iter()
            .map(|c| c.class.len())
            .max()
            .unwrap_or(0)
            .max(12);
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<width$}  {:>9}  {:>9}  {:>9}  {:>7}",
            "class", "precision", "recall", "f1", "support"
        );
        for c in &self.classes {
            let mark = |u: bool| if u { "*" } else { " " };
            let _ = writeln!(
                s,
                "{:<width$}  {:>8.4}{}  {:>8.4}{}  {:>8.4}{}  {:>7}",
                c.class,
                c.precision,
                mark(c.precision_undefined),
                c.recall,
                mark(c.recall_undefined),
                c.f1,
                mark(c.f1_undefined),
                c.support
            );
        }
        let total: usize = self.classes.iter().map(|c| c.support).sum();
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "{:<width$}  {:>9}  {:>9}  {:>9.4}  {:>7}",
            "accuracy", "", "", self.accuracy, total
        );
        let _ = writeln!(
            s,
            "{:<width$}  {:>9.4}  {:>9.4}  {:>9.4}  {:>7}",
            "macro avg", self.macro_precision, self.macro_recall, self.macro_f1, total
        );
        if self
            .classes
            .iter()
            .any(|c| c.precision_undefined || c.recall_undefined || c.f1_undefined)
        {
            let _ = writeln!(s, "* zero denominator, reported as 0");
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("class,precision,recall,f1,support,zero_division\n");
        for c in &self.classes {
            let mut flags = Vec::new();
            if c.precision_undefined {
                flags.push("precision");
            }
            if c.recall_undefined {
                flags.push("recall");
            }
            if c.f1_undefined {
                flags.push("f1");
            }
            let _ = writeln!(
                s,
                "{},{:.6},{:.6},{:.6},{},{}",
                c.class,
                c.precision,
                c.recall,
                c.f1,
                c.support,
                flags.join("|")
            );
        }
        let total: usize = self.classes.iter().map(|c| c.support).sum();
        let _ = writeln!(s, "accuracy,,,{:.6},{},", self.accuracy, total);
        let _ = writeln!(
            s,
            "macro avg,{:.6},{:.6},{:.6},{},",
            self.macro_precision, self.macro_recall, self.macro_f1, total
        );
        s
    }
}
