//! Evaluation reports and correlations between per-sentence scores and
//! discussion outcomes.

mod correlate;

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use correlate::{correlate, pearson, Aggregation, CorrelationReport, ScoredDiscussion};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("no prediction pairs")]
    EmptyPairs,
    #[error("label {0:?} is not in the label space")]
    UnknownLabelInPairs(String),
    #[error("label space is empty or has duplicates")]
    InvalidLabelSpace,
    #[error("correlation needs at least 3 discussions, got {0}")]
    TooFewDiscussions(usize),
    #[error("discussion {0} has no scored sentences")]
    EmptyDiscussion(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelMetrics {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
    pub predicted: usize,
    /// The metric's denominator was zero; its value was set to 0.
    pub precision_zero_division: bool,
    pub recall_zero_division: bool,
    pub f1_zero_division: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub labels: Vec<String>,
    pub total: usize,
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub per_label: Vec<LabelMetrics>,
    /// `confusion[gold][predicted]`, in label order.
    pub confusion: Vec<Vec<usize>>,
}

fn ratio(num: usize, den: usize) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

/// Scores `(gold, predicted)` pairs over `labels`. Macro averages are
/// unweighted means over every label of the space, zero-support ones included.
pub fn evaluate<G: AsRef<str>, P: AsRef<str>, L: AsRef<str>>(
    pairs: &[(G, P)],
    labels: &[L],
) -> Result<EvalReport, MetricsError> {
    if pairs.is_empty() {
        return Err(MetricsError::EmptyPairs);
    }
    let labels: Vec<String> = labels.iter().map(|l| l.as_ref().to_string()).collect();
    if labels.is_empty() || (1..labels.len()).any(|i| labels[..i].contains(&labels[i])) {
        return Err(MetricsError::InvalidLabelSpace);
    }
    let index = |l: &str| labels.iter().position(|x| x == l).ok_or_else(|| MetricsError::UnknownLabelInPairs(l.to_string()));
    let k = labels.len();
    let mut confusion = vec![vec![0usize; k]; k];
    for (g, p) in pairs {
        confusion[index(g.as_ref())?][index(p.as_ref())?] += 1;
    }
    Ok(report_from_confusion(labels, confusion))
}

/// Builds a report from a confusion matrix (`[gold][predicted]`).
pub fn report_from_confusion(labels: Vec<String>, confusion: Vec<Vec<usize>>) -> EvalReport {
    let k = labels.len();
    let total: usize = confusion.iter().flatten().sum();
    let correct: usize = (0..k).map(|i| confusion[i][i]).sum();
    let per_label: Vec<LabelMetrics> = (0..k)
        .map(|i| {
            let tp = confusion[i][i];
            let support: usize = confusion[i].iter().sum();
            let predicted: usize = confusion.iter().map(|row| row[i]).sum();
            let (precision, pz) = ratio(tp, predicted);
            let (recall, rz) = ratio(tp, support);
            let (f1, fz) = if precision + recall == 0.0 { (0.0, true) } else { (2.0 * precision * recall / (precision + recall), false) };
            LabelMetrics {
                label: labels[i].clone(),
                precision,
                recall,
                f1,
                support,
                predicted,
                precision_zero_division: pz,
                recall_zero_division: rz,
                f1_zero_division: fz,
            }
        })
        .collect();
    let mean = |f: fn(&LabelMetrics) -> f64| per_label.iter().map(f).sum::<f64>() / k as f64;
    EvalReport {
        accuracy: correct as f64 / total.max(1) as f64,
        macro_precision: mean(|m| m.precision),
        macro_recall: mean(|m| m.recall),
        macro_f1: mean(|m| m.f1),
        total,
        labels,
        per_label,
        confusion,
    }
}

impl EvalReport {
    /// Aligned text table with per-label rows and the confusion matrix.
    pub fn to_text(&self) -> String {
        let w = self.labels.iter().map(|l| l.len()).max().unwrap_or(5).max(9);
        let mut out = String::new();
        let _ = writeln!(out, "accuracy {:.4}  macro-P {:.4}  macro-R {:.4}  macro-F1 {:.4}  (n={})",
            self.accuracy, self.macro_precision, self.macro_recall, self.macro_f1, self.total);
        let _ = writeln!(out, "\n{:<w$} {:>9} {:>9} {:>9} {:>8}", "label", "precision", "recall", "f1", "support");
        for m in &self.per_label {
            let flag = if m.precision_zero_division || m.recall_zero_division { " *" } else { "" };
            let _ = writeln!(out, "{:<w$} {:>9.4} {:>9.4} {:>9.4} {:>8}{flag}", m.label, m.precision, m.recall, m.f1, m.support);
        }
        if self.per_label.iter().any(|m| m.precision_zero_division || m.recall_zero_division) {
            let _ = writeln!(out, "* zero division, reported as 0");
        }
        let _ = writeln!(out, "\nconfusion (rows gold, columns predicted)");
        let _ = write!(out, "{:<w$}", "");
        for l in &self.labels {
            let _ = write!(out, " {:>w$}", l);
        }
        out.push('\n');
        for (l, row) in self.labels.iter().zip(&self.confusion) {
            let _ = write!(out, "{:<w$}", l);
            for c in row {
                let _ = write!(out, " {:>w$}", c);
            }
            out.push('\n');
        }
        out
    }

    pub fn per_label_csv(&self) -> String {
        let mut out = String::from("label,precision,recall,f1,support,predicted\n");
        for m in &self.per_label {
            let _ = writeln!(out, "{},{},{},{},{},{}", csv_field(&m.label), m.precision, m.recall, m.f1, m.support, m.predicted);
        }
        let _ = writeln!(out, "macro,{},{},{},{},", self.macro_precision, self.macro_recall, self.macro_f1, self.total);
        out
    }

    pub fn confusion_csv(&self) -> String {
        let mut out = String::from("gold\\predicted");
        for l in &self.labels {
            out.push(',');
            out.push_str(&csv_field(l));
        }
        out.push('\n');
        for (l, row) in self.labels.iter().zip(&self.confusion) {
            out.push_str(&csv_field(l));
            for c in row {
                let _ = write!(out, ",{c}");
            }
            out.push('\n');
        }
        out
    }
}

pub(crate) fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs_from(confusion: &[[usize; 2]; 2]) -> Vec<(&'static str, &'static str)> {
        let names = ["a", "b"];
        let mut out = Vec::new();
        for g in 0..2 {
            for p in 0..2 {
                out.extend(std::iter::repeat_n((names[g], names[p]), confusion[g][p]));
            }
        }
        out
    }

    #[test]
    fn hand_computed_two_label() {
        let r = evaluate(&pairs_from(&[[8, 2], [3, 7]]), &["a", "b"]).unwrap();
        assert!((r.accuracy - 0.75).abs() < 1e-12);
        assert!((r.per_label[0].f1 - 16.0 / 21.0).abs() < 1e-12);
        assert!((r.per_label[1].f1 - 14.0 / 19.0).abs() < 1e-12);
        assert!((r.macro_f1 - 0.7494).abs() < 1e-4);
        assert_eq!(r.confusion, vec![vec![8, 2], vec![3, 7]]);
    }

    #[test]
    fn perfect_and_never_predicted() {
        let r = evaluate(&[("a", "a"), ("b", "b")], &["a", "b"]).unwrap();
        assert_eq!((r.accuracy, r.macro_f1), (1.0, 1.0));
        let r = evaluate(&[("a", "a"), ("b", "a")], &["a", "b"]).unwrap();
        assert!(r.per_label[1].precision_zero_division);
        assert_eq!(r.per_label[1].precision, 0.0);
    }

    #[test]
    fn errors() {
        let none: [(&str, &str); 0] = [];
        assert_eq!(evaluate(&none, &["a"]), Err(MetricsError::EmptyPairs));
        assert_eq!(evaluate(&[("a", "z")], &["a"]), Err(MetricsError::UnknownLabelInPairs("z".into())));
    }

    #[test]
    fn csv_shapes() {
        let r = evaluate(&pairs_from(&[[8, 2], [3, 7]]), &["a", "b"]).unwrap();
        assert_eq!(r.confusion_csv(), "gold\\predicted,a,b\na,8,2\nb,3,7\n");
        assert!(r.to_text().contains("macro-F1 0.7494"));
    }
}
