use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{csv_field, MetricsError};
use crate::classify::Prediction;
use crate::parser::OutcomeLabel;

/// How per-sentence predictions become one feature per discussion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    /// Mean probability of the class over sentences.
    #[default]
    MeanProbability,
    /// Share of sentences whose predicted label is the class.
    VoteFraction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredDiscussion {
    pub outcome: OutcomeLabel,
    pub sentences: Vec<Prediction>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub aux_classes: Vec<String>,
    pub outcomes: Vec<OutcomeLabel>,
    /// `r[class][outcome]`; `None` where a column has zero variance.
    pub r: Vec<Vec<Option<f64>>>,
    pub sample_size: usize,
    pub aggregation: Aggregation,
    pub zero_variance: Vec<(String, OutcomeLabel)>,
}

/// Pearson correlation; `None` when either sample is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    assert_eq!(x.len(), y.len());
    let constant = |v: &[f64]| v.iter().all(|a| *a == v[0]);
    if x.len() < 2 || constant(x) || constant(y) {
        return None;
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Correlates each auxiliary class with each one-hot outcome indicator.
pub fn correlate<S: AsRef<str>>(
    discussions: &[ScoredDiscussion],
    aux_classes: &[S],
    aggregation: Aggregation,
) -> Result<CorrelationReport, MetricsError> {
    if discussions.len() < 3 {
        return Err(MetricsError::TooFewDiscussions(discussions.len()));
    }
    if let Some(i) = discussions.iter().position(|d| d.sentences.is_empty()) {
        return Err(MetricsError::EmptyDiscussion(i));
    }
    let classes: Vec<String> = aux_classes.iter().map(|c| c.as_ref().to_string()).collect();
    let features: Vec<Vec<f64>> = classes
        .iter()
        .map(|c| {
            discussions
                .iter()
                .map(|d| {
                    let n = d.sentences.len() as f64;
                    match aggregation {
                        Aggregation::MeanProbability => d.sentences.iter().map(|p| p.score_of(c)).sum::<f64>() / n,
                        Aggregation::VoteFraction => d.sentences.iter().filter(|p| &p.label == c).count() as f64 / n,
                    }
                })
                .collect()
        })
        .collect();
    let outcomes = OutcomeLabel::ALL.to_vec();
    let mut zero_variance = Vec::new();
    let r = classes
        .iter()
        .zip(&features)
        .map(|(c, f)| {
            outcomes
                .iter()
                .map(|&o| {
                    let target: Vec<f64> = discussions.iter().map(|d| if d.outcome == o { 1.0 } else { 0.0 }).collect();
                    let r = pearson(f, &target);
                    if r.is_none() {
                        zero_variance.push((c.clone(), o));
                    }
                    r
                })
                .collect()
        })
        .collect();
    Ok(CorrelationReport { aux_classes: classes, outcomes, r, sample_size: discussions.len(), aggregation, zero_variance })
}

impl CorrelationReport {
    pub fn get(&self, class: &str, outcome: OutcomeLabel) -> Option<f64> {
        let c = self.aux_classes.iter().position(|x| x == class)?;
        self.r[c][outcome.index()]
    }

    pub fn to_text(&self) -> String {
        let w = self.aux_classes.iter().map(|c| c.len()).max().unwrap_or(5).max(8);
        let mut out = format!("{:<w$}", "");
        for o in &self.outcomes {
            let _ = write!(out, " {:>13}", o.as_str());
        }
        out.push('\n');
        for (c, row) in self.aux_classes.iter().zip(&self.r) {
            let _ = write!(out, "{c:<w$}");
            for v in row {
                match v {
                    Some(v) => {
                        let _ = write!(out, " {v:>13.2}");
                    }
                    None => {
                        let _ = write!(out, " {:>13}", "-");
                    }
                }
            }
            out.push('\n');
        }
        let _ = writeln!(out, "n={}  aggregation={:?}  (- = zero variance)", self.sample_size, self.aggregation);
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("class");
        for o in &self.outcomes {
            let _ = write!(out, ",{}", csv_field(o.as_str()));
        }
        out.push('\n');
        for (c, row) in self.aux_classes.iter().zip(&self.r) {
            out.push_str(&csv_field(c));
            for v in row {
                out.push(',');
                if let Some(v) = v {
                    let _ = write!(out, "{v}");
                }
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sentence(label: &str, p: f64) -> Prediction {
        Prediction { label: label.into(), probability: p, explanation: None, per_label_scores: None }
    }

    #[test]
    fn aligned_and_anti_aligned() {
        let outcomes = [OutcomeLabel::Delete, OutcomeLabel::Keep, OutcomeLabel::Delete, OutcomeLabel::Merge];
        let aligned: Vec<_> = outcomes
            .iter()
            .map(|&o| ScoredDiscussion {
                outcome: o,
                sentences: vec![if o == OutcomeLabel::Delete { sentence("negative", 1.0) } else { sentence("positive", 1.0) }],
            })
            .collect();
        let r = correlate(&aligned, &["negative", "positive"], Aggregation::MeanProbability).unwrap();
        assert!((r.get("negative", OutcomeLabel::Delete).unwrap() - 1.0).abs() < 1e-12);
        assert!((r.get("positive", OutcomeLabel::Delete).unwrap() + 1.0).abs() < 1e-12);
        assert_eq!(r.get("negative", OutcomeLabel::Withdrawn), None);
    }

    #[test]
    fn constant_feature_is_zero_variance() {
        let d: Vec<_> = [OutcomeLabel::Delete, OutcomeLabel::Keep, OutcomeLabel::Keep]
            .iter()
            .map(|&o| ScoredDiscussion { outcome: o, sentences: vec![sentence("neutral", 0.5)] })
            .collect();
        let r = correlate(&d, &["neutral"], Aggregation::VoteFraction).unwrap();
        assert!(r.r[0].iter().all(Option::is_none));
        assert_eq!(r.zero_variance.len(), 8);
    }

    #[test]
    fn preconditions() {
        assert_eq!(correlate::<&str>(&[], &[], Aggregation::default()), Err(MetricsError::TooFewDiscussions(0)));
        let d = vec![ScoredDiscussion { outcome: OutcomeLabel::Keep, sentences: vec![] }; 3];
        assert_eq!(correlate(&d, &["x"], Aggregation::default()), Err(MetricsError::EmptyDiscussion(0)));
    }
}
