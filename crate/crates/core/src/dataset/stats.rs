use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{DatasetSplits, SPLIT_NAMES};
use crate::parser::{segment_sentences, strip_bold_markers, OutcomeLabel};

/// Mean and quantiles of a length sample; all zero for an empty sample.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LengthSummary {
    pub count: usize,
    pub mean: f64,
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

impl LengthSummary {
    pub fn from_values(values: &[usize]) -> Self {
        if values.is_empty() {
            return Self::default();
        }
        let mut v: Vec<f64> = values.iter().map(|&x| x as f64).collect();
        v.sort_by(f64::total_cmp);
        LengthSummary {
            count: v.len(),
            mean: v.iter().sum::<f64>() / v.len() as f64,
            min: v[0],
            q25: quantile(&v, 0.25),
            median: quantile(&v, 0.5),
            q75: quantile(&v, 0.75),
            max: v[v.len() - 1],
        }
    }
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitStats {
    pub label: OutcomeLabel,
    /// Items per split, in train/validation/test order.
    pub counts: [usize; 3],
    /// Whitespace tokens per discussion.
    pub discussion_length: LengthSummary,
    /// Whitespace tokens per sentence.
    pub sentence_length: LengthSummary,
    pub sentences: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelStats {
    pub split_sizes: [usize; 3],
    /// One row per outcome label, in canonical order.
    pub labels: Vec<SplitStats>,
}

/// Whitespace token count of cleaned text.
pub fn token_length(text: &str) -> usize {
    strip_bold_markers(text).split_whitespace().count()
}

/// Token counts of each sentence.
pub fn sentence_lengths(text: &str) -> Vec<usize> {
    segment_sentences(&strip_bold_markers(text)).iter().map(|s| s.text.split_whitespace().count()).collect()
}

pub fn compute_stats(splits: &DatasetSplits) -> LabelStats {
    let labels = OutcomeLabel::ALL
        .iter()
        .map(|&label| {
            let mut counts = [0usize; 3];
            let mut lengths = Vec::new();
            let mut sentences = Vec::new();
            for (s, split) in splits.splits().iter().enumerate() {
                for d in split.iter().filter(|d| d.label == Some(label)) {
                    counts[s] += 1;
                    lengths.push(token_length(&d.text));
                    sentences.extend(sentence_lengths(&d.text));
                }
            }
            SplitStats {
                label,
                counts,
                discussion_length: LengthSummary::from_values(&lengths),
                sentence_length: LengthSummary::from_values(&sentences),
                sentences: sentences.len(),
            }
        })
        .collect();
    LabelStats { split_sizes: splits.sizes(), labels }
}

impl LabelStats {
    pub fn count(&self, split: usize, label: OutcomeLabel) -> usize {
        self.labels[label.index()].counts[split]
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<15}{:>8}{:>12}{:>8}{:>12}{:>14}\n",
            "label", SPLIT_NAMES[0], SPLIT_NAMES[1], SPLIT_NAMES[2], "mean_len", "mean_sent_len"
        );
        for row in &self.labels {
            let _ = writeln!(
                out,
                "{:<15}{:>8}{:>12}{:>8}{:>12.1}{:>14.1}",
                row.label.as_str(),
                row.counts[0],
                row.counts[1],
                row.counts[2],
                row.discussion_length.mean,
                row.sentence_length.mean
            );
        }
        let [a, b, c] = self.split_sizes;
        let _ = writeln!(out, "{:<15}{a:>8}{b:>12}{c:>8}", "total");
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "label,train,validation,test,discussions,len_mean,len_q25,len_median,len_q75,sentences,sent_len_mean,sent_len_q25,sent_len_median,sent_len_q75\n",
        );
        for r in &self.labels {
            let (d, s) = (&r.discussion_length, &r.sentence_length);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.label.as_str(),
                r.counts[0],
                r.counts[1],
                r.counts[2],
                d.count,
                d.mean,
                d.q25,
                d.median,
                d.q75,
                r.sentences,
                s.mean,
                s.q25,
                s.median,
                s.q75
            );
        }
        out
    }
}
