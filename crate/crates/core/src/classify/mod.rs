//! One prediction interface over several backends: a native TF-IDF
//! logistic-regression baseline, a remote inference endpoint, an LLM chat
//! endpoint, and heuristic lexicon scorers.

mod baseline;
mod lexicon;
mod llm;
mod prompt;
mod remote;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::parser::OutcomeLabel;

pub use baseline::{
    tokenize, train_baseline, BaselineModel, FeatureSpace, Hyperparams, LinearSoftmax, SparseVec, TrainReport,
    MODEL_MAGIC, MODEL_VERSION,
};
pub use lexicon::{OffensiveLexicon, SentimentLexicon};
pub use llm::{LlmBackend, LlmConfig, DEFAULT_LLM_ENDPOINT, DEFAULT_LLM_KEY_ENV, DEFAULT_LLM_MODEL};
pub use prompt::{parse_llm_response, render_explanation_prompt, render_llm_prompt, Shot, OUTCOME_PROMPT_TEMPLATE};
pub use remote::{RemoteBackend, RemoteLabelScore, RemoteRequest, RemoteResponse};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnalysisTask {
    Outcome,
    Stance,
    Policy,
    Sentiment,
    Offensive,
}

impl AnalysisTask {
    pub const ALL: [AnalysisTask; 5] =
        [AnalysisTask::Outcome, AnalysisTask::Stance, AnalysisTask::Policy, AnalysisTask::Sentiment, AnalysisTask::Offensive];

    pub fn as_str(&self) -> &'static str {
        match self {
            AnalysisTask::Outcome => "outcome",
            AnalysisTask::Stance => "stance",
            AnalysisTask::Policy => "policy",
            AnalysisTask::Sentiment => "sentiment",
            AnalysisTask::Offensive => "offensive",
        }
    }

    /// Every task except outcome works per sentence.
    pub fn is_sentence_level(&self) -> bool {
        !matches!(self, AnalysisTask::Outcome)
    }
}

impl fmt::Display for AnalysisTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AnalysisTask {
    type Err = ClassifyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AnalysisTask::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ClassifyError::UnknownTask(s.to_string()))
    }
}

pub const STANCE_LABELS: [&str; 4] = ["keep", "delete", "merge", "comment"];
pub const SENTIMENT_LABELS: [&str; 3] = ["positive", "negative", "neutral"];
pub const OFFENSIVE_LABELS: [&str; 2] = ["offensive", "non-offensive"];
pub const POLICY_LABEL_COUNT: usize = 15;

/// Used only when no comment data or configured list is available.
pub const FALLBACK_POLICIES: [&str; POLICY_LABEL_COUNT] = [
    "Wikipedia:Notability",
    "Wikipedia:Reliable sources",
    "Wikipedia:Verifiability",
    "Wikipedia:What Wikipedia is not",
    "Wikipedia:Notability (people)",
    "Wikipedia:Notability (organizations and companies)",
    "Wikipedia:No original research",
    "Wikipedia:Neutral point of view",
    "Wikipedia:Significant coverage",
    "Wikipedia:Independent sources",
    "Wikipedia:Notability (sports)",
    "Wikipedia:Notability (music)",
    "Wikipedia:Biographies of living persons",
    "Wikipedia:Notability (events)",
    "Wikipedia:Conflict of interest",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelSpace {
    pub task: AnalysisTask,
    pub labels: Vec<String>,
}

impl LabelSpace {
    pub fn new(task: AnalysisTask, labels: Vec<String>) -> Result<Self, ClassifyError> {
        if labels.is_empty() {
            return Err(ClassifyError::InvalidLabelSpace(format!("{task} label space is empty")));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(ClassifyError::InvalidLabelSpace(format!("duplicate label {l:?}")));
            }
        }
        if task == AnalysisTask::Outcome {
            let mut sorted = labels.clone();
            sorted.sort();
            let mut canonical = OutcomeLabel::names();
            canonical.sort();
            if sorted != canonical {
                return Err(ClassifyError::InvalidLabelSpace("outcome labels must be the 8 outcome labels".into()));
            }
        }
        Ok(LabelSpace { task, labels })
    }

    /// Built-in label set. Policy uses [`FALLBACK_POLICIES`]; prefer
    /// [`LabelSpace::policy_from_counts`] when comment data is at hand.
    pub fn default_for(task: AnalysisTask) -> Self {
        let labels: Vec<String> = match task {
            AnalysisTask::Outcome => OutcomeLabel::names(),
            AnalysisTask::Stance => STANCE_LABELS.iter().map(|s| s.to_string()).collect(),
            AnalysisTask::Policy => FALLBACK_POLICIES.iter().map(|s| s.to_string()).collect(),
            AnalysisTask::Sentiment => SENTIMENT_LABELS.iter().map(|s| s.to_string()).collect(),
            AnalysisTask::Offensive => OFFENSIVE_LABELS.iter().map(|s| s.to_string()).collect(),
        };
        LabelSpace { task, labels }
    }

    /// The `k` most frequent policies; ties broken by name.
    pub fn policy_from_counts<'a>(policies: impl IntoIterator<Item = &'a str>, k: usize) -> Result<Self, ClassifyError> {
        let mut counts: std::collections::BTreeMap<&str, usize> = Default::default();
        for p in policies {
            *counts.entry(p).or_default() += 1;
        }
        let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        LabelSpace::new(AnalysisTask::Policy, ranked.into_iter().take(k).map(|(p, _)| p.to_string()).collect())
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelScore {
    pub label: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: String,
    pub probability: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explanation: Option<String>,
    /// Full distribution in label-space order, when the backend provides one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_label_scores: Option<Vec<LabelScore>>,
}

impl Prediction {
    /// Arg-max prediction over a distribution; ties go to the earlier label.
    pub fn from_distribution(space: &LabelSpace, probs: &[f64]) -> Prediction {
        let mut best = 0;
        for (i, p) in probs.iter().enumerate() {
            if *p > probs[best] {
                best = i;
            }
        }
        Prediction {
            label: space.labels[best].clone(),
            probability: probs[best],
            explanation: None,
            per_label_scores: Some(
                space.labels.iter().zip(probs).map(|(l, &score)| LabelScore { label: l.clone(), score }).collect(),
            ),
        }
    }

    /// Probability assigned to `label`: from the distribution when present,
    /// otherwise `probability` for the predicted label and 0 elsewhere.
    pub fn score_of(&self, label: &str) -> f64 {
        match &self.per_label_scores {
            Some(scores) => scores.iter().find(|s| s.label == label).map_or(0.0, |s| s.score),
            None if self.label == label => self.probability,
            None => 0.0,
        }
    }

    /// Checks the label, probability range, and distribution consistency.
    pub fn validate(&self, space: &LabelSpace) -> Result<(), ClassifyError> {
        if space.index_of(&self.label).is_none() {
            return Err(ClassifyError::LabelSpaceMismatch { task: space.task, label: self.label.clone() });
        }
        if !(0.0..=1.0).contains(&self.probability) {
            return Err(ClassifyError::InvalidPrediction(format!("probability {} outside [0, 1]", self.probability)));
        }
        if let Some(scores) = &self.per_label_scores {
            let sum: f64 = scores.iter().map(|s| s.score).sum();
            if (sum - 1.0).abs() > 1e-6 {
                return Err(ClassifyError::InvalidPrediction(format!("scores sum to {sum}")));
            }
            let max = scores.iter().map(|s| s.score).fold(f64::NEG_INFINITY, f64::max);
            if (self.score_of(&self.label) - max).abs() > 1e-12 {
                return Err(ClassifyError::InvalidPrediction("label is not the arg-max of its scores".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error("input text is empty")]
    EmptyText,
    #[error("unknown task {0:?}")]
    UnknownTask(String),
    #[error("invalid label space: {0}")]
    InvalidLabelSpace(String),
    #[error("label {0:?} has fewer than 2 training items")]
    InsufficientData(String),
    #[error("backend returned label {label:?} outside the {task} label space")]
    LabelSpaceMismatch { task: AnalysisTask, label: String },
    #[error("backend unavailable: {0}")]
    BackendUnavailable(String),
    #[error("backend not configured: {0}")]
    NotConfigured(String),
    #[error("unparseable LLM response: {0}")]
    UnparseableResponse(String),
    #[error("unknown outcome label {0:?}")]
    UnknownLabel(String),
    #[error("invalid prediction: {0}")]
    InvalidPrediction(String),
    #[error("model file: {0}")]
    ModelFormat(String),
    #[error("I/O: {0}")]
    Io(String),
}

/// A backend able to label text for one task.
pub trait Classifier: Send + Sync {
    fn label_space(&self) -> &LabelSpace;

    /// Labels `text`. `title` is the article title when known.
    fn predict(&self, title: Option<&str>, text: &str) -> Result<Prediction, ClassifyError>;

    /// True for heuristic scorers that were never trained.
    fn is_heuristic(&self) -> bool {
        false
    }
}

/// Produces a short justification for a label decided elsewhere.
pub trait Explainer: Send + Sync {
    fn explain(&self, title: Option<&str>, text: &str, label: &str) -> Result<String, ClassifyError>;
}

pub(crate) fn require_text(text: &str) -> Result<(), ClassifyError> {
    if text.trim().is_empty() {
        Err(ClassifyError::EmptyText)
    } else {
        Ok(())
    }
}
