//! One-shot `analyze` (resolve input, parse, preprocess, predict, explain)
//! and order-preserving batch prediction over datasets.

mod examples;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;
use url::Url;

use crate::classify::{AnalysisTask, Classifier, ClassifyError, Explainer, Prediction};
use crate::collector::{log_date_from_url, parse_afd_url, CollectError, Collector, FetchError, FetchPlan};
use crate::metrics::ScoredDiscussion;
use crate::parser::{
    clean_html, extract_discussions, parse_page, segment_sentences, strip_bold_markers, to_discussion, Discussion,
    ParseError, RawDiscussion, Sentence, VariantTable,
};

pub use examples::{outcome_examples, policy_examples, policy_mentions, policy_space, stance_examples, stance_of_vote, Example};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputMode {
    Url,
    Text,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeRequest {
    pub input: String,
    pub mode: InputMode,
    pub task: AnalysisTask,
    pub want_explanation: bool,
    /// Article title for text mode; URL mode takes it from the page.
    pub title: Option<String>,
}

impl AnalyzeRequest {
    pub fn url(url: impl Into<String>, task: AnalysisTask) -> Self {
        AnalyzeRequest { input: url.into(), mode: InputMode::Url, task, want_explanation: false, title: None }
    }

    pub fn text(text: impl Into<String>, task: AnalysisTask) -> Self {
        AnalyzeRequest { input: text.into(), mode: InputMode::Text, task, want_explanation: false, title: None }
    }

    pub fn with_explanation(mut self, yes: bool) -> Self {
        self.want_explanation = yes;
        self
    }
}

/// Backends and services `analyze` may use.
#[derive(Clone, Copy)]
pub struct AnalyzeContext<'a> {
    pub classifier: &'a dyn Classifier,
    pub explainer: Option<&'a dyn Explainer>,
    /// Needed for URL mode only.
    pub collector: Option<&'a Collector>,
    pub variants: &'a VariantTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentencePrediction {
    pub sentence: Sentence,
    pub prediction: Prediction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisResult {
    pub task: AnalysisTask,
    pub title: Option<String>,
    pub source_url: Option<Url>,
    pub heuristic: bool,
    pub outcome: Option<Prediction>,
    /// Sentence-level tasks, in sentence order.
    pub sentences: Vec<SentencePrediction>,
}

impl AnalysisResult {
    /// Output records: `prediction`/`probability`/`explanation` for outcome,
    /// `sentence`/`label`/`score` per sentence otherwise (`sentiment`
    /// instead of `label` for the sentiment task).
    pub fn records(&self) -> Vec<Value> {
        if let Some(p) = &self.outcome {
            let mut rec = Map::new();
            rec.insert("prediction".into(), json!(p.label));
            rec.insert("probability".into(), json!(p.probability));
            if let Some(e) = &p.explanation {
                rec.insert("explanation".into(), json!(e));
            }
            return vec![Value::Object(rec)];
        }
        let key = if self.task == AnalysisTask::Sentiment { "sentiment" } else { "label" };
        self.sentences
            .iter()
            .map(|s| {
                let mut rec = Map::new();
                rec.insert("sentence".into(), json!(s.sentence.text));
                rec.insert(key.into(), json!(s.prediction.label));
                rec.insert("score".into(), json!(s.prediction.probability));
                Value::Object(rec)
            })
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("input is empty")]
    EmptyInput,
    #[error("backend serves the {backend} task, request is for {requested}")]
    TaskMismatch { requested: AnalysisTask, backend: AnalysisTask },
    #[error("an explanation was requested but no LLM backend is configured")]
    ExplanationUnavailable,
    #[error("explanations are only produced for the outcome task, not {0}")]
    ExplanationNotSupported(AnalysisTask),
    #[error("url mode needs a collector")]
    NoCollector,
    #[error(transparent)]
    Url(#[from] CollectError),
    #[error(transparent)]
    Fetch(#[from] FetchError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("no discussion matching {url} (candidates: {})", candidates.join(", "))]
    DiscussionNotFound { url: String, candidates: Vec<String> },
    #[error("discussion has no text")]
    EmptyDiscussion,
    #[error("no items to predict")]
    EmptySplit,
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

fn normalize_anchor(s: &str) -> String {
    percent_encoding::percent_decode_str(s).decode_utf8_lossy().replace('_', " ").trim().to_lowercase()
}

/// Picks the discussion a URL refers to: the section named by the fragment,
/// else the only discussion on the page.
pub fn select_discussion<'a>(url: &Url, discussions: &'a [RawDiscussion]) -> Result<&'a RawDiscussion, PipelineError> {
    let not_found = || PipelineError::DiscussionNotFound {
        url: url.to_string(),
        candidates: discussions.iter().map(|d| d.title.clone()).collect(),
    };
    match url.fragment().filter(|f| !f.is_empty()) {
        Some(fragment) => {
            let want = normalize_anchor(fragment);
            discussions
                .iter()
                .find(|d| d.anchor.as_deref().map(normalize_anchor).as_deref() == Some(want.as_str()))
                .or_else(|| discussions.iter().find(|d| normalize_anchor(&d.title) == want))
                .ok_or_else(not_found)
        }
        None if discussions.len() == 1 => Ok(&discussions[0]),
        None => Err(not_found()),
    }
}

/// Runs one request end to end.
pub fn analyze(req: &AnalyzeRequest, ctx: &AnalyzeContext<'_>) -> Result<AnalysisResult, PipelineError> {
    let backend = ctx.classifier.label_space().task;
    if backend != req.task {
        return Err(PipelineError::TaskMismatch { requested: req.task, backend });
    }
    if req.want_explanation {
        if req.task != AnalysisTask::Outcome {
            return Err(PipelineError::ExplanationNotSupported(req.task));
        }
        if ctx.explainer.is_none() {
            return Err(PipelineError::ExplanationUnavailable);
        }
    }
    if req.input.trim().is_empty() {
        return Err(PipelineError::EmptyInput);
    }
    let (title, source_url, text) = match req.mode {
        InputMode::Text => (req.title.clone(), None, clean_html(&req.input)),
        InputMode::Url => {
            let collector = ctx.collector.ok_or(PipelineError::NoCollector)?;
            let url = parse_afd_url(req.input.trim())?;
            let mut page_url = url.clone();
            page_url.set_fragment(None);
            let page = collector.fetch_url(&page_url, log_date_from_url(&page_url))?;
            let raws = extract_discussions(&page)?;
            let raw = select_discussion(&url, &raws)?;
            let d = to_discussion(raw, ctx.variants);
            (Some(d.title), Some(d.source_url), d.text)
        }
    };
    if text.trim().is_empty() {
        return Err(PipelineError::EmptyDiscussion);
    }
    let heuristic = ctx.classifier.is_heuristic();
    if req.task == AnalysisTask::Outcome {
        let mut p = ctx.classifier.predict(title.as_deref(), &text)?;
        match (req.want_explanation, ctx.explainer) {
            (true, Some(explainer)) => {
                if p.explanation.as_deref().is_none_or(|e| e.trim().is_empty()) {
                    p.explanation = Some(explainer.explain(title.as_deref(), &text, &p.label)?);
                }
            }
            _ => p.explanation = None,
        }
        return Ok(AnalysisResult { task: req.task, title, source_url, heuristic, outcome: Some(p), sentences: Vec::new() });
    }
    let sentences = predict_sentences(title.as_deref(), &text, ctx.classifier)?;
    Ok(AnalysisResult { task: req.task, title, source_url, heuristic, outcome: None, sentences })
}

/// Segments cleaned discussion text and labels every sentence.
pub fn predict_sentences(
    title: Option<&str>,
    text: &str,
    classifier: &dyn Classifier,
) -> Result<Vec<SentencePrediction>, ClassifyError> {
    segment_sentences(&strip_bold_markers(text))
        .into_par_iter()
        .map(|s| {
            let mut prediction = classifier.predict(title, &s.text)?;
            prediction.explanation = None;
            Ok(SentencePrediction { sentence: s, prediction })
        })
        .collect()
}

/// Sentence predictions for every labeled discussion, ready for
/// correlation. Discussions without any sentence are skipped.
pub fn score_discussions(
    discussions: &[Discussion],
    classifier: &dyn Classifier,
) -> Result<Vec<ScoredDiscussion>, ClassifyError> {
    let mut out = Vec::new();
    for d in discussions {
        let Some(outcome) = d.label else { continue };
        let sentences: Vec<Prediction> =
            predict_sentences(Some(&d.title), &d.text, classifier)?.into_iter().map(|s| s.prediction).collect();
        if !sentences.is_empty() {
            out.push(ScoredDiscussion { outcome, sentences });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageFailure {
    pub url: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Collected {
    /// Every discussion of every page, in plan order then page order.
    pub discussions: Vec<Discussion>,
    pub pages_ok: usize,
    pub from_cache: usize,
    pub failures: Vec<PageFailure>,
}

/// Fetches and parses a plan. Pages that fail to fetch or parse are listed
/// in `failures` and skipped.
pub fn collect_discussions(collector: &Collector, plan: &FetchPlan, table: &VariantTable) -> Collected {
    let fetched = collector.fetch(plan);
    let parsed: Vec<(String, bool, Result<Vec<Discussion>, String>)> = fetched
        .into_par_iter()
        .zip(plan.pages.par_iter())
        .map(|(r, planned)| match r {
            Ok(page) => (planned.url.to_string(), page.from_cache, parse_page(&page, table).map_err(|e| e.to_string())),
            Err(e) => (planned.url.to_string(), false, Err(e.to_string())),
        })
        .collect();
    let mut out = Collected { discussions: Vec::new(), pages_ok: 0, from_cache: 0, failures: Vec::new() };
    for (url, cached, r) in parsed {
        match r {
            Ok(ds) => {
                out.pages_ok += 1;
                out.from_cache += usize::from(cached);
                out.discussions.extend(ds);
            }
            Err(message) => out.failures.push(PageFailure { url, message }),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemError {
    pub index: usize,
    pub title: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchResult {
    /// `(gold, prediction)` for every item that succeeded, in input order.
    pub pairs: Vec<(String, Prediction)>,
    /// Input index of each pair.
    pub indices: Vec<usize>,
    pub errors: Vec<ItemError>,
}

/// Predicts every example, in parallel, keeping input order. Failures are
/// recorded per item.
pub fn batch_analyze(examples: &[Example], classifier: &dyn Classifier) -> Result<BatchResult, PipelineError> {
    if examples.is_empty() {
        return Err(PipelineError::EmptySplit);
    }
    let outputs: Vec<Result<Prediction, ClassifyError>> =
        examples.par_iter().map(|e| classifier.predict(e.title.as_deref(), &e.text)).collect();
    let mut out = BatchResult { pairs: Vec::new(), indices: Vec::new(), errors: Vec::new() };
    for (i, (e, r)) in examples.iter().zip(outputs).enumerate() {
        match r {
            Ok(p) => {
                out.pairs.push((e.gold.clone(), p));
                out.indices.push(i);
            }
            Err(err) => out.errors.push(ItemError { index: i, title: e.title.clone(), message: err.to_string() }),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{LabelSpace, SentimentLexicon};

    #[test]
    fn sentiment_text_mode() {
        let table = VariantTable::default();
        let lex = SentimentLexicon::new();
        let ctx = AnalyzeContext { classifier: &lex, explainer: None, collector: None, variants: &table };
        let text = "None establish his Wikipedia:Notability . The first reference is almost identical in wording to his official web site.";
        let r = analyze(&AnalyzeRequest::text(text, AnalysisTask::Sentiment), &ctx).unwrap();
        let recs = r.records();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0]["sentiment"], "negative");
        assert!(r.heuristic);
        assert!(matches!(analyze(&AnalyzeRequest::text("  ", AnalysisTask::Sentiment), &ctx), Err(PipelineError::EmptyInput)));
        assert!(matches!(
            analyze(&AnalyzeRequest::text(text, AnalysisTask::Stance), &ctx),
            Err(PipelineError::TaskMismatch { .. })
        ));
    }

    struct Flaky(LabelSpace);

    impl Classifier for Flaky {
        fn label_space(&self) -> &LabelSpace {
            &self.0
        }
        fn predict(&self, _: Option<&str>, text: &str) -> Result<Prediction, ClassifyError> {
            if text.contains("fail") {
                return Err(ClassifyError::BackendUnavailable("down".into()));
            }
            Ok(Prediction::from_distribution(&self.0, &[1.0, 0.0, 0.0, 0.0]))
        }
    }

    #[test]
    fn batch_partial_failure_keeps_order() {
        let c = Flaky(LabelSpace::default_for(AnalysisTask::Stance));
        let ex = |t: &str| Example { title: None, text: t.into(), gold: "keep".into() };
        let r = batch_analyze(&[ex("a"), ex("fail"), ex("c")], &c).unwrap();
        assert_eq!(r.indices, vec![0, 2]);
        assert_eq!(r.errors.len(), 1);
        assert_eq!(r.errors[0].index, 1);
        assert!(matches!(batch_analyze(&[], &c), Err(PipelineError::EmptySplit)));
    }
}
