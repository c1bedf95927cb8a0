use std::fs;
use std::path::PathBuf;

use afd_core::classify::{AnalysisTask, SENTIMENT_LABELS, STANCE_LABELS};
use afd_core::metrics::{correlate as correlate_scores, evaluate as evaluate_pairs, Aggregation, ScoredDiscussion};
use afd_core::pipeline::{batch_analyze, score_discussions};
use clap::{Args, ValueEnum};
use serde::Deserialize;
use serde_json::json;

use super::{load_dataset, split_items, task_examples, BackendArgs, Ctx, SplitArg};
use crate::output::{print_records, read_jsonl, write_json, write_text};
use crate::{fail, CmdResult, Format, WithCode, EXIT_IO, EXIT_USAGE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalTask {
    Outcome,
    Stance,
    Policy,
}

impl From<EvalTask> for AnalysisTask {
    fn from(t: EvalTask) -> Self {
        match t {
            EvalTask::Outcome => AnalysisTask::Outcome,
            EvalTask::Stance => AnalysisTask::Stance,
            EvalTask::Policy => AnalysisTask::Policy,
        }
    }
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Dataset directory written by build-dataset.
    #[arg(long, required_unless_present = "predictions")]
    pub dataset: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SplitArg::Test)]
    pub split: SplitArg,
    #[arg(long, value_enum, default_value_t = EvalTask::Outcome)]
    pub task: EvalTask,
    /// Score a JSONL file of {"gold", "predicted"} records instead of running a backend.
    #[arg(long, conflicts_with = "dataset")]
    pub predictions: Option<PathBuf>,
    /// Label space for --predictions, comma separated (default: labels seen in the file).
    #[arg(long, value_delimiter = ',')]
    pub labels: Option<Vec<String>>,
    /// Directory for report.json, per_label.csv and confusion.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub backend: BackendArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AuxArg {
    Sentiment,
    Stance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AggregationArg {
    /// Mean class probability over sentences.
    Mean,
    /// Share of sentences predicted as the class.
    Vote,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    /// Dataset directory written by build-dataset.
    #[arg(long, required_unless_present = "scores")]
    pub dataset: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SplitArg::All)]
    pub split: SplitArg,
    /// Sentence-level signal to correlate with outcomes.
    #[arg(long, value_enum, default_value_t = AuxArg::Sentiment)]
    pub aux: AuxArg,
    #[arg(long, value_enum, default_value_t = AggregationArg::Mean)]
    pub aggregation: AggregationArg,
    /// Correlate a JSONL file of {"outcome", "sentences"} records instead of running a backend.
    #[arg(long, conflicts_with = "dataset")]
    pub scores: Option<PathBuf>,
    /// Directory for correlation.json and correlation.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub backend: BackendArgs,
}

#[derive(Debug, Deserialize)]
struct PredictionRecord {
    gold: String,
    #[serde(alias = "prediction")]
    predicted: String,
}

fn ensure_dir(dir: &std::path::Path) -> CmdResult {
    fs::create_dir_all(dir).code(EXIT_IO)
}

pub fn evaluate(ctx: &Ctx, args: EvaluateArgs) -> CmdResult {
    let (pairs, labels, failed) = match (&args.predictions, &args.dataset) {
        (Some(path), _) => {
            let records: Vec<PredictionRecord> = read_jsonl(path).code(EXIT_IO)?;
            let labels = match &args.labels {
                Some(l) => l.clone(),
                None => {
                    let mut seen: Vec<String> = Vec::new();
                    for r in &records {
                        for l in [&r.gold, &r.predicted] {
                            if !seen.contains(l) {
                                seen.push(l.clone());
                            }
                        }
                    }
                    seen
                }
            };
            let pairs: Vec<(String, String)> = records.into_iter().map(|r| (r.gold, r.predicted)).collect();
            (pairs, labels, 0)
        }
        (None, Some(dir)) => {
            let ds = load_dataset(dir)?;
            let task = AnalysisTask::from(args.task);
            let classifier = args.backend.classifier(ctx, task, None)?;
            let space = classifier.label_space().clone();
            let variants = ctx.config.variants().code(EXIT_USAGE)?;
            let items = split_items(&ds, args.split);
            let examples: Vec<_> = task_examples(task, &items, &variants, Some(&space))?
                .into_iter()
                .filter(|e| space.index_of(&e.gold).is_some())
                .collect();
            if examples.is_empty() {
                return fail(EXIT_IO, format!("the {:?} split has no {task} examples", args.split));
            }
            let batch = batch_analyze(&examples, classifier.as_ref()).code(EXIT_IO)?;
            for e in &batch.errors {
                log::warn!("item {} ({}): {}", e.index, e.title.as_deref().unwrap_or("-"), e.message);
            }
            let pairs = batch.pairs.into_iter().map(|(g, p)| (g, p.label)).collect();
            (pairs, space.labels, batch.errors.len())
        }
        (None, None) => return fail(EXIT_USAGE, "--dataset or --predictions is required"),
    };
    let report = evaluate_pairs(&pairs, &labels).code(EXIT_USAGE)?;
    if let Some(out) = &args.out {
        ensure_dir(out)?;
        write_json(&out.join("report.json"), &report).code(EXIT_IO)?;
        write_text(&out.join("per_label.csv"), &report.per_label_csv()).code(EXIT_IO)?;
        write_text(&out.join("confusion.csv"), &report.confusion_csv()).code(EXIT_IO)?;
    }
    match ctx.format {
        Format::Text => {
            print!("{}", report.to_text());
            if failed > 0 {
                println!("{failed} item(s) failed and were left out");
            }
        }
        Format::Csv => print!("{}", report.per_label_csv()),
        Format::Records => print_records([json!({
            "macro_f1": report.macro_f1,
            "macro_precision": report.macro_precision,
            "macro_recall": report.macro_recall,
            "accuracy": report.accuracy,
            "total": report.total,
            "failed": failed,
        })])
        .code(EXIT_IO)?,
    }
    Ok(())
}

pub fn correlate(ctx: &Ctx, args: CorrelateArgs) -> CmdResult {
    let task = match args.aux {
        AuxArg::Sentiment => AnalysisTask::Sentiment,
        AuxArg::Stance => AnalysisTask::Stance,
    };
    let aggregation = match args.aggregation {
        AggregationArg::Mean => Aggregation::MeanProbability,
        AggregationArg::Vote => Aggregation::VoteFraction,
    };
    let (scored, classes): (Vec<ScoredDiscussion>, Vec<String>) = match (&args.scores, &args.dataset) {
        (Some(path), _) => {
            let scored: Vec<ScoredDiscussion> = read_jsonl(path).code(EXIT_IO)?;
            let classes = match task {
                AnalysisTask::Sentiment => SENTIMENT_LABELS.iter().map(|s| s.to_string()).collect(),
                _ => STANCE_LABELS.iter().map(|s| s.to_string()).collect(),
            };
            (scored, classes)
        }
        (None, Some(dir)) => {
            let ds = load_dataset(dir)?;
            let space = match task {
                AnalysisTask::Stance => Some(ctx.config.stance_space().code(EXIT_USAGE)?),
                _ => None,
            };
            let classifier = args.backend.classifier(ctx, task, space)?;
            let items = split_items(&ds, args.split);
            let scored = score_discussions(&items, classifier.as_ref()).code(EXIT_IO)?;
            (scored, classifier.label_space().labels.clone())
        }
        (None, None) => return fail(EXIT_USAGE, "--dataset or --scores is required"),
    };
    let report = correlate_scores(&scored, &classes, aggregation).code(EXIT_USAGE)?;
    if let Some(out) = &args.out {
        ensure_dir(out)?;
        write_json(&out.join("correlation.json"), &report).code(EXIT_IO)?;
        write_text(&out.join("correlation.csv"), &report.to_csv()).code(EXIT_IO)?;
    }
    match ctx.format {
        Format::Text => print!("{}", report.to_text()),
        Format::Csv => print!("{}", report.to_csv()),
        Format::Records => print_records(report.aux_classes.iter().enumerate().flat_map(|(i, c)| {
            let report = &report;
            report.outcomes.iter().enumerate().map(move |(j, o)| json!({"class": c, "outcome": o, "r": report.r[i][j]}))
        }))
        .code(EXIT_IO)?,
    }
    Ok(())
}
