use afd_core::classify::{AnalysisTask, ClassifyError, LlmBackend};
use afd_core::collector::parse_afd_url;
use afd_core::pipeline::{analyze, AnalysisResult, AnalyzeContext, AnalyzeRequest, PipelineError};
use clap::{ArgGroup, Args};
use serde_json::Value;

use super::{BackendArgs, Ctx, NetArgs, TaskArg};
use crate::output::print_records;
use crate::{fail, CmdResult, Failure, Format, WithCode, EXIT_IO, EXIT_NO_CREDENTIALS, EXIT_USAGE};

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["url", "text"])))]
pub struct AnalyzeArgs {
    #[arg(long, value_enum)]
    pub task: TaskArg,
    /// Discussion URL; a log page URL needs a #fragment naming the discussion.
    #[arg(long)]
    pub url: Option<String>,
    /// Raw discussion text (HTML or plain).
    #[arg(long)]
    pub text: Option<String>,
    /// Article title for --text input.
    #[arg(long)]
    pub title: Option<String>,
    /// Add an LLM explanation of the outcome prediction.
    #[arg(long)]
    pub explanation: bool,
    #[command(flatten)]
    pub backend: BackendArgs,
    #[command(flatten)]
    pub net: NetArgs,
}

pub fn llm_backend(ctx: &Ctx) -> CmdResult<LlmBackend> {
    LlmBackend::from_env(ctx.config.llm.clone()).code(EXIT_NO_CREDENTIALS)
}

fn pipeline_failure(e: PipelineError) -> Failure {
    let code = match &e {
        PipelineError::EmptyInput
        | PipelineError::TaskMismatch { .. }
        | PipelineError::ExplanationNotSupported(_)
        | PipelineError::Url(_)
        | PipelineError::DiscussionNotFound { .. } => EXIT_USAGE,
        PipelineError::ExplanationUnavailable | PipelineError::Classify(ClassifyError::NotConfigured(_)) => {
            EXIT_NO_CREDENTIALS
        }
        _ => EXIT_IO,
    };
    Failure { code, error: e.into() }
}

pub fn run(ctx: &Ctx, args: AnalyzeArgs) -> CmdResult {
    let task = AnalysisTask::from(args.task);
    if args.explanation && task != AnalysisTask::Outcome {
        return fail(EXIT_USAGE, format!("--explanation applies to the outcome task only, not {task}"));
    }
    let explainer = if args.explanation { Some(llm_backend(ctx)?) } else { None };
    let classifier = match &explainer {
        Some(_) if args.backend.model.is_none() && args.backend.endpoint.is_none() && ctx.config.remote.endpoint.is_none() => {
            Box::new(llm_backend(ctx)?)
        }
        _ => args.backend.classifier(ctx, task, None)?,
    };
    let variants = ctx.config.variants().code(EXIT_USAGE)?;

    let (req, collector) = match (&args.url, &args.text) {
        (Some(u), _) => {
            let url = parse_afd_url(u).code(EXIT_USAGE)?;
            args.net.check_hosts([&url])?;
            let default_cache = std::env::temp_dir().join("afd-cache");
            (AnalyzeRequest::url(u.clone(), task), Some(args.net.collector(&ctx.config, &default_cache)?))
        }
        (None, Some(t)) => {
            let mut req = AnalyzeRequest::text(t.clone(), task);
            req.title = args.title.clone();
            (req, None)
        }
        (None, None) => return fail(EXIT_USAGE, "one of --url or --text is required"),
    };
    let req = req.with_explanation(args.explanation);
    let actx = AnalyzeContext {
        classifier: classifier.as_ref(),
        explainer: explainer.as_ref().map(|e| e as &dyn afd_core::classify::Explainer),
        collector: collector.as_ref(),
        variants: &variants,
    };
    let result = analyze(&req, &actx).map_err(pipeline_failure)?;
    if result.heuristic {
        log::warn!("{task} scores come from a heuristic lexicon, not a trained model");
    }
    emit(ctx.format, &result)
}

fn emit(format: Format, result: &AnalysisResult) -> CmdResult {
    let records = result.records();
    match format {
        Format::Records => print_records(&records).code(EXIT_IO)?,
        Format::Text => print!("{}", text_view(result)),
        Format::Csv => print!("{}", csv_view(&records)),
    }
    Ok(())
}

fn text_view(result: &AnalysisResult) -> String {
    let mut out = String::new();
    if let Some(t) = &result.title {
        out.push_str(&format!("{t}\n"));
    }
    if let Some(p) = &result.outcome {
        out.push_str(&format!("prediction: {} (probability {:.3})\n", p.label, p.probability));
        if let Some(e) = &p.explanation {
            out.push_str(&format!("explanation: {e}\n"));
        }
        return out;
    }
    for s in &result.sentences {
        out.push_str(&format!("[{} {:.3}] {}\n", s.prediction.label, s.prediction.probability, s.sentence.text));
    }
    out
}

fn csv_field(v: &Value) -> String {
    let s = match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

fn csv_view(records: &[Value]) -> String {
    const COLUMNS: [&str; 7] = ["sentence", "prediction", "sentiment", "label", "probability", "score", "explanation"];
    let keys: Vec<&str> = COLUMNS.into_iter().filter(|k| records.iter().any(|r| r.get(k).is_some())).collect();
    let mut out = keys.join(",");
    out.push('\n');
    for r in records {
        let row: Vec<String> = keys.iter().map(|k| r.get(k).map(csv_field).unwrap_or_default()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
