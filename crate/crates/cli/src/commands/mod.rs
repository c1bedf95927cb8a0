pub mod analyze;
pub mod collect;
pub mod dataset;
pub mod evaluate;
pub mod train;

use std::path::{Path, PathBuf};
use std::time::Duration;

use afd_core::classify::{AnalysisTask, BaselineModel, Classifier, LabelSpace, OffensiveLexicon, RemoteBackend, SentimentLexicon};
use afd_core::collector::{Collector, FetchConfig, LogUrlTemplate};
use afd_core::dataset::DatasetSplits;
use afd_core::parser::{Discussion, VariantTable};
use afd_core::pipeline::{outcome_examples, policy_examples, stance_examples, Example};
use clap::{Args, ValueEnum};
use url::Url;

use crate::config::Config;
use crate::{fail, CmdResult, Format, WithCode, EXIT_IO, EXIT_USAGE};

pub struct Ctx {
    pub config: Config,
    pub format: Format,
}

/// Fetch settings shared by commands that touch the network.
#[derive(Debug, Args)]
pub struct NetArgs {
    /// Page cache directory.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    /// Requests per second.
    #[arg(long)]
    pub rate_limit: Option<f64>,
    /// Maximum requests in flight.
    #[arg(long)]
    pub concurrency: Option<usize>,
    /// Daily log URL with {year}, {month} and {day} placeholders.
    #[arg(long)]
    pub log_url_template: Option<String>,
    /// Ignore cached pages and fetch again.
    #[arg(long)]
    pub refresh: bool,
    /// Allow requests to hosts other than localhost (e.g. en.wikipedia.org).
    #[arg(long)]
    pub live: bool,
}

impl NetArgs {
    pub fn template(&self, config: &Config) -> CmdResult<LogUrlTemplate> {
        match self.log_url_template.as_ref().or(config.log_url_template.as_ref()) {
            Some(t) => LogUrlTemplate::new(t.clone()).code(EXIT_USAGE),
            None => Ok(LogUrlTemplate::default()),
        }
    }

    pub fn collector(&self, config: &Config, default_cache: &Path) -> CmdResult<Collector> {
        let cache = self.cache_dir.clone().or_else(|| config.cache_dir.clone()).unwrap_or_else(|| default_cache.to_path_buf());
        let mut fc = FetchConfig::new(cache);
        if let Some(r) = self.rate_limit.or(config.rate_limit) {
            fc.rate_limit = r;
        }
        if let Some(c) = self.concurrency.or(config.concurrency) {
            fc.concurrency = c;
        }
        if let Some(r) = config.retries {
            fc.retries = r;
        }
        if let Some(ua) = &config.user_agent {
            fc.user_agent = ua.clone();
        }
        fc.refresh = self.refresh;
        match Collector::new(fc) {
            Ok(c) => Ok(c),
            Err(e @ afd_core::collector::FetchError::InvalidConfig(_)) => fail(EXIT_USAGE, e),
            Err(e) => fail(EXIT_IO, e),
        }
    }

    /// Refuses non-local hosts unless `--live` was given.
    pub fn check_hosts<'a>(&self, urls: impl IntoIterator<Item = &'a Url>) -> CmdResult {
        if self.live {
            return Ok(());
        }
        for url in urls {
            let local = matches!(url.host_str(), Some("localhost" | "127.0.0.1" | "[::1]" | "::1"));
            if !local {
                return fail(
                    EXIT_USAGE,
                    format!("refusing to contact {} without --live", url.host_str().unwrap_or("remote host")),
                );
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    Outcome,
    Stance,
    Policy,
    Sentiment,
    Offensive,
}

impl From<TaskArg> for AnalysisTask {
    fn from(t: TaskArg) -> Self {
        match t {
            TaskArg::Outcome => AnalysisTask::Outcome,
            TaskArg::Stance => AnalysisTask::Stance,
            TaskArg::Policy => AnalysisTask::Policy,
            TaskArg::Sentiment => AnalysisTask::Sentiment,
            TaskArg::Offensive => AnalysisTask::Offensive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplitArg {
    Train,
    Validation,
    Test,
    All,
}

/// Classifier choice shared by analyze, evaluate and correlate.
#[derive(Debug, Args)]
pub struct BackendArgs {
    /// Baseline model file written by train-baseline.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Remote inference endpoint (overrides config `remote.endpoint`).
    #[arg(long)]
    pub endpoint: Option<String>,
    /// Use the LLM chat endpoint from config (outcome only).
    #[arg(long)]
    pub llm: bool,
}

impl BackendArgs {
    /// Resolves the backend for `task`. Without a model or endpoint, sentiment
    /// and offensive fall back to the lexicon scorers.
    pub fn classifier(&self, ctx: &Ctx, task: AnalysisTask, space: Option<LabelSpace>) -> CmdResult<Box<dyn Classifier>> {
        if let Some(path) = &self.model {
            let model = BaselineModel::load(path).code(EXIT_IO)?;
            let served = model.label_space().task;
            if served != task {
                return fail(EXIT_USAGE, format!("{} is a {served} model, not {task}", path.display()));
            }
            return Ok(Box::new(model));
        }
        if let Some(endpoint) = self.endpoint.as_ref().or(ctx.config.remote.endpoint.as_ref()) {
            let url = Url::parse(endpoint).code(EXIT_USAGE)?;
            let space = match (space, task) {
                (Some(s), _) => s,
                (None, AnalysisTask::Stance) => ctx.config.stance_space().code(EXIT_USAGE)?,
                (None, AnalysisTask::Policy) => {
                    ctx.config.policy_space().code(EXIT_USAGE)?.unwrap_or_else(|| LabelSpace::default_for(task))
                }
                (None, t) => LabelSpace::default_for(t),
            };
            let mut backend = RemoteBackend::new(url, space, Duration::from_secs(ctx.config.remote.timeout_secs));
            if let Some(r) = ctx.config.remote.rate_limit {
                backend = backend.with_rate_limit(r);
            }
            return Ok(Box::new(backend));
        }
        if self.llm {
            if task != AnalysisTask::Outcome {
                return fail(EXIT_USAGE, "the LLM backend only predicts outcomes");
            }
            return Ok(Box::new(crate::commands::analyze::llm_backend(ctx)?));
        }
        match task {
            AnalysisTask::Sentiment => {
                log::warn!("no sentiment model given; using the heuristic lexicon scorer");
                Ok(Box::new(SentimentLexicon::new()))
            }
            AnalysisTask::Offensive => {
                log::warn!("no offensive-language model given; using the heuristic lexicon scorer");
                Ok(Box::new(OffensiveLexicon::new()))
            }
            _ => fail(EXIT_USAGE, format!("the {task} task needs --model, --endpoint or a configured backend")),
        }
    }
}

/// Loads a dataset directory; a missing or unreadable dataset is an I/O failure.
pub fn load_dataset(dir: &Path) -> CmdResult<DatasetSplits> {
    if !dir.is_dir() {
        return fail(EXIT_IO, format!("dataset {} does not exist", dir.display()));
    }
    afd_core::dataset::load(dir).code(EXIT_IO)
}

pub fn split_items(ds: &DatasetSplits, split: SplitArg) -> Vec<Discussion> {
    match split {
        SplitArg::Train => ds.train.clone(),
        SplitArg::Validation => ds.validation.clone(),
        SplitArg::Test => ds.test.clone(),
        SplitArg::All => ds.splits().concat(),
    }
}

/// Examples for a trainable task. Policy needs its label space.
pub fn task_examples(
    task: AnalysisTask,
    discussions: &[Discussion],
    variants: &VariantTable,
    policy: Option<&LabelSpace>,
) -> CmdResult<Vec<Example>> {
    Ok(match task {
        AnalysisTask::Outcome => outcome_examples(discussions),
        AnalysisTask::Stance => stance_examples(discussions, variants),
        AnalysisTask::Policy => match policy {
            Some(space) => policy_examples(discussions, space),
            None => return fail(EXIT_USAGE, "policy examples need a label space"),
        },
        t => return fail(EXIT_USAGE, format!("{t} has no gold labels in the dataset; supply --predictions or --scores")),
    })
}
