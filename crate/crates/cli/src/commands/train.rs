use std::path::PathBuf;

use afd_core::classify::{train_baseline, AnalysisTask, Hyperparams, LabelSpace, POLICY_LABEL_COUNT};
use afd_core::pipeline::{policy_space, Example};
use clap::{Args, ValueEnum};
use serde_json::json;

use super::{load_dataset, task_examples, Ctx};
use crate::output::print_records;
use crate::{CmdResult, Format, WithCode, EXIT_IO, EXIT_USAGE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrainTask {
    Outcome,
    Stance,
    Policy,
}

impl From<TrainTask> for AnalysisTask {
    fn from(t: TrainTask) -> Self {
        match t {
            TrainTask::Outcome => AnalysisTask::Outcome,
            TrainTask::Stance => AnalysisTask::Stance,
            TrainTask::Policy => AnalysisTask::Policy,
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Dataset directory written by build-dataset.
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, value_enum, default_value_t = TrainTask::Outcome)]
    pub task: TrainTask,
    /// Model file to write.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    /// L2 penalty.
    #[arg(long)]
    pub l2: Option<f64>,
    /// Minimum document frequency of a vocabulary term.
    #[arg(long)]
    pub min_df: Option<usize>,
}

fn pairs(examples: Vec<Example>) -> Vec<(String, String)> {
    examples.into_iter().map(|e| (e.text, e.gold)).collect()
}

pub fn run(ctx: &Ctx, args: TrainArgs) -> CmdResult {
    let ds = load_dataset(&args.dataset)?;
    let task = AnalysisTask::from(args.task);
    let variants = ctx.config.variants().code(EXIT_USAGE)?;
    let space = match task {
        AnalysisTask::Stance => ctx.config.stance_space().code(EXIT_USAGE)?,
        AnalysisTask::Policy => match ctx.config.policy_space().code(EXIT_USAGE)? {
            Some(s) => s,
            None => policy_space(&ds.train, POLICY_LABEL_COUNT),
        },
        t => LabelSpace::default_for(t),
    };
    let train = pairs(task_examples(task, &ds.train, &variants, Some(&space))?);
    let validation: Vec<(String, String)> = pairs(task_examples(task, &ds.validation, &variants, Some(&space))?)
        .into_iter()
        .filter(|(_, l)| space.index_of(l).is_some())
        .collect();
    let b = &ctx.config.baseline;
    let defaults = Hyperparams::default();
    let hp = Hyperparams {
        learning_rate: args.learning_rate.or(b.learning_rate).unwrap_or(defaults.learning_rate),
        epochs: args.epochs.or(b.epochs).unwrap_or(defaults.epochs),
        l2: args.l2.or(b.l2).unwrap_or(defaults.l2),
        min_df: args.min_df.or(b.min_df).unwrap_or(defaults.min_df),
        seed: ctx.config.split.seed,
    };
    log::info!("training {task} baseline on {} examples ({} validation)", train.len(), validation.len());
    let (model, report) = train_baseline(space, &train, &validation, hp).code(EXIT_USAGE)?;
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).code(EXIT_IO)?;
    }
    model.save(&args.out).code(EXIT_IO)?;
    let f1 = report.validation_macro_f1;
    match ctx.format {
        Format::Text => {
            println!(
                "{task} baseline: {} train examples, vocabulary {}, final loss {:.4}",
                train.len(),
                report.vocabulary_size,
                report.losses.last().copied().unwrap_or(f64::NAN)
            );
            match f1 {
                Some(f) => println!("validation macro-F1 {f:.4}"),
                None => println!("validation split is empty"),
            }
        }
        Format::Csv => println!(
            "task,train_examples,vocabulary,validation_macro_f1\n{task},{},{},{}",
            train.len(),
            report.vocabulary_size,
            f1.map_or(String::new(), |f| format!("{f:.6}"))
        ),
        Format::Records => print_records([json!({
            "task": task,
            "train_examples": train.len(),
            "vocabulary_size": report.vocabulary_size,
            "validation_macro_f1": f1,
            "validation_accuracy": report.validation_accuracy,
            "model": args.out,
        })])
        .code(EXIT_IO)?,
    }
    Ok(())
}
