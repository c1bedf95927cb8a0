use std::path::{Path, PathBuf};

use afd_core::dataset::{build_dataset, compute_stats, labeled_only, save, Ratios, SPLIT_NAMES};
use afd_core::parser::{Discussion, MaskMode};
use clap::Args;
use serde_json::json;

use super::{load_dataset, Ctx};
use crate::output::{print_records, read_jsonl};
use crate::{fail, CmdResult, Format, WithCode, EXIT_IO, EXIT_USAGE};

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// discussions.jsonl files, or directories containing one.
    #[arg(long, required = true, num_args = 1..)]
    pub input: Vec<PathBuf>,
    /// Dataset output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Split seed (overrides config `split.seed`).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Train,validation,test ratios, e.g. 0.7,0.1,0.2.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    pub ratios: Option<Vec<f64>>,
    /// Remove bold votes from every discussion text.
    #[arg(long)]
    pub masked: bool,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Dataset directory written by build-dataset.
    #[arg(long)]
    pub dataset: PathBuf,
}

fn input_file(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join(super::collect::DISCUSSIONS_FILE)
    } else {
        path.to_path_buf()
    }
}

pub fn build(ctx: &Ctx, args: BuildArgs) -> CmdResult {
    let ratios = match &args.ratios {
        Some(r) => Ratios::new(r[0], r[1], r[2]).code(EXIT_USAGE)?,
        None => ctx.config.ratios().code(EXIT_USAGE)?,
    };
    let seed = args.seed.unwrap_or(ctx.config.split.seed);
    let mut all: Vec<Discussion> = Vec::new();
    for p in &args.input {
        all.extend(read_jsonl::<Discussion>(&input_file(p)).code(EXIT_IO)?);
    }
    let total = all.len();
    let labeled = labeled_only(all);
    log::info!("{} of {total} discussions are closed and labeled", labeled.len());
    if labeled.is_empty() {
        return fail(EXIT_IO, format!("no labeled discussions in {total} input record(s)"));
    }
    let mut splits = build_dataset(labeled, ratios, seed).code(EXIT_USAGE)?;
    if args.masked {
        splits = splits.masked(&ctx.config.variants().code(EXIT_USAGE)?, MaskMode::Delete);
    }
    for l in &splits.info.degenerate_labels {
        log::warn!("label {l} has too few items to stratify; all went to train");
    }
    save(&splits, &args.out).code(EXIT_IO)?;
    let [a, b, c] = splits.sizes();
    match ctx.format {
        Format::Text => println!(
            "train {a}, validation {b}, test {c} ({} duplicates collapsed, seed {seed}) -> {}",
            splits.info.duplicates_collapsed,
            args.out.display()
        ),
        Format::Csv => println!("split,count\ntrain,{a}\nvalidation,{b}\ntest,{c}"),
        Format::Records => {
            print_records(SPLIT_NAMES.iter().zip([a, b, c]).map(|(s, n)| json!({"split": s, "count": n})))
                .code(EXIT_IO)?
        }
    }
    Ok(())
}

pub fn stats(ctx: &Ctx, args: StatsArgs) -> CmdResult {
    let splits = load_dataset(&args.dataset)?;
    let stats = compute_stats(&splits);
    match ctx.format {
        Format::Text => print!("{}", stats.to_table()),
        Format::Csv => print!("{}", stats.to_csv()),
        Format::Records => print_records(&stats.labels).code(EXIT_IO)?,
    }
    Ok(())
}
