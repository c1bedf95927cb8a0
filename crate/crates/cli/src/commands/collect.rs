use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use afd_core::collector::{parse_afd_url, resolve_plan, CollectError, CollectRequest};
use afd_core::pipeline::collect_discussions;
use chrono::NaiveDate;
use clap::{Args, ValueEnum};
use serde_json::json;

use super::{Ctx, NetArgs};
use crate::output::{print_records, write_jsonl};
use crate::{fail, CmdResult, Format, WithCode, EXIT_IO, EXIT_USAGE};

pub const DISCUSSIONS_FILE: &str = "discussions.jsonl";
pub const FAILURES_FILE: &str = "failures.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    /// One discussion or log page.
    Url,
    /// One daily log page.
    Date,
    /// Every daily log page from --start to --end inclusive.
    #[value(name = "date_range", alias = "date-range")]
    DateRange,
    /// The 2023-01-01 to 2024-07-18 window.
    #[value(name = "wide_2023", alias = "wide-2023")]
    Wide2023,
}

#[derive(Debug, Args)]
pub struct CollectArgs {
    #[arg(long, value_enum)]
    pub mode: ModeArg,
    /// Page URL (url mode).
    #[arg(long)]
    pub url: Option<String>,
    /// Log date, YYYY-MM-DD (date mode).
    #[arg(long)]
    pub date: Option<NaiveDate>,
    /// First log date (date_range mode).
    #[arg(long)]
    pub start: Option<NaiveDate>,
    /// Last log date (date_range mode).
    #[arg(long)]
    pub end: Option<NaiveDate>,
    /// Output directory; raw pages are cached under <out>/raw by default.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub net: NetArgs,
}

fn request(args: &CollectArgs) -> CmdResult<CollectRequest> {
    let missing = |flag: &str| fail(EXIT_USAGE, format!("--mode {:?} needs {flag}", args.mode));
    Ok(match args.mode {
        ModeArg::Url => match &args.url {
            Some(u) => CollectRequest::url(u.clone()),
            None => return missing("--url"),
        },
        ModeArg::Date => match args.date {
            Some(d) => CollectRequest::date(d),
            None => return missing("--date"),
        },
        ModeArg::DateRange => match (args.start, args.end) {
            (Some(s), Some(e)) => CollectRequest::date_range(s, e),
            _ => return missing("--start and --end"),
        },
        ModeArg::Wide2023 => CollectRequest::wide_2023(),
    })
}

pub fn run(ctx: &Ctx, args: CollectArgs) -> CmdResult {
    let req = request(&args)?;
    let template = args.net.template(&ctx.config)?;
    let plan = match resolve_plan(&req, &template) {
        Ok(p) => p,
        Err(CollectError::InvalidDateRange { start, end }) => {
            return fail(EXIT_USAGE, format!("reversed date range: --start {start} is after --end {end}"))
        }
        Err(e) => return fail(EXIT_USAGE, e),
    };
    if let Some(u) = &args.url {
        parse_afd_url(u).code(EXIT_USAGE)?;
    }
    args.net.check_hosts(plan.pages.iter().map(|p| &p.url))?;
    let variants = ctx.config.variants().code(EXIT_USAGE)?;
    fs::create_dir_all(&args.out).code(EXIT_IO)?;
    let collector = args.net.collector(&ctx.config, &args.out.join("raw"))?;
    log::info!("collecting {} page(s)", plan.pages.len());
    let collected = collect_discussions(&collector, &plan, &variants);

    write_jsonl(&args.out.join(DISCUSSIONS_FILE), &collected.discussions).code(EXIT_IO)?;
    write_jsonl(&args.out.join(FAILURES_FILE), &collected.failures).code(EXIT_IO)?;
    for f in &collected.failures {
        log::warn!("{}: {}", f.url, f.message);
    }

    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for d in &collected.discussions {
        *counts.entry(d.label.map_or("unlabeled", |l| l.as_str())).or_default() += 1;
    }
    match ctx.format {
        Format::Text => {
            println!(
                "pages: {} ok ({} cached), {} failed; discussions: {}",
                collected.pages_ok,
                collected.from_cache,
                collected.failures.len(),
                collected.discussions.len()
            );
            for (label, n) in &counts {
                println!("  {label:<14} {n}");
            }
        }
        Format::Csv => {
            println!("label,count");
            for (label, n) in &counts {
                println!("{label},{n}");
            }
        }
        Format::Records => print_records(counts.iter().map(|(l, n)| json!({"label": l, "count": n}))).code(EXIT_IO)?,
    }
    if collected.pages_ok == 0 && !plan.pages.is_empty() {
        return fail(EXIT_IO, format!("all {} page(s) failed", plan.pages.len()));
    }
    Ok(())
}
