//! Fetching AfD daily-log pages: plan resolution, polite HTTP fetching and an
//! on-disk page cache.

mod cache;
mod fetch;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use url::Url;

pub use cache::{CacheEntryMeta, PageCache};
pub use fetch::{Collector, FetchConfig, FetchError, RateLimiter, RawPage};

/// English Wikipedia daily AfD log. Placeholders: `{year}`, `{month}` (full
/// English month name), `{day}` (unpadded).
pub const DEFAULT_LOG_URL_TEMPLATE: &str =
    "https://en.wikipedia.org/wiki/Wikipedia:Articles_for_deletion/Log/{year}_{month}_{day}";

/// Path fragment every accepted AfD URL carries.
pub const AFD_PATH_MARKER: &str = "Articles_for_deletion/";

/// First and last day of the 2023-2024 snapshot behind `wide_2023`.
pub const WIDE_2023_START: (i32, u32, u32) = (2023, 1, 1);
pub const WIDE_2023_END: (i32, u32, u32) = (2024, 7, 18);

pub const MONTHS: [&str; 12] = [
    "January", "February", "March", "April", "May", "June", "July", "August", "September", "October", "November",
    "December",
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CollectError {
    #[error("invalid date range: start {start} is after end {end}")]
    InvalidDateRange { start: NaiveDate, end: NaiveDate },
    #[error("malformed URL {url:?}: {reason}")]
    MalformedUrl { url: String, reason: String },
    #[error("invalid collect request: {0}")]
    InvalidRequest(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollectMode {
    Url,
    Date,
    DateRange,
    #[serde(rename = "wide_2023")]
    Wide2023,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollectRequest {
    pub mode: CollectMode,
    pub url: Option<String>,
    pub start_date: Option<NaiveDate>,
    pub end_date: Option<NaiveDate>,
}

impl CollectRequest {
    pub fn url(url: impl Into<String>) -> Self {
        CollectRequest { mode: CollectMode::Url, url: Some(url.into()), start_date: None, end_date: None }
    }

    pub fn date(date: NaiveDate) -> Self {
        CollectRequest { mode: CollectMode::Date, url: None, start_date: Some(date), end_date: None }
    }

    pub fn date_range(start: NaiveDate, end: NaiveDate) -> Self {
        CollectRequest { mode: CollectMode::DateRange, url: None, start_date: Some(start), end_date: Some(end) }
    }

    pub fn wide_2023() -> Self {
        CollectRequest { mode: CollectMode::Wide2023, url: None, start_date: None, end_date: None }
    }
}

/// One page to fetch. `date` is known for log pages.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannedPage {
    pub date: Option<NaiveDate>,
    pub url: Url,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FetchPlan {
    pub pages: Vec<PlannedPage>,
}

/// Renders daily log URLs from a format string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogUrlTemplate(String);

impl LogUrlTemplate {
    pub fn new(template: impl Into<String>) -> Result<Self, CollectError> {
        let template = template.into();
        for placeholder in ["{year}", "{month}", "{day}"] {
            if !template.contains(placeholder) {
                return Err(CollectError::MalformedUrl {
                    url: template.clone(),
                    reason: format!("template lacks {placeholder}"),
                });
            }
        }
        let probe = LogUrlTemplate(template);
        probe.render(NaiveDate::from_ymd_opt(2023, 1, 1).unwrap())?;
        Ok(probe)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn render(&self, date: NaiveDate) -> Result<Url, CollectError> {
        let rendered = self
            .0
            .replace("{year}", &date.year().to_string())
            .replace("{month}", MONTHS[date.month0() as usize])
            .replace("{day}", &date.day().to_string());
        Url::parse(&rendered).map_err(|e| CollectError::MalformedUrl { url: rendered, reason: e.to_string() })
    }
}

impl Default for LogUrlTemplate {
    fn default() -> Self {
        LogUrlTemplate(DEFAULT_LOG_URL_TEMPLATE.to_string())
    }
}

/// Parses the `Log/<year>_<Month>_<day>` suffix of a daily log URL.
pub fn log_date_from_url(url: &Url) -> Option<NaiveDate> {
    let path = percent_decode(url.path());
    let tail = path.rsplit("/Log/").next().filter(|_| path.contains("/Log/"))?;
    let mut parts = tail.split(['_', ' ']);
    let year: i32 = parts.next()?.parse().ok()?;
    let month = parts.next()?;
    let month = MONTHS.iter().position(|m| m.eq_ignore_ascii_case(month))? as u32 + 1;
    let day: u32 = parts.next()?.parse().ok()?;
    if parts.next().is_some() {
        return None;
    }
    NaiveDate::from_ymd_opt(year, month, day)
}

pub(crate) fn percent_decode(s: &str) -> String {
    percent_encoding::percent_decode_str(s).decode_utf8_lossy().into_owned()
}

/// Checks a user-supplied AfD URL: absolute, http(s), with an AfD path.
pub fn parse_afd_url(raw: &str) -> Result<Url, CollectError> {
    let malformed = |reason: &str| CollectError::MalformedUrl { url: raw.to_string(), reason: reason.to_string() };
    let url = Url::parse(raw).map_err(|e| malformed(&e.to_string()))?;
    if !matches!(url.scheme(), "http" | "https") {
        return Err(malformed("scheme must be http or https"));
    }
    if !percent_decode(url.path()).replace(' ', "_").contains(AFD_PATH_MARKER) {
        return Err(malformed("not an Articles for deletion page"));
    }
    Ok(url)
}

fn date_span(start: NaiveDate, end: NaiveDate, template: &LogUrlTemplate) -> Result<FetchPlan, CollectError> {
    if start > end {
        return Err(CollectError::InvalidDateRange { start, end });
    }
    let pages = start
        .iter_days()
        .take_while(|d| *d <= end)
        .map(|date| Ok(PlannedPage { date: Some(date), url: template.render(date)? }))
        .collect::<Result<_, CollectError>>()?;
    Ok(FetchPlan { pages })
}

/// Expands a request into the ordered list of pages to fetch. Pure.
pub fn resolve_plan(req: &CollectRequest, template: &LogUrlTemplate) -> Result<FetchPlan, CollectError> {
    let invalid = |m: &str| CollectError::InvalidRequest(m.to_string());
    match req.mode {
        CollectMode::Url => {
            let raw = req.url.as_deref().ok_or_else(|| invalid("url mode requires a url"))?;
            if req.start_date.is_some() || req.end_date.is_some() {
                return Err(invalid("url mode takes no dates"));
            }
            let url = parse_afd_url(raw)?;
            Ok(FetchPlan { pages: vec![PlannedPage { date: log_date_from_url(&url), url }] })
        }
        CollectMode::Date => {
            let date = req.start_date.ok_or_else(|| invalid("date mode requires a date"))?;
            if req.end_date.is_some() || req.url.is_some() {
                return Err(invalid("date mode takes a single date"));
            }
            date_span(date, date, template)
        }
        CollectMode::DateRange => {
            let (Some(start), Some(end)) = (req.start_date, req.end_date) else {
                return Err(invalid("date_range mode requires start and end dates"));
            };
            if req.url.is_some() {
                return Err(invalid("date_range mode takes no url"));
            }
            date_span(start, end, template)
        }
        CollectMode::Wide2023 => {
            let (y, m, d) = WIDE_2023_START;
            let start = NaiveDate::from_ymd_opt(y, m, d).unwrap();
            let (y, m, d) = WIDE_2023_END;
            let end = NaiveDate::from_ymd_opt(y, m, d).unwrap();
            date_span(start, end, template)
        }
    }
}
