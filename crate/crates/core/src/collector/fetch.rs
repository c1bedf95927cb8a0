use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;
use ureq::Agent;
use url::Url;

use super::cache::{CacheEntryMeta, PageCache};
use super::FetchPlan;

const MAX_BODY_BYTES: u64 = 64 * 1024 * 1024;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FetchError {
    #[error("network error fetching {url}: {cause}")]
    Network { url: String, cause: String },
    #[error("cache I/O error: {0}")]
    CacheIo(String),
    #[error("empty body from {url}")]
    EmptyBody { url: String },
    #[error("invalid fetch configuration: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawPage {
    pub url: Url,
    pub fetched_at: DateTime<Utc>,
    pub body: String,
    pub from_cache: bool,
    /// Day of the log page, when the page came from a date plan.
    pub log_date: Option<NaiveDate>,
}

#[derive(Debug, Clone)]
pub struct FetchConfig {
    pub cache_dir: PathBuf,
    /// Requests per second, shared by all workers.
    pub rate_limit: f64,
    /// Maximum requests in flight.
    pub concurrency: usize,
    pub user_agent: String,
    pub retries: u32,
    /// First retry delay; doubles on each further attempt.
    pub backoff: Duration,
    /// Re-fetch even when a cache entry exists.
    pub refresh: bool,
    pub timeout: Duration,
}

pub const DEFAULT_USER_AGENT: &str =
    concat!("afd-core/", env!("CARGO_PKG_VERSION"), " (Articles for Deletion research crawler; polite, cached)");

impl FetchConfig {
    pub fn new(cache_dir: impl Into<PathBuf>) -> Self {
        FetchConfig {
            cache_dir: cache_dir.into(),
            rate_limit: 1.0,
            concurrency: 4,
            user_agent: DEFAULT_USER_AGENT.to_string(),
            retries: 3,
            backoff: Duration::from_secs(1),
            refresh: false,
            timeout: Duration::from_secs(30),
        }
    }
}

/// Token bucket of capacity one: grants are spaced at least `1/rate` apart.
#[derive(Debug)]
pub struct RateLimiter {
    interval: Duration,
    next: Mutex<Option<Instant>>,
}

impl RateLimiter {
    pub fn new(per_second: f64) -> Self {
        RateLimiter { interval: Duration::from_secs_f64(1.0 / per_second), next: Mutex::new(None) }
    }

    /// Blocks until the caller may issue a request.
    pub fn acquire(&self) {
        let slot = {
            let mut next = self.next.lock().unwrap_or_else(|e| e.into_inner());
            let now = Instant::now();
            let slot = next.map_or(now, |n| n.max(now));
            *next = Some(slot + self.interval);
            slot
        };
        let now = Instant::now();
        if slot > now {
            thread::sleep(slot - now);
        }
    }
}

/// Fetches pages through the cache, the rate limiter and a bounded worker pool.
pub struct Collector {
    config: FetchConfig,
    agent: Agent,
    limiter: RateLimiter,
    cache: PageCache,
    network_calls: AtomicUsize,
}

enum Attempt {
    Done(String, u16, BTreeMap<String, String>),
    Retry(String),
    Fail(String),
}

impl Collector {
    pub fn new(config: FetchConfig) -> Result<Self, FetchError> {
        if !(config.rate_limit.is_finite() && config.rate_limit > 0.0) {
            return Err(FetchError::InvalidConfig(format!("rate limit must be > 0, got {}", config.rate_limit)));
        }
        if config.concurrency == 0 {
            return Err(FetchError::InvalidConfig("concurrency must be >= 1".into()));
        }
        if config.user_agent.trim().is_empty() {
            return Err(FetchError::InvalidConfig("a descriptive user agent is required".into()));
        }
        let cache = PageCache::new(&config.cache_dir)
            .map_err(|e| FetchError::CacheIo(format!("{}: {e}", config.cache_dir.display())))?;
        let agent: Agent = Agent::config_builder()
            .user_agent(config.user_agent.as_str())
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Ok(Collector { limiter: RateLimiter::new(config.rate_limit), config, agent, cache, network_calls: AtomicUsize::new(0) })
    }

    pub fn config(&self) -> &FetchConfig {
        &self.config
    }

    pub fn cache(&self) -> &PageCache {
        &self.cache
    }

    /// HTTP requests issued so far, retries included.
    pub fn network_calls(&self) -> usize {
        self.network_calls.load(Ordering::SeqCst)
    }

    /// Fetches every planned page. Results follow plan order; a failing page
    /// does not stop the others.
    pub fn fetch(&self, plan: &FetchPlan) -> Vec<Result<RawPage, FetchError>> {
        let n = plan.pages.len();
        let results: Vec<Mutex<Option<Result<RawPage, FetchError>>>> = (0..n).map(|_| Mutex::new(None)).collect();
        let cursor = AtomicUsize::new(0);
        let workers = self.config.concurrency.min(n.max(1));
        thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = cursor.fetch_add(1, Ordering::SeqCst);
                    if i >= n {
                        break;
                    }
                    let page = &plan.pages[i];
                    let result = self.fetch_url(&page.url, page.date);
                    *results[i].lock().unwrap() = Some(result);
                });
            }
        });
        results.into_iter().map(|m| m.into_inner().unwrap().expect("every page visited")).collect()
    }

    /// Fetches one page, serving it from the cache when possible.
    pub fn fetch_url(&self, url: &Url, log_date: Option<NaiveDate>) -> Result<RawPage, FetchError> {
        let mut page_url = url.clone();
        page_url.set_fragment(None);
        if !self.config.refresh {
            let cached = self.cache.get(&page_url).map_err(|e| FetchError::CacheIo(format!("{page_url}: {e}")))?;
            if let Some((body, meta)) = cached {
                if !body.is_empty() {
                    return Ok(RawPage { url: url.clone(), fetched_at: meta.fetched_at, body, from_cache: true, log_date });
                }
            }
        }
        let (body, status, headers) = self.download(&page_url)?;
        if body.trim().is_empty() {
            return Err(FetchError::EmptyBody { url: page_url.to_string() });
        }
        let fetched_at = Utc::now();
        let meta = CacheEntryMeta { url: page_url.to_string(), fetched_at, status, headers };
        self.cache
            .put(&page_url, &body, &meta, self.config.refresh)
            .map_err(|e| FetchError::CacheIo(format!("{page_url}: {e}")))?;
        Ok(RawPage { url: url.clone(), fetched_at, body, from_cache: false, log_date })
    }

    fn download(&self, url: &Url) -> Result<(String, u16, BTreeMap<String, String>), FetchError> {
        let mut last_cause = String::new();
        for attempt in 0..=self.config.retries {
            if attempt > 0 {
                let delay = self.config.backoff.saturating_mul(1 << (attempt - 1).min(16));
                log::debug!("retrying {url} in {delay:?} ({last_cause})");
                thread::sleep(delay);
            }
            self.limiter.acquire();
            self.network_calls.fetch_add(1, Ordering::SeqCst);
            match self.attempt(url) {
                Attempt::Done(body, status, headers) => return Ok((body, status, headers)),
                Attempt::Retry(cause) => last_cause = cause,
                Attempt::Fail(cause) => return Err(FetchError::Network { url: url.to_string(), cause }),
            }
        }
        Err(FetchError::Network { url: url.to_string(), cause: last_cause })
    }

    fn attempt(&self, url: &Url) -> Attempt {
        let mut response = match self.agent.get(url.as_str()).call() {
            Ok(r) => r,
            Err(e) => return Attempt::Retry(e.to_string()),
        };
        let status = response.status().as_u16();
        if status == 429 || status >= 500 {
            return Attempt::Retry(format!("HTTP {status}"));
        }
        if !(200..300).contains(&status) {
            return Attempt::Fail(format!("HTTP {status}"));
        }
        let headers = response
            .headers()
            .iter()
            .map(|(k, v)| (k.as_str().to_string(), String::from_utf8_lossy(v.as_bytes()).into_owned()))
            .collect();
        match response.body_mut().with_config().limit(MAX_BODY_BYTES).read_to_string() {
            Ok(body) => Attempt::Done(body, status, headers),
            Err(e) => Attempt::Retry(e.to_string()),
        }
    }
}
