//! Local HTTP server for offline runs and tests.
//!
//! [`FixtureSite`] maps request paths to HTML: the bundled hand-annotated
//! corpus, explicitly added pages, and (optionally) a synthetic log page for
//! every other date. [`FixtureServer`] serves a site on `127.0.0.1`.

pub mod synth;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread::JoinHandle;
use std::time::Duration;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};
use url::Url;

use crate::collector::{log_date_from_url, LogUrlTemplate, MONTHS};

pub use synth::{render_log_page, separable_corpus, synthetic_log, SyntheticComment, SyntheticDiscussion};

pub const LOG_PATH_PREFIX: &str = "/wiki/Wikipedia:Articles_for_deletion/Log/";
pub const DISCUSSION_PATH_PREFIX: &str = "/wiki/Wikipedia:Articles_for_deletion/";

/// Golden record for one discussion of a bundled page.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Golden {
    pub title: String,
    pub anchor: String,
    pub closed: bool,
    pub label: Option<String>,
    /// Comment texts in document order, nomination first.
    pub comments: Vec<String>,
    /// Bold vote strings in document order.
    pub votes: Vec<String>,
}

/// One bundled page and its goldens.
#[derive(Debug, Clone)]
pub struct CorpusPage {
    pub path: PathBuf,
    pub date: Option<NaiveDate>,
    pub html: String,
    pub goldens: Vec<Golden>,
}

/// Directory of the corpus shipped with the crate.
pub fn bundled_corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join("afd")
}

/// Loads every `<name>.html` with its `<name>.expected.jsonl` sidecar.
/// Log pages are named `YYYY-MM-DD.html`.
pub fn load_corpus(dir: &Path) -> io::Result<Vec<CorpusPage>> {
    let mut pages = Vec::new();
    let mut entries: Vec<_> = fs::read_dir(dir)?.collect::<Result<_, _>>()?;
    entries.sort_by_key(|e| e.file_name());
    for entry in entries {
        let path = entry.path();
        if path.extension().and_then(|e| e.to_str()) != Some("html") {
            continue;
        }
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        let html = fs::read_to_string(&path)?;
        let golden_path = path.with_file_name(format!("{stem}.expected.jsonl"));
        let goldens = match fs::read_to_string(&golden_path) {
            Ok(text) => text
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(|l| serde_json::from_str(l).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e)))
                .collect::<io::Result<_>>()?,
            Err(e) if e.kind() == io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(e),
        };
        let date = NaiveDate::parse_from_str(&stem, "%Y-%m-%d").ok();
        pages.push(CorpusPage { path, date, html, goldens });
    }
    Ok(pages)
}

/// Request path of the daily log page for `date`.
pub fn log_path(date: NaiveDate) -> String {
    format!("{LOG_PATH_PREFIX}{}_{}_{}", date.year(), MONTHS[date.month0() as usize], date.day())
}

/// What a fixture server answers.
#[derive(Debug, Clone, Default)]
pub struct FixtureSite {
    pages: BTreeMap<String, String>,
    failing: BTreeSet<String>,
    synthetic: bool,
}

impl FixtureSite {
    pub fn new() -> Self {
        Self::default()
    }

    /// The bundled corpus plus synthetic pages for every other log date.
    pub fn bundled() -> io::Result<Self> {
        let mut site = Self::new().with_synthetic(true);
        for page in load_corpus(&bundled_corpus_dir())? {
            let path = match page.date {
                Some(date) => log_path(date),
                None => {
                    let stem = page.path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
                    format!("{DISCUSSION_PATH_PREFIX}{}", stem.trim_start_matches("afd-"))
                }
            };
            site.pages.insert(path, page.html);
        }
        Ok(site)
    }

    pub fn with_page(mut self, path: impl Into<String>, html: impl Into<String>) -> Self {
        self.pages.insert(path.into(), html.into());
        self
    }

    /// Requests for `path` answer 503.
    pub fn with_failing(mut self, path: impl Into<String>) -> Self {
        self.failing.insert(path.into());
        self
    }

    pub fn with_synthetic(mut self, on: bool) -> Self {
        self.synthetic = on;
        self
    }

    /// Body for a decoded request path, or `None` for 404.
    pub fn page(&self, path: &str) -> Option<String> {
        if let Some(html) = self.pages.get(path) {
            return Some(html.clone());
        }
        if !self.synthetic || !path.starts_with(LOG_PATH_PREFIX) {
            return None;
        }
        let url = Url::parse(&format!("http://fixture{path}")).ok()?;
        let date = log_date_from_url(&url)?;
        Some(render_log_page(date, &synthetic_log(date)))
    }
}

struct Shared {
    site: FixtureSite,
    hits: AtomicUsize,
    stop: AtomicBool,
}

/// A [`FixtureSite`] served over HTTP on an ephemeral local port. Stops on drop.
pub struct FixtureServer {
    base: String,
    shared: Arc<Shared>,
    workers: Vec<JoinHandle<()>>,
}

impl FixtureServer {
    pub fn start(site: FixtureSite) -> io::Result<Self> {
        let server = tiny_http::Server::http("127.0.0.1:0").map_err(io::Error::other)?;
        let port = server.server_addr().to_ip().map(|a| a.port()).ok_or_else(|| io::Error::other("no ip address"))?;
        let server = Arc::new(server);
        let shared = Arc::new(Shared { site, hits: AtomicUsize::new(0), stop: AtomicBool::new(false) });
        let workers = (0..4)
            .map(|_| {
                let server = Arc::clone(&server);
                let shared = Arc::clone(&shared);
                std::thread::spawn(move || serve(&server, &shared))
            })
            .collect();
        Ok(FixtureServer { base: format!("http://127.0.0.1:{port}"), shared, workers })
    }

    pub fn base_url(&self) -> &str {
        &self.base
    }

    /// Full URL for a request path.
    pub fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    pub fn log_url_template(&self) -> LogUrlTemplate {
        LogUrlTemplate::new(format!("{}{LOG_PATH_PREFIX}{{year}}_{{month}}_{{day}}", self.base))
            .expect("fixture template is well formed")
    }

    /// Requests answered so far.
    pub fn hits(&self) -> usize {
        self.shared.hits.load(Ordering::SeqCst)
    }
}

impl Drop for FixtureServer {
    fn drop(&mut self) {
        self.shared.stop.store(true, Ordering::SeqCst);
        for w in self.workers.drain(..) {
            let _ = w.join();
        }
    }
}

fn serve(server: &tiny_http::Server, shared: &Shared) {
    while !shared.stop.load(Ordering::SeqCst) {
        let request = match server.recv_timeout(Duration::from_millis(50)) {
            Ok(Some(r)) => r,
            Ok(None) => continue,
            Err(_) => break,
        };
        shared.hits.fetch_add(1, Ordering::SeqCst);
        let raw_path = request.url().split(['?', '#']).next().unwrap_or("/").to_string();
        let path = crate::collector::percent_decode(&raw_path);
        let response = if shared.site.failing.contains(&path) {
            tiny_http::Response::from_string("unavailable").with_status_code(503)
        } else if let Some(html) = shared.site.page(&path) {
            let header = tiny_http::Header::from_bytes("Content-Type", "text/html; charset=UTF-8").unwrap();
            tiny_http::Response::from_string(html).with_header(header)
        } else {
            tiny_http::Response::from_string("not found").with_status_code(404)
        };
        let _ = request.respond(response);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_corpus_loads() {
        let pages = load_corpus(&bundled_corpus_dir()).unwrap();
        assert!(pages.len() >= 20);
        assert!(pages.iter().all(|p| !p.goldens.is_empty()));
    }

    #[test]
    fn site_routes() {
        let site = FixtureSite::bundled().unwrap();
        let d = NaiveDate::from_ymd_opt(2023, 1, 4).unwrap();
        assert!(site.page(&log_path(d)).unwrap().contains("Kelvor Matusan"));
        assert!(site.page(&log_path(NaiveDate::from_ymd_opt(2023, 1, 5).unwrap())).is_some());
        assert!(site.page("/wiki/Main_Page").is_none());
        assert!(FixtureSite::new().page(&log_path(d)).is_none());
    }
}
