use std::time::{Duration, Instant};

use afd_core::collector::{resolve_plan, CollectRequest, Collector, FetchConfig};
use afd_core::fixtures::{log_path, FixtureServer, FixtureSite};
use afd_core::parser::VariantTable;
use afd_core::pipeline::collect_discussions;
use chrono::NaiveDate;

fn day(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).unwrap()
}

fn fast_config(dir: &std::path::Path) -> FetchConfig {
    FetchConfig {
        rate_limit: 5000.0,
        concurrency: 16,
        retries: 1,
        backoff: Duration::from_millis(5),
        ..FetchConfig::new(dir)
    }
}

#[test]
fn wide_mode_equals_explicit_range() {
    let server = FixtureServer::start(FixtureSite::bundled().unwrap()).unwrap();
    let template = server.log_url_template();
    let table = VariantTable::default();
    let started = Instant::now();
    let run = |req: CollectRequest| {
        let dir = tempfile::tempdir().unwrap();
        let collector = Collector::new(fast_config(dir.path())).unwrap();
        let plan = resolve_plan(&req, &template).unwrap();
        let got = collect_discussions(&collector, &plan, &table);
        assert!(got.failures.is_empty(), "{:?}", got.failures);
        got.discussions.iter().map(|d| serde_json::to_string(d).unwrap() + "\n").collect::<String>()
    };
    let wide = run(CollectRequest::wide_2023());
    let range = run(CollectRequest::date_range(day(2023, 1, 1), day(2024, 7, 18)));
    assert!(wide == range, "wide and range outputs differ");
    assert!(wide.lines().count() > 3000);
    assert!(started.elapsed() < Duration::from_secs(10), "took {:?}", started.elapsed());
}

#[test]
fn warm_cache_makes_no_requests() {
    let server = FixtureServer::start(FixtureSite::bundled().unwrap()).unwrap();
    let plan = resolve_plan(&CollectRequest::date_range(day(2023, 1, 1), day(2023, 1, 5)), &server.log_url_template()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let cold = Collector::new(fast_config(dir.path())).unwrap();
    let first: Vec<_> = cold.fetch(&plan).into_iter().map(Result::unwrap).collect();
    assert_eq!(cold.network_calls(), 5);
    assert!(first.iter().all(|p| !p.from_cache));
    let hits = server.hits();
    let warm = Collector::new(fast_config(dir.path())).unwrap();
    let second: Vec<_> = warm.fetch(&plan).into_iter().map(Result::unwrap).collect();
    assert_eq!(warm.network_calls(), 0);
    assert_eq!(server.hits(), hits);
    assert!(second.iter().all(|p| p.from_cache));
    for (a, b) in first.iter().zip(&second) {
        assert_eq!((&a.url, &a.body, a.log_date), (&b.url, &b.body, b.log_date));
    }
}

#[test]
fn failed_pages_are_reported_in_place() {
    let site = FixtureSite::bundled().unwrap().with_failing(log_path(day(2023, 3, 2)));
    let server = FixtureServer::start(site).unwrap();
    let plan = resolve_plan(&CollectRequest::date_range(day(2023, 3, 1), day(2023, 3, 3)), &server.log_url_template()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let collector = Collector::new(fast_config(dir.path())).unwrap();
    let results = collector.fetch(&plan);
    assert!(results[0].is_ok() && results[1].is_err() && results[2].is_ok());
    assert_eq!(results[2].as_ref().unwrap().log_date, Some(day(2023, 3, 3)));
    let collected = collect_discussions(&collector, &plan, &VariantTable::default());
    assert_eq!(collected.pages_ok, 2);
    assert_eq!(collected.failures.len(), 1);
    assert!(collected.failures[0].url.contains("2023_March_2"));
}

#[test]
fn rate_limit_spaces_requests() {
    let server = FixtureServer::start(FixtureSite::bundled().unwrap()).unwrap();
    let plan = resolve_plan(&CollectRequest::date_range(day(2023, 5, 1), day(2023, 5, 6)), &server.log_url_template()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let collector = Collector::new(FetchConfig { rate_limit: 2.0, concurrency: 6, ..fast_config(dir.path()) }).unwrap();
    let started = Instant::now();
    assert!(collector.fetch(&plan).iter().all(Result::is_ok));
    assert!(started.elapsed() >= Duration::from_millis(2500), "took {:?}", started.elapsed());
}
