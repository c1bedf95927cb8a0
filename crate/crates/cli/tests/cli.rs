mod common;

use afd_core::fixtures::{FixtureServer, FixtureSite, LOG_PATH_PREFIX};
use common::*;
use tempfile::TempDir;

const COMMANDS: [(&str, &[&str]); 7] = [
    ("collect", &["--mode", "--url", "--date", "--start", "--end", "--out", "--cache-dir", "--rate-limit", "--concurrency", "--log-url-template", "--refresh", "--live"]),
    ("build-dataset", &["--input", "--out", "--seed", "--ratios", "--masked"]),
    ("stats", &["--dataset"]),
    ("train-baseline", &["--dataset", "--task", "--out", "--learning-rate", "--epochs", "--l2", "--min-df"]),
    ("analyze", &["--task", "--url", "--text", "--title", "--explanation", "--model", "--endpoint", "--llm", "--cache-dir", "--live"]),
    ("evaluate", &["--dataset", "--split", "--task", "--predictions", "--labels", "--out", "--model", "--endpoint"]),
    ("correlate", &["--dataset", "--split", "--aux", "--aggregation", "--scores", "--out", "--model"]),
];

#[test]
fn help_lists_every_flag() {
    let dir = TempDir::new().unwrap();
    for (cmd, flags) in COMMANDS {
        let o = afd(dir.path()).args([cmd, "--help"]).output().unwrap();
        assert!(o.status.success(), "{cmd}");
        let help = stdout(&o);
        for f in flags.iter().chain(&["--config", "--format", "--verbose"]) {
            assert!(help.contains(f), "{cmd} --help lacks {f}\n{help}");
        }
    }
}

#[test]
fn unknown_flag_exits_2() {
    let dir = TempDir::new().unwrap();
    for (cmd, _) in COMMANDS {
        let o = afd(dir.path()).args([cmd, "--no-such-flag"]).output().unwrap();
        assert_eq!(o.status.code(), Some(2), "{cmd}");
    }
}

#[test]
fn reversed_range_exits_2_naming_dates() {
    let dir = TempDir::new().unwrap();
    let o = afd(dir.path())
        .args(["collect", "--mode", "date_range", "--start", "2023-01-05", "--end", "2023-01-01", "--out", "d"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("2023-01-05") && err.contains("2023-01-01"), "{err}");
    assert!(!dir.path().join("d").exists());
}

#[test]
fn live_host_needs_flag() {
    let dir = TempDir::new().unwrap();
    let o = afd(dir.path()).args(["collect", "--mode", "date", "--date", "2023-01-01", "--out", "d"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--live"));
}

#[test]
fn collect_one_date_from_fixture() {
    let server = FixtureServer::start(FixtureSite::bundled().unwrap()).unwrap();
    let dir = TempDir::new().unwrap();
    let template = format!("{}{LOG_PATH_PREFIX}{{year}}_{{month}}_{{day}}", server.base_url());
    let o = afd(dir.path())
        .args(["collect", "--mode", "date", "--date", "2023-01-01", "--out", "d", "--log-url-template", &template])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("pages: 1 ok"), "{}", stdout(&o));
    let text = std::fs::read_to_string(dir.path().join("d/discussions.jsonl")).unwrap();
    assert!(text.lines().count() > 0);
    assert!(dir.path().join("d/raw").is_dir());
    assert_eq!(std::fs::read_to_string(dir.path().join("d/failures.jsonl")).unwrap(), "");
}

#[test]
fn explanation_without_key_exits_3() {
    let dir = TempDir::new().unwrap();
    let o = afd(dir.path()).args(["analyze", "--task", "outcome", "--text", "Delete, no sources.", "--explanation"]).output().unwrap();
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("OPENAI_API_KEY"));
}

#[test]
fn sentiment_text_gives_sentence_records() {
    let dir = TempDir::new().unwrap();
    let o = afd(dir.path())
        .args(["--format", "records", "analyze", "--task", "sentiment", "--text", "This is a poor, unreliable article. It is great work. Sources exist."])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let recs = records(&o);
    assert_eq!(recs.len(), 3);
    for r in &recs {
        assert!(r["sentence"].is_string() && r["sentiment"].is_string() && r["score"].is_number(), "{r}");
    }
    assert_eq!(recs[0]["sentiment"], "negative");
    assert_eq!(recs[1]["sentiment"], "positive");
}

#[test]
fn outcome_without_model_exits_2() {
    let dir = TempDir::new().unwrap();
    let o = afd(dir.path()).args(["analyze", "--task", "outcome", "--text", "Delete."]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn evaluate_prediction_files() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("p.jsonl");
    write_lines(&p, &two_label_predictions());
    let o = afd(dir.path()).args(["evaluate", "--predictions", "p.jsonl", "--out", "rep"]).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("macro-F1 0.7494"), "{}", stdout(&o));
    for f in ["report.json", "per_label.csv", "confusion.csv"] {
        assert!(dir.path().join("rep").join(f).is_file(), "{f}");
    }
    let confusion = std::fs::read_to_string(dir.path().join("rep/confusion.csv")).unwrap();
    assert!(confusion.contains("8,2") && confusion.contains("3,7"), "{confusion}");

    let gold: Vec<_> = two_label_predictions().into_iter().map(|mut v| {
        v["prediction"] = v["gold"].clone();
        v.as_object_mut().unwrap().remove("predicted");
        v
    }).collect();
    write_lines(&p, &gold);
    let o = afd(dir.path()).args(["--format", "records", "evaluate", "--predictions", "p.jsonl"]).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(records(&o)[0]["macro_f1"], 1.0);
}

#[test]
fn evaluate_missing_dataset_exits_1() {
    let dir = TempDir::new().unwrap();
    let o = afd(dir.path()).args(["evaluate", "--dataset", "nowhere", "--model", "m.json"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let o = afd(dir.path()).args(["stats", "--dataset", "nowhere"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn correlate_score_files() {
    let dir = TempDir::new().unwrap();
    for (anti, want) in [(false, 1.0), (true, -1.0)] {
        let p = dir.path().join("s.jsonl");
        write_lines(&p, &aligned_scores(anti));
        let o = afd(dir.path()).args(["--format", "records", "correlate", "--scores", "s.jsonl", "--out", "c"]).output().unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        let cell = records(&o).into_iter().find(|r| r["class"] == "negative" && r["outcome"] == "delete").unwrap();
        assert!((cell["r"].as_f64().unwrap() - want).abs() < 1e-9, "{cell}");
        assert!(dir.path().join("c/correlation.json").is_file());
        assert!(dir.path().join("c/correlation.csv").is_file());
    }
    let o = afd(dir.path()).args(["correlate", "--scores", "s.jsonl"]).output().unwrap();
    assert!(stdout(&o).contains("-1.00"), "{}", stdout(&o));
}

#[test]
fn bad_config_exits_2() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("afd.toml"), "bogus_key = 1\n").unwrap();
    let o = afd(dir.path()).args(["stats", "--dataset", "x"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(dir.path().join("afd.toml"), "[split]\ntrain = 0.9\nvalidation = 0.2\ntest = 0.2\n").unwrap();
    let o = afd(dir.path()).args(["stats", "--dataset", "x"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
