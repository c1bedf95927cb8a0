use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use url::Url;

use super::{BuildInfo, DatasetError, DatasetSplits, Ratios, SPLIT_NAMES};
use crate::parser::{Discussion, OutcomeLabel};

pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";
pub const DEDUP_POLICY: &str = "collapse by title; keep latest log date, then greatest url and text";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Record {
    title: String,
    text: String,
    label: OutcomeLabel,
    url: Url,
    date: Option<NaiveDate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub train: usize,
    pub validation: usize,
    pub test: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub seed: u64,
    pub ratios: Ratios,
    pub counts: Counts,
    pub source_date_range: Option<(NaiveDate, NaiveDate)>,
    pub dedup_policy: String,
    pub duplicates_collapsed: usize,
    pub degenerate_labels: Vec<OutcomeLabel>,
    pub masked: bool,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> DatasetError {
    DatasetError::Io(format!("{}: {e}", path.display()))
}

pub fn save(splits: &DatasetSplits, dir: &Path) -> Result<(), DatasetError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    for (name, items) in SPLIT_NAMES.iter().zip(splits.splits()) {
        let path = dir.join(format!("{name}.jsonl"));
        let file = fs::File::create(&path).map_err(|e| io_err(&path, e))?;
        let mut w = BufWriter::new(file);
        for d in items {
            let label = d.label.ok_or_else(|| DatasetError::Unlabeled(d.title.clone()))?;
            let rec = Record { title: d.title.clone(), text: d.text.clone(), label, url: d.source_url.clone(), date: d.log_date };
            serde_json::to_writer(&mut w, &rec).map_err(|e| io_err(&path, e))?;
            w.write_all(b"\n").map_err(|e| io_err(&path, e))?;
        }
        w.flush().map_err(|e| io_err(&path, e))?;
    }
    let [train, validation, test] = splits.sizes();
    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        seed: splits.split_seed,
        ratios: splits.ratios,
        counts: Counts { train, validation, test },
        source_date_range: splits.info.source_dates,
        dedup_policy: DEDUP_POLICY.to_string(),
        duplicates_collapsed: splits.info.duplicates_collapsed,
        degenerate_labels: splits.info.degenerate_labels.clone(),
        masked: splits.info.masked,
    };
    let path = dir.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| io_err(&path, e))?;
    fs::write(&path, json + "\n").map_err(|e| io_err(&path, e))
}

fn read_manifest(dir: &Path) -> Result<Manifest, DatasetError> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| DatasetError::CorruptRecord { file: MANIFEST_FILE.into(), line: e.line(), reason: e.to_string() })?;
    let found = value.get("schema_version").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
    if found != SCHEMA_VERSION {
        return Err(DatasetError::SchemaVersionMismatch { found, expected: SCHEMA_VERSION });
    }
    serde_json::from_value(value)
        .map_err(|e| DatasetError::CorruptRecord { file: MANIFEST_FILE.into(), line: 1, reason: e.to_string() })
}

pub fn load(dir: &Path) -> Result<DatasetSplits, DatasetError> {
    let manifest = read_manifest(dir)?;
    let mut parts: Vec<Vec<Discussion>> = Vec::with_capacity(3);
    for name in SPLIT_NAMES {
        let file = format!("{name}.jsonl");
        let path = dir.join(&file);
        let text = fs::read_to_string(&path).map_err(|e| io_err(&path, e))?;
        let mut items = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let rec: Record = serde_json::from_str(line).map_err(|e| DatasetError::CorruptRecord {
                file: file.clone(),
                line: i + 1,
                reason: e.to_string(),
            })?;
            items.push(Discussion {
                title: rec.title,
                text: rec.text,
                label: Some(rec.label),
                closed: true,
                source_url: rec.url,
                log_date: rec.date,
            });
        }
        parts.push(items);
    }
    let test = parts.pop().unwrap();
    let validation = parts.pop().unwrap();
    let train = parts.pop().unwrap();
    let c = &manifest.counts;
    if [train.len(), validation.len(), test.len()] != [c.train, c.validation, c.test] {
        return Err(DatasetError::CorruptRecord {
            file: MANIFEST_FILE.into(),
            line: 1,
            reason: format!(
                "manifest counts {:?} disagree with records {:?}",
                [c.train, c.validation, c.test],
                [train.len(), validation.len(), test.len()]
            ),
        });
    }
    Ok(DatasetSplits {
        train,
        validation,
        test,
        split_seed: manifest.seed,
        ratios: manifest.ratios,
        info: BuildInfo {
            duplicates_collapsed: manifest.duplicates_collapsed,
            degenerate_labels: manifest.degenerate_labels,
            masked: manifest.masked,
            source_dates: manifest.source_date_range,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::build_dataset;
    use crate::dataset::tests::disc;

    fn sample() -> DatasetSplits {
        let items = (0..30)
            .map(|i| disc(&format!("Item {i}"), OutcomeLabel::ALL[i % 3], &format!("**Keep** text \"{i}\"\nline two")))
            .collect();
        build_dataset(items, Ratios::default(), 9).unwrap()
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let s = sample();
        save(&s, dir.path()).unwrap();
        assert_eq!(load(dir.path()).unwrap(), s);
    }

    #[test]
    fn truncated_record() {
        let dir = tempfile::tempdir().unwrap();
        save(&sample(), dir.path()).unwrap();
        let path = dir.path().join("train.jsonl");
        let text = fs::read_to_string(&path).unwrap();
        let mut lines: Vec<&str> = text.lines().collect();
        let cut = &lines[2][..lines[2].len() / 2];
        lines[2] = cut;
        fs::write(&path, lines.join("\n")).unwrap();
        match load(dir.path()) {
            Err(DatasetError::CorruptRecord { file, line, .. }) => assert_eq!((file.as_str(), line), ("train.jsonl", 3)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn future_schema() {
        let dir = tempfile::tempdir().unwrap();
        save(&sample(), dir.path()).unwrap();
        let path = dir.path().join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).unwrap().replace("\"schema_version\": 1", "\"schema_version\": 2");
        fs::write(&path, text).unwrap();
        assert_eq!(load(dir.path()), Err(DatasetError::SchemaVersionMismatch { found: 2, expected: 1 }));
    }
}
