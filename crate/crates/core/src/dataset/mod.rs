//! Labeled datasets: deduplication, stratified title-disjoint splits,
//! statistics and on-disk storage.

mod stats;
mod store;

use std::collections::BTreeMap;

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::parser::{Discussion, MaskMode, OutcomeLabel, VariantTable, VoteMasker};

pub use stats::{compute_stats, LabelStats, LengthSummary, SplitStats};
pub use store::{load, save, Manifest, SCHEMA_VERSION};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatasetError {
    #[error("no labeled discussions to build a dataset from")]
    EmptyInput,
    #[error("invalid split ratios: {0}")]
    InvalidRatios(String),
    #[error("discussion {0:?} is open or unlabeled; filter with labeled_only first")]
    Unlabeled(String),
    #[error("dataset schema version {found} is not supported (expected {expected})")]
    SchemaVersionMismatch { found: u32, expected: u32 },
    #[error("corrupt record in {file} at line {line}: {reason}")]
    CorruptRecord { file: String, line: usize, reason: String },
    #[error("dataset I/O error: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratios {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl Default for Ratios {
    fn default() -> Self {
        Ratios { train: 0.70, validation: 0.10, test: 0.20 }
    }
}

impl Ratios {
    pub fn new(train: f64, validation: f64, test: f64) -> Result<Self, DatasetError> {
        let r = Ratios { train, validation, test };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let parts = self.as_array();
        if parts.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(DatasetError::InvalidRatios(format!("{parts:?} has a negative or non-finite part")));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(DatasetError::InvalidRatios(format!("{parts:?} sums to {sum}, not 1")));
        }
        Ok(())
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.train, self.validation, self.test]
    }
}

pub const SPLIT_NAMES: [&str; 3] = ["train", "validation", "test"];

/// Bookkeeping recorded alongside the splits.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BuildInfo {
    /// Discussions dropped because a later one had the same title.
    pub duplicates_collapsed: usize,
    /// Labels too small to stratify; all their items went to train.
    pub degenerate_labels: Vec<OutcomeLabel>,
    pub masked: bool,
    pub source_dates: Option<(NaiveDate, NaiveDate)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSplits {
    pub train: Vec<Discussion>,
    pub validation: Vec<Discussion>,
    pub test: Vec<Discussion>,
    pub split_seed: u64,
    pub ratios: Ratios,
    pub info: BuildInfo,
}

impl DatasetSplits {
    pub fn splits(&self) -> [&[Discussion]; 3] {
        [&self.train, &self.validation, &self.test]
    }

    pub fn len(&self) -> usize {
        self.train.len() + self.validation.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn sizes(&self) -> [usize; 3] {
        [self.train.len(), self.validation.len(), self.test.len()]
    }

    /// Same splits with bold votes removed from every text.
    pub fn masked(&self, table: &VariantTable, mode: MaskMode) -> DatasetSplits {
        let masker = VoteMasker::new(table.clone(), mode);
        let mask = |v: &[Discussion]| {
            v.iter().map(|d| Discussion { text: masker.mask(&d.text), ..d.clone() }).collect::<Vec<_>>()
        };
        let mut info = self.info.clone();
        info.masked = true;
        DatasetSplits {
            train: mask(&self.train),
            validation: mask(&self.validation),
            test: mask(&self.test),
            split_seed: self.split_seed,
            ratios: self.ratios,
            info,
        }
    }
}

/// Keeps closed, labeled discussions.
pub fn labeled_only(discussions: impl IntoIterator<Item = Discussion>) -> Vec<Discussion> {
    discussions.into_iter().filter(|d| d.closed && d.label.is_some()).collect()
}

fn dedup_key(d: &Discussion) -> (Option<NaiveDate>, &str, &str) {
    (d.log_date, d.source_url.as_str(), d.text.as_str())
}

/// Collapses duplicate titles, keeping the latest nomination. The result is
/// sorted by title and independent of input order.
pub fn dedupe(discussions: Vec<Discussion>) -> (Vec<Discussion>, usize) {
    let total = discussions.len();
    let mut by_title: BTreeMap<String, Discussion> = BTreeMap::new();
    for d in discussions {
        match by_title.get(&d.title) {
            Some(kept) if dedup_key(kept) >= dedup_key(&d) => {}
            _ => {
                by_title.insert(d.title.clone(), d);
            }
        }
    }
    let kept: Vec<_> = by_title.into_values().collect();
    let dropped = total - kept.len();
    (kept, dropped)
}

/// Splits `total` items at `ratios` by largest remainder; ties go to the
/// earlier split.
pub fn apportion(total: usize, ratios: &[f64; 3]) -> [usize; 3] {
    let exact: Vec<f64> = ratios.iter().map(|r| r * total as f64).collect();
    let mut counts = [0usize; 3];
    for (c, e) in counts.iter_mut().zip(&exact) {
        *c = e.floor() as usize;
    }
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
    let mut left = total - counts.iter().sum::<usize>();
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        if ratios[i] > 0.0 {
            counts[i] += 1;
            left -= 1;
        }
    }
    counts
}

/// Per-label, per-split item counts whose rows sum to the label sizes and
/// whose columns sum to the global largest-remainder split sizes.
pub fn allocate(label_counts: &[usize], ratios: &[f64; 3]) -> Vec<[usize; 3]> {
    let total: usize = label_counts.iter().sum();
    let columns = apportion(total, ratios);
    let mut cells: Vec<[usize; 3]> = Vec::with_capacity(label_counts.len());
    let mut fractions = Vec::new();
    for (l, &n) in label_counts.iter().enumerate() {
        let mut row = [0usize; 3];
        for s in 0..3 {
            let exact = ratios[s] * n as f64;
            row[s] = exact.floor() as usize;
            fractions.push((exact - exact.floor(), l, s));
        }
        cells.push(row);
    }
    let mut row_left: Vec<usize> = label_counts.iter().zip(&cells).map(|(n, r)| n - r.iter().sum::<usize>()).collect();
    let mut col_left: Vec<usize> =
        (0..3).map(|s| columns[s].saturating_sub(cells.iter().map(|r| r[s]).sum::<usize>())).collect();
    fractions.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    for &(frac, l, s) in &fractions {
        if frac > 0.0 && row_left[l] > 0 && col_left[s] > 0 {
            cells[l][s] += 1;
            row_left[l] -= 1;
            col_left[s] -= 1;
        }
    }
    for l in 0..label_counts.len() {
        while row_left[l] > 0 {
            let s = (0..3)
                .filter(|&s| ratios[s] > 0.0)
                .max_by_key(|&s| (col_left[s], std::cmp::Reverse(s)))
                .expect("some split has a positive ratio");
            cells[l][s] += 1;
            row_left[l] -= 1;
            col_left[s] = col_left[s].saturating_sub(1);
        }
    }
    cells
}

/// Builds stratified, title-disjoint splits. Deterministic in `(input set, seed)`.
pub fn build_dataset(discussions: Vec<Discussion>, ratios: Ratios, seed: u64) -> Result<DatasetSplits, DatasetError> {
    ratios.validate()?;
    if let Some(d) = discussions.iter().find(|d| !d.closed || d.label.is_none()) {
        return Err(DatasetError::Unlabeled(d.title.clone()));
    }
    let (unique, duplicates_collapsed) = dedupe(discussions);
    if unique.is_empty() {
        return Err(DatasetError::EmptyInput);
    }
    if duplicates_collapsed > 0 {
        log::info!("collapsed {duplicates_collapsed} duplicate titles");
    }
    let r = ratios.as_array();
    let nonzero_splits = r.iter().filter(|x| **x > 0.0).count();

    let mut strata: Vec<Vec<Discussion>> = vec![Vec::new(); OutcomeLabel::ALL.len()];
    for d in unique {
        strata[d.label.unwrap().index()].push(d);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut degenerate_labels = Vec::new();
    let mut stratified = Vec::new();
    for (i, stratum) in strata.iter_mut().enumerate() {
        stratum.shuffle(&mut rng);
        if !stratum.is_empty() && stratum.len() < nonzero_splits {
            let label = OutcomeLabel::ALL[i];
            log::warn!("label {label} has only {} items; all placed in train", stratum.len());
            degenerate_labels.push(label);
        } else {
            stratified.push(i);
        }
    }
    let counts: Vec<usize> = stratified.iter().map(|&i| strata[i].len()).collect();
    let cells = allocate(&counts, &r);

    let (mut train, mut validation, mut test) = (Vec::new(), Vec::new(), Vec::new());
    for (&i, row) in stratified.iter().zip(&cells) {
        let mut items = std::mem::take(&mut strata[i]).into_iter();
        train.extend(items.by_ref().take(row[0]));
        validation.extend(items.by_ref().take(row[1]));
        test.extend(items.by_ref().take(row[2]));
    }
    for label in &degenerate_labels {
        train.append(&mut strata[label.index()]);
    }
    let dates = train.iter().chain(&validation).chain(&test).filter_map(|d| d.log_date);
    let source_dates = dates.clone().min().zip(dates.max());
    Ok(DatasetSplits {
        train,
        validation,
        test,
        split_seed: seed,
        ratios,
        info: BuildInfo { duplicates_collapsed, degenerate_labels, masked: false, source_dates },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use url::Url;

    pub(crate) fn disc(title: &str, label: OutcomeLabel, text: &str) -> Discussion {
        Discussion {
            title: title.into(),
            text: text.into(),
            label: Some(label),
            closed: true,
            source_url: Url::parse(&format!("https://example.org/afd#{}", title.replace(' ', "_"))).unwrap(),
            log_date: NaiveDate::from_ymd_opt(2023, 3, 1),
        }
    }

    #[test]
    fn exact_division() {
        let items: Vec<_> = (0..10).map(|i| disc(&format!("T{i}"), OutcomeLabel::Keep, "x")).collect();
        let s = build_dataset(items, Ratios::new(0.8, 0.1, 0.1).unwrap(), 1).unwrap();
        assert_eq!(s.sizes(), [8, 1, 1]);
    }

    #[test]
    fn allocation_rows_and_columns() {
        let cells = allocate(&[10047, 3025, 2355, 1194, 1052, 438, 241, 176], &[0.7, 0.1, 0.2]);
        let cols: Vec<usize> = (0..3).map(|s| cells.iter().map(|r| r[s]).sum()).collect();
        assert_eq!(cols, apportion(18528, &[0.7, 0.1, 0.2]));
        for (row, n) in cells.iter().zip([10047, 3025, 2355, 1194, 1052, 438, 241, 176]) {
            assert_eq!(row.iter().sum::<usize>(), n);
        }
    }

    #[test]
    fn dedupe_keeps_latest() {
        let mut old = disc("A", OutcomeLabel::Keep, "old");
        old.log_date = NaiveDate::from_ymd_opt(2023, 1, 1);
        let new = disc("A", OutcomeLabel::Delete, "new");
        let (kept, dropped) = dedupe(vec![new.clone(), old.clone()]);
        assert_eq!((kept, dropped), (vec![new.clone()], 1));
        assert_eq!(dedupe(vec![old, new.clone()]).0, vec![new]);
    }

    #[test]
    fn degenerate_label_goes_to_train() {
        let mut items: Vec<_> = (0..20).map(|i| disc(&format!("K{i}"), OutcomeLabel::Keep, "x")).collect();
        items.push(disc("W", OutcomeLabel::Withdrawn, "x"));
        let s = build_dataset(items, Ratios::default(), 3).unwrap();
        assert_eq!(s.info.degenerate_labels, vec![OutcomeLabel::Withdrawn]);
        assert!(s.train.iter().any(|d| d.title == "W"));
    }

    #[test]
    fn errors() {
        assert_eq!(build_dataset(vec![], Ratios::default(), 0), Err(DatasetError::EmptyInput));
        assert!(matches!(Ratios::new(0.5, 0.5, 0.5), Err(DatasetError::InvalidRatios(_))));
        let mut open = disc("O", OutcomeLabel::Keep, "x");
        open.label = None;
        open.closed = false;
        assert!(matches!(build_dataset(vec![open], Ratios::default(), 0), Err(DatasetError::Unlabeled(_))));
    }
}
