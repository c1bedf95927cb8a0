//! The closed outcome taxonomy and the variant table that maps the many ways
//! closers and voters spell an outcome onto it.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Variant table shipped with the crate.
pub const DEFAULT_VARIANT_TABLE: &str = include_str!("../../data/labels.tsv");

/// Administrator decision closing an AfD discussion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OutcomeLabel {
    Delete,
    Keep,
    Redirect,
    NoConsensus,
    Merge,
    SpeedyKeep,
    SpeedyDelete,
    Withdrawn,
}

impl OutcomeLabel {
    /// All members, ordered by their frequency in the 2023-2024 AfD snapshot.
    pub const ALL: [OutcomeLabel; 8] = [
        OutcomeLabel::Delete,
        OutcomeLabel::Keep,
        OutcomeLabel::Redirect,
        OutcomeLabel::NoConsensus,
        OutcomeLabel::Merge,
        OutcomeLabel::SpeedyKeep,
        OutcomeLabel::SpeedyDelete,
        OutcomeLabel::Withdrawn,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeLabel::Delete => "delete",
            OutcomeLabel::Keep => "keep",
            OutcomeLabel::Redirect => "redirect",
            OutcomeLabel::NoConsensus => "no consensus",
            OutcomeLabel::Merge => "merge",
            OutcomeLabel::SpeedyKeep => "speedy keep",
            OutcomeLabel::SpeedyDelete => "speedy delete",
            OutcomeLabel::Withdrawn => "withdrawn",
        }
    }

    pub fn index(self) -> usize {
        OutcomeLabel::ALL.iter().position(|l| *l == self).unwrap()
    }

    pub fn names() -> Vec<String> {
        OutcomeLabel::ALL.iter().map(|l| l.as_str().to_string()).collect()
    }
}

impl fmt::Display for OutcomeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Strict parse of a canonical name. Use [`VariantTable::canonicalize`] for
/// free-form input.
impl FromStr for OutcomeLabel {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OutcomeLabel::ALL
            .iter()
            .copied()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| LabelError::UnknownLabel(s.to_string()))
    }
}

impl Serialize for OutcomeLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for OutcomeLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LabelError {
    #[error("unknown outcome label {0:?}")]
    UnknownLabel(String),
    #[error("variant table line {line}: {reason}")]
    BadTableLine { line: usize, reason: String },
    #[error("cannot read variant table: {0}")]
    Io(String),
}

/// Normalizes a label-ish string: lowercase, `-`/`_` to space, whitespace
/// collapsed, surrounding punctuation trimmed.
pub fn normalize_label_text(raw: &str) -> String {
    let lowered = raw.to_lowercase().replace(['-', '_'], " ");
    let collapsed = lowered.split_whitespace().collect::<Vec<_>>().join(" ");
    collapsed
        .trim_matches(|c: char| c.is_ascii_punctuation() || c.is_whitespace() || c == '“' || c == '”')
        .to_string()
}

/// Mapping from normalized variant spellings to canonical labels.
#[derive(Debug, Clone)]
pub struct VariantTable {
    map: HashMap<String, OutcomeLabel>,
    // insertion order, for rendering and exhaustive checks
    entries: Vec<(String, OutcomeLabel)>,
}

impl VariantTable {
    /// Parses `variant<TAB>canonical` lines. Blank lines and `#` comments
    /// are skipped. Canonical names always map to themselves.
    pub fn parse(text: &str) -> Result<Self, LabelError> {
        let mut table = VariantTable { map: HashMap::new(), entries: Vec::new() };
        for label in OutcomeLabel::ALL {
            table.insert(label.as_str(), label);
        }
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let trimmed = line.trim_end_matches('\r');
            if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
                continue;
            }
            let (variant, canonical) = trimmed.split_once('\t').ok_or_else(|| LabelError::BadTableLine {
                line: line_no,
                reason: "expected variant<TAB>canonical".into(),
            })?;
            let canonical: OutcomeLabel = canonical.trim().parse().map_err(|_| LabelError::BadTableLine {
                line: line_no,
                reason: format!("{:?} is not a canonical label", canonical.trim()),
            })?;
            let key = normalize_label_text(variant);
            if key.is_empty() {
                return Err(LabelError::BadTableLine { line: line_no, reason: "empty variant".into() });
            }
            if let Some(prev) = table.map.get(&key) {
                if *prev != canonical {
                    return Err(LabelError::BadTableLine {
                        line: line_no,
                        reason: format!("{key:?} already maps to {prev}"),
                    });
                }
                continue;
            }
            table.insert(&key, canonical);
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self, LabelError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabelError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn insert(&mut self, key: &str, label: OutcomeLabel) {
        self.map.insert(key.to_string(), label);
        self.entries.push((key.to_string(), label));
    }

    pub fn canonicalize(&self, raw: &str) -> Result<OutcomeLabel, LabelError> {
        self.lookup(raw).ok_or_else(|| LabelError::UnknownLabel(raw.to_string()))
    }

    pub fn lookup(&self, raw: &str) -> Option<OutcomeLabel> {
        self.map.get(&normalize_label_text(raw)).copied()
    }

    /// Normalized variants with their canonical label, in table order.
    pub fn entries(&self) -> &[(String, OutcomeLabel)] {
        &self.entries
    }
}

impl Default for VariantTable {
    fn default() -> Self {
        VariantTable::parse(DEFAULT_VARIANT_TABLE).expect("shipped variant table is valid")
    }
}

/// Canonicalizes with the shipped variant table.
pub fn canonicalize_label(raw: &str) -> Result<OutcomeLabel, LabelError> {
    static TABLE: std::sync::LazyLock<VariantTable> = std::sync::LazyLock::new(VariantTable::default);
    TABLE.canonicalize(raw)
}
