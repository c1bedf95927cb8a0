//! Training and evaluation examples derived from discussions: whole
//! discussions for outcome, single comments for stance and policy.

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::classify::{AnalysisTask, LabelSpace};
use crate::parser::{strip_bold_markers, Discussion, MaskMode, OutcomeLabel, VariantTable, VoteMasker};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Example {
    pub title: Option<String>,
    pub text: String,
    pub gold: String,
}

static LEADING_BOLD: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\s*\*\*([^\n*]+?)\*\*[\s:,.;-]*").unwrap());
static POLICY: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"\b(?:WP|Wikipedia):[A-Za-z0-9][A-Za-z0-9_&-]*").unwrap());

/// Labeled discussions as outcome examples.
pub fn outcome_examples(discussions: &[Discussion]) -> Vec<Example> {
    discussions
        .iter()
        .filter_map(|d| {
            let label = d.label?;
            Some(Example { title: Some(d.title.clone()), text: d.text.clone(), gold: label.as_str().to_string() })
        })
        .collect()
}

/// Stance named by a bold vote: keep/delete/merge/comment, or `None` for
/// votes outside the stance set.
pub fn stance_of_vote(vote: &str, table: &VariantTable) -> Option<&'static str> {
    let v = vote.trim().to_lowercase();
    if v.starts_with("comment") || v.starts_with("question") || v == "note" {
        return Some("comment");
    }
    match table.lookup(&v)? {
        OutcomeLabel::Keep | OutcomeLabel::SpeedyKeep => Some("keep"),
        OutcomeLabel::Delete | OutcomeLabel::SpeedyDelete => Some("delete"),
        OutcomeLabel::Merge | OutcomeLabel::Redirect => Some("merge"),
        OutcomeLabel::NoConsensus | OutcomeLabel::Withdrawn => None,
    }
}

/// One example per comment line that opens with a bold vote. The vote and
/// any other bold vote keyword are removed from the text.
pub fn stance_examples(discussions: &[Discussion], table: &VariantTable) -> Vec<Example> {
    let masker = VoteMasker::new(table.clone(), MaskMode::Delete);
    let mut out = Vec::new();
    for d in discussions {
        for line in d.text.lines() {
            let Some(c) = LEADING_BOLD.captures(line) else { continue };
            let Some(stance) = stance_of_vote(&c[1], table) else { continue };
            let rest = &line[c.get(0).unwrap().end()..];
            let text = strip_bold_markers(&masker.mask(rest));
            if !text.trim().is_empty() {
                out.push(Example { title: Some(d.title.clone()), text, gold: stance.to_string() });
            }
        }
    }
    out
}

/// Policy shortcuts (`WP:GNG`, `Wikipedia:Notability`) cited in a text, in
/// order of appearance.
pub fn policy_mentions(text: &str) -> Vec<String> {
    POLICY
        .find_iter(text)
        .map(|m| m.as_str().trim_end_matches(['_', '-']).to_string())
        .filter(|m| !m.split_once(':').is_some_and(|(_, rest)| rest.starts_with("Articles")))
        .collect()
}

/// The most cited policies over all comment lines, or the fallback list when
/// nothing is cited.
pub fn policy_space(discussions: &[Discussion], k: usize) -> LabelSpace {
    let mentions: Vec<String> = discussions.iter().flat_map(|d| policy_mentions(&d.text)).collect();
    if mentions.is_empty() {
        return LabelSpace::default_for(AnalysisTask::Policy);
    }
    LabelSpace::policy_from_counts(mentions.iter().map(String::as_str), k.max(1))
        .unwrap_or_else(|_| LabelSpace::default_for(AnalysisTask::Policy))
}

/// One example per comment line citing a policy of `space`; the label is the
/// first such citation and every citation is removed from the text.
pub fn policy_examples(discussions: &[Discussion], space: &LabelSpace) -> Vec<Example> {
    let mut out = Vec::new();
    for d in discussions {
        for line in d.text.lines() {
            let Some(label) = policy_mentions(line).into_iter().find(|m| space.index_of(m).is_some()) else {
                continue;
            };
            let text = strip_bold_markers(&POLICY.replace_all(line, ""));
            let text = text.split_whitespace().collect::<Vec<_>>().join(" ");
            if text.chars().any(char::is_alphanumeric) {
                out.push(Example { title: Some(d.title.clone()), text, gold: label });
            }
        }
    }
    out
}
