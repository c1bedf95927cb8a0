//! Discussion extraction, label canonicalization, text cleaning, vote masking
//! and sentence segmentation.

mod clean;
mod extract;
mod labels;
mod mask;
mod segment;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use url::Url;

pub use clean::{clean_html, clean_text, strip_bold_markers};
pub use extract::{extract_discussions, RawDiscussion};
pub use labels::{canonicalize_label, normalize_label_text, LabelError, OutcomeLabel, VariantTable, DEFAULT_VARIANT_TABLE};
pub use mask::{mask_votes, MaskMode, VoteMasker};
pub use segment::{segment_sentences, Sentence};

use crate::collector::RawPage;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse {url}: {reason}")]
pub struct ParseError {
    pub url: String,
    pub reason: String,
}

/// A cleaned discussion. `label` is only ever set on closed discussions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discussion {
    pub title: String,
    pub text: String,
    pub label: Option<OutcomeLabel>,
    pub closed: bool,
    pub source_url: Url,
    pub log_date: Option<NaiveDate>,
}

/// Outcome named by a closing banner such as "The result was **delete**.".
///
/// The first bold span after the result phrase wins; without bold text the
/// words up to the first punctuation mark are tried.
pub fn banner_label(banner: &str, table: &VariantTable) -> Result<OutcomeLabel, LabelError> {
    let lower = banner.to_lowercase();
    let Some(pos) = lower.find("the result was") else {
        return Err(LabelError::UnknownLabel(banner.to_string()));
    };
    let rest = &banner[pos + "the result was".len()..];
    let rest = rest.trim_start();
    if let Some(bold) = rest.strip_prefix("**").and_then(|r| r.split_once("**")).map(|(b, _)| b) {
        return table.canonicalize(bold);
    }
    let phrase = rest.split(['.', ',', ';', '(', '\n']).next().unwrap_or("").trim();
    table.canonicalize(phrase).or_else(|_| {
        // "redirect to Foo", "merge into Bar"
        let head = phrase.split(" to ").next().unwrap_or(phrase).split(" into ").next().unwrap_or(phrase);
        table.canonicalize(head)
    })
}

/// Cleans one raw discussion and resolves its closure state and label.
pub fn to_discussion(raw: &RawDiscussion, table: &VariantTable) -> Discussion {
    let banner = raw.closing_banner.as_deref();
    let (closed, label) = match banner {
        Some(b) => match banner_label(b, table) {
            Ok(label) => (true, Some(label)),
            Err(e) => {
                log::warn!("{:?}: closed with unrecognized outcome ({e}); kept unlabeled", raw.title);
                (true, None)
            }
        },
        None => (false, None),
    };
    let mut source_url = raw.source_url.clone();
    if let Some(anchor) = &raw.anchor {
        source_url.set_fragment(Some(anchor));
    }
    Discussion { title: raw.title.clone(), text: clean_text(raw), label, closed, source_url, log_date: raw.log_date }
}

/// Extracts and cleans every discussion on a page.
pub fn parse_page(page: &RawPage, table: &VariantTable) -> Result<Vec<Discussion>, ParseError> {
    Ok(extract_discussions(page)?.iter().map(|r| to_discussion(r, table)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn banner_labels() {
        let t = VariantTable::default();
        assert_eq!(banner_label("The result was **delete**. Closer (talk)", &t), Ok(OutcomeLabel::Delete));
        assert_eq!(banner_label("The result was **Speedy Keep**", &t), Ok(OutcomeLabel::SpeedyKeep));
        assert_eq!(banner_label("The result was redirect to Foo. Closer", &t), Ok(OutcomeLabel::Redirect));
        assert_eq!(banner_label("The result was no consensus.", &t), Ok(OutcomeLabel::NoConsensus));
        assert!(banner_label("The result was **transwiki**.", &t).is_err());
        assert!(banner_label("Nothing here", &t).is_err());
    }
}
