use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::labels::{normalize_label_text, VariantTable};

static BOLD_SPAN: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\*\*([^\n]+?)\*\*").unwrap());

/// What happens to a bold vote keyword.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MaskMode {
    #[default]
    Delete,
    Replace(String),
}

/// Removes bold vote keywords (`**Delete**`, `**Strong keep**`, ...) from
/// cleaned discussion text.
#[derive(Debug, Clone)]
pub struct VoteMasker {
    table: VariantTable,
    phrases: Vec<Vec<String>>,
    mode: MaskMode,
}

fn words(text: &str) -> Vec<String> {
    normalize_label_text(text).split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty()).map(String::from).collect()
}

impl VoteMasker {
    pub fn new(table: VariantTable, mode: MaskMode) -> Self {
        if let MaskMode::Replace(token) = &mode {
            assert!(
                table.lookup(token).is_none() && !token.contains("**"),
                "replacement token must not itself be a vote keyword"
            );
        }
        let phrases = table.entries().iter().map(|(v, _)| words(v)).filter(|w| !w.is_empty()).collect();
        VoteMasker { table, phrases, mode }
    }

    /// True when bold `content` is a variant or contains one as a run of
    /// whole words (`Weak soft delete`, `Keep and improve`).
    pub fn is_vote(&self, content: &str) -> bool {
        if self.table.lookup(content).is_some() {
            return true;
        }
        let w = words(content);
        self.phrases.iter().any(|p| w.windows(p.len()).any(|win| win == p.as_slice()))
    }

    /// Byte ranges of bold spans that carry an outcome variant.
    pub fn vote_spans(&self, text: &str) -> Vec<std::ops::Range<usize>> {
        BOLD_SPAN
            .captures_iter(text)
            .filter(|c| self.is_vote(&c[1]))
            .map(|c| c.get(0).unwrap().range())
            .collect()
    }

    fn mask_once(&self, text: &str) -> Option<String> {
        let spans = self.vote_spans(text);
        if spans.is_empty() {
            return None;
        }
        let mut out = String::with_capacity(text.len());
        let mut cursor = 0;
        for span in spans {
            out.push_str(&text[cursor..span.start]);
            let at_line_start = out.rsplit('\n').next().is_none_or(|l| l.trim().is_empty());
            let mut end = span.end;
            match &self.mode {
                MaskMode::Delete => {
                    if at_line_start {
                        // "**Keep**: notable" masks to "notable"
                        let rest = &text[end..];
                        let skipped = rest.len() - rest.trim_start_matches(['.', ',', ';', ':', '!', '-', '–']).len();
                        end += skipped;
                    }
                    out.push(' ');
                }
                MaskMode::Replace(token) => {
                    out.push_str(token);
                }
            }
            cursor = end;
        }
        out.push_str(&text[cursor..]);
        Some(
            out.lines()
                .map(|l| l.split_whitespace().collect::<Vec<_>>().join(" "))
                .filter(|l| !l.is_empty())
                .collect::<Vec<_>>()
                .join("\n"),
        )
    }

    /// Masks until no vote span remains; the result is a fixed point, so
    /// masking is idempotent. Text without vote spans is returned unchanged.
    pub fn mask(&self, text: &str) -> String {
        let mut current = text.to_string();
        while let Some(next) = self.mask_once(&current) {
            current = next;
        }
        current
    }
}

impl Default for VoteMasker {
    fn default() -> Self {
        VoteMasker::new(VariantTable::default(), MaskMode::Delete)
    }
}

/// Masks with the shipped variant table, deleting vote keywords.
pub fn mask_votes(text: &str) -> String {
    static MASKER: LazyLock<VoteMasker> = LazyLock::new(VoteMasker::default);
    MASKER.mask(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn removes_single_vote() {
        assert_eq!(mask_votes("**Delete** Just a junk article"), "Just a junk article");
    }

    #[test]
    fn removes_multiword_variant() {
        assert_eq!(mask_votes("**Strong keep** notable per sources"), "notable per sources");
        assert_eq!(mask_votes("**Speedy delete** G11"), "G11");
        assert_eq!(mask_votes("**Keep**: notable"), "notable");
    }

    #[test]
    fn removes_qualified_votes() {
        assert_eq!(mask_votes("**Weak soft delete** thin sourcing"), "thin sourcing");
        assert_eq!(mask_votes("**Strong MERGE AND REDIRECT** to the list"), "to the list");
        assert_eq!(mask_votes("**Keep and improve** it"), "it");
    }

    #[test]
    fn leaves_non_votes() {
        assert_eq!(mask_votes("**Comment** I am **not** sure"), "**Comment** I am **not** sure");
        assert_eq!(mask_votes("plain  text"), "plain  text");
    }

    #[test]
    fn mid_line_vote_keeps_punctuation() {
        assert_eq!(mask_votes("I say **delete**. Junk."), "I say . Junk.");
    }

    #[test]
    fn replace_mode() {
        let m = VoteMasker::new(VariantTable::default(), MaskMode::Replace("[VOTE]".into()));
        assert_eq!(m.mask("**Delete** junk\n**Keep** fine"), "[VOTE] junk\n[VOTE] fine");
    }

    fn fragment() -> impl Strategy<Value = String> {
        prop_oneof![
            Just("**Delete**".to_string()),
            Just("**keep**".to_string()),
            Just("**Strong keep**".to_string()),
            Just("**Comment**".to_string()),
            Just("**".to_string()),
            Just("*".to_string()),
            Just("\n".to_string()),
            Just(".".to_string()),
            "[a-z]{1,8}",
            Just("speedy".to_string()),
            Just("delete".to_string()),
        ]
    }

    proptest! {
        #[test]
        fn idempotent(parts in prop::collection::vec(fragment(), 0..30), seps in prop::collection::vec(prop_oneof![Just(""), Just(" ")], 30)) {
            let text: String = parts.iter().zip(seps.iter()).map(|(p, s)| format!("{p}{s}")).collect();
            let once = mask_votes(&text);
            prop_assert_eq!(mask_votes(&once), once.clone());
            prop_assert!(VoteMasker::default().vote_spans(&once).is_empty());
        }
    }
}
