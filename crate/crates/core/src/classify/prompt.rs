//! Outcome prompt rendering and response parsing for chat LLMs.

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::ClassifyError;
use crate::parser::{canonicalize_label, OutcomeLabel};

pub const OUTCOME_PROMPT_TEMPLATE: &str = include_str!("../../data/outcome_prompt.txt");

const ARTICLE: &str = "TOREPLACE_ARTICLE";
const DISCUSSION: &str = "TOREPLACE_DISCUSSION";
const FINAL_INSTRUCTION: &str = "Now, you must read the following Input";

/// A worked example for few-shot prompting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shot {
    pub title: String,
    pub discussion: String,
    pub label: String,
    pub explanation: String,
}

/// Titles are single-line in the prompt; escaping keeps rendering injective.
fn escape_title(title: &str) -> String {
    title.replace('\\', "\\\\").replace('\n', "\\n").replace('\r', "\\r")
}

fn render_shot(shot: &Shot) -> String {
    format!(
        "INPUT:\n{{\n    Title: {},\n    Discussion: {}\n}}\nOUTPUT:\n{{\n    Label: {},\n    Explanation: {}\n}}\n",
        escape_title(&shot.title),
        shot.discussion,
        shot.label,
        shot.explanation
    )
}

/// Fills the outcome template in one pass, so placeholder-like text inside
/// the title or discussion is never substituted again. Shots go before the
/// final instruction and INPUT block.
pub fn render_llm_prompt(title: &str, discussion: &str, shots: &[Shot]) -> String {
    let (head, tail) = if shots.is_empty() {
        (OUTCOME_PROMPT_TEMPLATE, "")
    } else {
        let at = OUTCOME_PROMPT_TEMPLATE.find(FINAL_INSTRUCTION).expect("template has a final instruction");
        (&OUTCOME_PROMPT_TEMPLATE[..at], &OUTCOME_PROMPT_TEMPLATE[at..])
    };
    let mut out = String::with_capacity(OUTCOME_PROMPT_TEMPLATE.len() + title.len() + discussion.len() + 512);
    let fill = |segment: &str, out: &mut String| {
        let mut rest = segment;
        while let Some(pos) = rest.find("TOREPLACE_") {
            out.push_str(&rest[..pos]);
            let after = &rest[pos..];
            if let Some(r) = after.strip_prefix(ARTICLE) {
                out.push_str(&escape_title(title));
                rest = r;
            } else if let Some(r) = after.strip_prefix(DISCUSSION) {
                out.push_str(discussion);
                rest = r;
            } else {
                out.push_str("TOREPLACE_");
                rest = &after["TOREPLACE_".len()..];
            }
        }
        out.push_str(rest);
    };
    fill(head, &mut out);
    for shot in shots {
        out.push_str(&render_shot(shot));
    }
    fill(tail, &mut out);
    out
}

/// Asks for a justification of a label that was already decided.
pub fn render_explanation_prompt(title: Option<&str>, discussion: &str, label: &str) -> String {
    format!(
        "You are a helpful knowledge management expert reviewing a Wikipedia deletion discussion.\n\n\
         The discussion below was resolved with the label \"{label}\". Write a three-sentence explanation of why \
         this label fits, citing specific points made in the discussion. Do not propose a different label.\n\n\
         Reply with a JSON dictionary of the form {{\"Label\": \"{label}\", \"Explanation\": \"...\"}}.\n\n\
         INPUT:\n{{\n    Title: {},\n    Discussion: {}\n}}\nOUTPUT:\n",
        escape_title(title.unwrap_or("")),
        discussion
    )
}

fn get_ci<'a>(obj: &'a serde_json::Map<String, Value>, key: &str) -> Option<&'a Value> {
    obj.iter().find(|(k, _)| k.trim().eq_ignore_ascii_case(key)).map(|(_, v)| v)
}

/// JSON objects found anywhere in `raw`, outermost first, in text order.
fn json_objects(raw: &str) -> Vec<serde_json::Map<String, Value>> {
    let mut out = Vec::new();
    let mut i = 0;
    while let Some(off) = raw[i..].find('{') {
        let start = i + off;
        let mut stream = serde_json::Deserializer::from_str(&raw[start..]).into_iter::<Value>();
        match stream.next() {
            Some(Ok(Value::Object(map))) => {
                let has_label = get_ci(&map, "label").is_some();
                let end = start + stream.byte_offset();
                out.push(map);
                i = if has_label { end } else { start + 1 };
            }
            _ => i = start + 1,
        }
    }
    out
}

static LOOSE_LABEL: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"(?i)\blabel\b["']?\s*:\s*["']?([^"',\n}]+?)["']?\s*(?:,|\n|\}|$)"#).unwrap());
static LOOSE_EXPLANATION: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r#"(?is)\bexplanation\b["']?\s*:\s*["']?(.*?)["']?\s*(?:\}|$)"#).unwrap());

fn finish(label: &str, explanation: &str) -> Result<(OutcomeLabel, String), ClassifyError> {
    let label = canonicalize_label(label.trim()).map_err(|_| ClassifyError::UnknownLabel(label.trim().to_string()))?;
    Ok((label, explanation.trim().to_string()))
}

/// Reads the label and explanation from a model reply. Surrounding prose and
/// code fences are tolerated; the label is canonicalized.
pub fn parse_llm_response(raw: &str) -> Result<(OutcomeLabel, String), ClassifyError> {
    if raw.trim().is_empty() {
        return Err(ClassifyError::UnparseableResponse("empty response".into()));
    }
    let mut label_only = None;
    for obj in json_objects(raw) {
        match (get_ci(&obj, "label"), get_ci(&obj, "explanation")) {
            (Some(Value::String(l)), Some(Value::String(e))) => return finish(l, e),
            (Some(Value::String(l)), None) if label_only.is_none() => label_only = Some(l.clone()),
            _ => {}
        }
    }
    if let Some(l) = label_only {
        return finish(&l, "");
    }
    if let Some(c) = LOOSE_LABEL.captures(raw) {
        let explanation = LOOSE_EXPLANATION.captures(raw).map(|e| e[1].to_string()).unwrap_or_default();
        return finish(&c[1], &explanation);
    }
    Err(ClassifyError::UnparseableResponse(raw.chars().take(80).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_shot_fills_placeholders() {
        let p = render_llm_prompt("T", "D", &[]);
        assert!(p.contains("Title: T,") && p.contains("Discussion: D\n"));
        assert!(!p.contains("TOREPLACE_"));
        assert!(p.starts_with("You are a helpful knowledge management expert"));
    }

    #[test]
    fn placeholders_in_input_are_not_expanded() {
        let p = render_llm_prompt("TOREPLACE_DISCUSSION", "x", &[]);
        assert!(p.contains("Title: TOREPLACE_DISCUSSION,"));
    }

    #[test]
    fn shots_precede_final_input() {
        let shot = Shot { title: "A".into(), discussion: "B".into(), label: "keep".into(), explanation: "E.".into() };
        let p = render_llm_prompt("T", "D", &[shot.clone(), shot]);
        let last_input = p.rfind("INPUT:").unwrap();
        let zero = render_llm_prompt("T", "D", &[]);
        let zero_outputs = zero[..zero.rfind("INPUT:").unwrap()].matches("OUTPUT:").count();
        assert_eq!(p[..last_input].matches("OUTPUT:").count(), zero_outputs + 2);
    }

    #[test]
    fn parses_plain_fenced_and_loose() {
        let (l, e) = parse_llm_response(r#"{"Label": "speedy delete", "Explanation": "The article does not establish notability."}"#).unwrap();
        assert_eq!(l, OutcomeLabel::SpeedyDelete);
        assert!(e.starts_with("The article"));
        let fenced = "Sure!\n```json\n{\"Label\": \"Withdraw\", \"Explanation\": \"x\"}\n```";
        assert_eq!(parse_llm_response(fenced).unwrap().0, OutcomeLabel::Withdrawn);
        let loose = "{\n    Label: no consensus,\n    Explanation: Opinions split.\n}";
        assert_eq!(parse_llm_response(loose).unwrap(), (OutcomeLabel::NoConsensus, "Opinions split.".into()));
    }

    #[test]
    fn rejects() {
        assert_eq!(parse_llm_response(r#"{"Label": "maybe"}"#), Err(ClassifyError::UnknownLabel("maybe".into())));
        assert!(matches!(parse_llm_response("no idea"), Err(ClassifyError::UnparseableResponse(_))));
        assert!(matches!(parse_llm_response("  "), Err(ClassifyError::UnparseableResponse(_))));
    }
}
