//! Rule-based sentence segmentation tuned for AfD comments.
//!
//! Boundaries are line breaks and sentence-final punctuation followed by
//! whitespace. A period does not end a sentence after a known abbreviation,
//! after a single-letter initial, or when the next word starts lowercase.
//! Policy shortcuts such as `WP:N` or `Wikipedia:Notability` contain no
//! boundary characters and so are never split internally.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub index: usize,
    pub text: String,
}

/// Abbreviations that never end a sentence.
const ABBREVIATIONS: &[&str] = &[
    "e.g", "i.e", "vs", "mr", "mrs", "ms", "dr", "prof", "st", "jr", "sr", "cf", "approx", "inc", "ltd", "corp", "u.s",
    "u.k", "al", "ca", "viz", "esp", "dept", "est",
];

/// Abbreviations that only bind to a following number (`p. 4`, `No. 5`).
const NUMERIC_ABBREVIATIONS: &[&str] = &[
    "p", "pp", "no", "nos", "vol", "vols", "fig", "ch", "sec", "art", "para", "jan", "feb", "mar", "apr", "jun", "jul",
    "aug", "sep", "sept", "oct", "nov", "dec", "ed",
];

const CLOSERS: &[char] = &['"', '\'', ')', ']', '”', '’', '»', '}'];

fn is_boundary_token(token: &str, next: Option<&str>) -> bool {
    let core = token.trim_end_matches(CLOSERS);
    let Some(last) = core.chars().last() else { return false };
    if !matches!(last, '.' | '!' | '?' | '…') {
        return false;
    }
    let Some(next) = next else { return true };
    let next_first = next.trim_start_matches(['"', '\'', '(', '[', '“', '‘', '«']).chars().next();
    if next_first.is_some_and(|c| c.is_lowercase()) {
        return false;
    }
    if last != '.' || core.ends_with("..") {
        return true;
    }
    let word = core.trim_end_matches('.').trim_start_matches(['(', '[', '"', '\'', '“']);
    let lower = word.to_lowercase();
    if ABBREVIATIONS.contains(&lower.as_str()) {
        return false;
    }
    if NUMERIC_ABBREVIATIONS.contains(&lower.as_str()) && next_first.is_some_and(|c| c.is_ascii_digit()) {
        return false;
    }
    // single initial: "J. Smith"
    let mut chars = word.chars();
    if let (Some(c), None) = (chars.next(), chars.next()) {
        if c.is_uppercase() {
            return false;
        }
    }
    true
}

fn segment_line(line: &str, out: &mut Vec<String>) {
    let tokens: Vec<(usize, &str)> = line
        .split_whitespace()
        .map(|t| (t.as_ptr() as usize - line.as_ptr() as usize, t))
        .collect();
    let mut start = 0usize;
    for (i, (offset, token)) in tokens.iter().enumerate() {
        let next = tokens.get(i + 1).map(|(_, t)| *t);
        if is_boundary_token(token, next) {
            let end = offset + token.len();
            let sentence = line[start..end].trim();
            if !sentence.is_empty() {
                out.push(sentence.to_string());
            }
            start = end;
        }
    }
    let rest = line[start..].trim();
    if !rest.is_empty() {
        out.push(rest.to_string());
    }
}

/// Splits text into sentences; indices run from 0. Whitespace-only input
/// gives an empty list.
pub fn segment_sentences(text: &str) -> Vec<Sentence> {
    let mut raw = Vec::new();
    for line in text.lines() {
        segment_line(line, &mut raw);
    }
    raw.into_iter().enumerate().map(|(index, text)| Sentence { index, text }).collect()
}
