//! Deterministic synthetic daily log pages.
//!
//! Outcomes follow the label mix of a large real crawl; votes and argument
//! wording lean towards the outcome so that classifiers have signal to learn.

use chrono::{Datelike, NaiveDate};
use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::collector::MONTHS;
use crate::parser::OutcomeLabel;

/// Relative label frequencies, in [`OutcomeLabel::ALL`] order.
pub const LABEL_WEIGHTS: [u32; 8] = [10047, 3025, 2355, 1194, 1052, 438, 241, 176];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticComment {
    pub vote: Option<String>,
    pub text: String,
    /// 0 for top-level bullets, 1 for replies.
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticDiscussion {
    pub title: String,
    pub label: Option<OutcomeLabel>,
    pub closed: bool,
    pub nomination: String,
    pub comments: Vec<SyntheticComment>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Stance {
    Delete,
    Keep,
    Merge,
    Redirect,
    Comment,
}

const SYLLABLES: &[&str] = &[
    "ka", "lor", "ven", "mi", "tas", "rel", "do", "quin", "sar", "bel", "no", "tri", "val", "es", "mon", "ru", "fen",
    "dra", "li", "gor", "pa", "th", "cy", "wen",
];

const QUALIFIERS: &[&str] =
    &["", "", "", " (band)", " (footballer)", " (politician)", " (album)", " Software", " F.C.", " (film)", " Inc."];

const TOPICS: &[&str] = &[
    "biography", "company", "music group", "sports club", "film", "software product", "local event", "building",
];

const DELETE_ARGS: &[&str] = &[
    "Fails WP:GNG, there is no significant coverage in reliable sources.",
    "This is a poorly sourced promotional piece.",
    "Nothing but trivial mentions and junk sources.",
    "The references are unreliable and the subject is not notable.",
    "Searches found nothing useful, a bad article with no future.",
    "Fails WP:NCORP, the coverage is routine and worthless.",
    "Sources are press releases and blogs, which fail WP:RS.",
];

const KEEP_ARGS: &[&str] = &[
    "Passes WP:GNG with excellent coverage in reliable sources.",
    "Several good independent reviews exist, clearly notable.",
    "The sources are solid and the article is well written.",
    "Meets WP:NBIO thanks to detailed profiles in major newspapers.",
    "Great improvements since nomination, now a useful article.",
    "Significant coverage in books and journals, a strong pass.",
];

const MERGE_ARGS: &[&str] = &[
    "Merge into the parent article, the content is useful but thin.",
    "A short section in the main article would cover this well.",
    "Merge the sourced material and keep the history.",
];

const REDIRECT_ARGS: &[&str] = &[
    "Redirect to the parent article as a plausible search term.",
    "Redirect, the name is a likely search term but lacks standalone coverage.",
];

const COMMENT_ARGS: &[&str] = &[
    "I could not access the offline sources mentioned above.",
    "Relevant projects have been notified of this discussion.",
    "Has anyone checked the archives of the local newspaper?",
];

const SPEEDY_DELETE_CUES: &[&str] = &[
    "Blatant hoax with fabricated references.",
    "Unambiguous advertising, eligible for G11.",
    "Copyright violation of the official web site.",
];

const SPEEDY_KEEP_CUES: &[&str] = &[
    "The nomination gives no deletion rationale.",
    "Nomination by a blocked sockpuppet.",
];

fn vote_words(stance: Stance) -> &'static [&'static str] {
    match stance {
        Stance::Delete => &["Delete", "Strong delete", "Weak delete", "Delete"],
        Stance::Keep => &["Keep", "Strong keep", "Weak keep", "Keep"],
        Stance::Merge => &["Merge", "Selective merge"],
        Stance::Redirect => &["Redirect", "Redirect"],
        Stance::Comment => &["Comment"],
    }
}

fn args(stance: Stance) -> &'static [&'static str] {
    match stance {
        Stance::Delete => DELETE_ARGS,
        Stance::Keep => KEEP_ARGS,
        Stance::Merge => MERGE_ARGS,
        Stance::Redirect => REDIRECT_ARGS,
        Stance::Comment => COMMENT_ARGS,
    }
}

fn leaning(label: Option<OutcomeLabel>, rng: &mut ChaCha8Rng) -> Stance {
    use OutcomeLabel::*;
    match label {
        Some(Delete | SpeedyDelete) => Stance::Delete,
        Some(Keep | SpeedyKeep | Withdrawn) => Stance::Keep,
        Some(Merge) => Stance::Merge,
        Some(Redirect) => Stance::Redirect,
        Some(NoConsensus) | None => *[Stance::Keep, Stance::Delete].choose(rng).unwrap(),
    }
}

fn name(rng: &mut ChaCha8Rng, syllables: usize) -> String {
    let mut s: String = (0..syllables).map(|_| *SYLLABLES.choose(rng).unwrap()).collect();
    s[..1].make_ascii_uppercase();
    s
}

fn title(rng: &mut ChaCha8Rng) -> String {
    let first = name(rng, 2);
    let len = rng.gen_range(2..=3);
    let last = name(rng, len);
    format!("{first} {last}{}", QUALIFIERS.choose(rng).unwrap())
}

fn seed_for(date: NaiveDate) -> u64 {
    (date.num_days_from_ce() as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0xAFD0_2023
}

/// The discussions of the synthetic log page for `date`.
pub fn synthetic_log(date: NaiveDate) -> Vec<SyntheticDiscussion> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed_for(date));
    let weights = WeightedIndex::new(LABEL_WEIGHTS).unwrap();
    let n = rng.gen_range(6..=10);
    (0..n)
        .map(|_| {
            let title = title(&mut rng);
            let closed = rng.gen_bool(0.9);
            let label = closed.then(|| OutcomeLabel::ALL[weights.sample(&mut rng)]);
            discussion(&mut rng, title, label)
        })
        .collect()
}

fn discussion(rng: &mut ChaCha8Rng, title: String, label: Option<OutcomeLabel>) -> SyntheticDiscussion {
    let topic = TOPICS.choose(rng).unwrap();
    let mut nomination = format!("{title} is a {topic} article that appears to lack significant coverage.");
    match label {
        Some(OutcomeLabel::SpeedyDelete) => {
            nomination.push(' ');
            nomination.push_str(SPEEDY_DELETE_CUES.choose(rng).unwrap());
        }
        Some(OutcomeLabel::SpeedyKeep) => {
            nomination = format!("{title}. {}", SPEEDY_KEEP_CUES.choose(rng).unwrap());
        }
        _ => {}
    }
    let speedy = matches!(label, Some(OutcomeLabel::SpeedyDelete | OutcomeLabel::SpeedyKeep));
    let count = if speedy { rng.gen_range(1..=3) } else { rng.gen_range(2..=6) };
    let mut comments = Vec::with_capacity(count + 1);
    for _ in 0..count {
        let stance = if rng.gen_bool(0.75) {
            leaning(label, rng)
        } else {
            *[Stance::Delete, Stance::Keep, Stance::Merge, Stance::Redirect, Stance::Comment].choose(rng).unwrap()
        };
        let mut vote = vote_words(stance).choose(rng).unwrap().to_string();
        if speedy && stance == leaning(label, rng) && rng.gen_bool(0.7) {
            vote = if label == Some(OutcomeLabel::SpeedyDelete) { "Speedy delete".into() } else { "Speedy keep".into() };
        }
        let text = args(stance).choose(rng).unwrap().to_string();
        comments.push(SyntheticComment { vote: Some(vote), text, depth: 0 });
        if rng.gen_bool(0.2) {
            let reply = args(Stance::Comment).choose(rng).unwrap().to_string();
            comments.push(SyntheticComment { vote: None, text: reply, depth: 1 });
        }
    }
    if label == Some(OutcomeLabel::Withdrawn) {
        comments.push(SyntheticComment {
            vote: Some("Withdrawn".into()),
            text: "Nominator here, the sources found above are enough.".into(),
            depth: 0,
        });
    }
    SyntheticDiscussion { title, label, closed: label.is_some(), nomination, comments }
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn signature(i: usize, date: NaiveDate) -> String {
    const USERS: &[&str] = &["Jane Doe", "Hoary Marmot", "Bearian", "Oaktree b", "Spiderone", "Star Mississippi", "Liz"];
    let user = USERS[i % USERS.len()];
    let link = user.replace(' ', "_");
    format!(
        "<a href=\"/wiki/User:{link}\" title=\"User:{user}\">{user}</a> (<a href=\"/wiki/User_talk:{link}\">talk</a>) \
         {:02}:{:02}, {} {} {} (UTC)",
        8 + (i * 3) % 14,
        (i * 17) % 60,
        date.day(),
        MONTHS[date.month0() as usize],
        date.year()
    )
}

/// Anchor id MediaWiki gives a section heading.
pub fn anchor_of(title: &str) -> String {
    title.replace(' ', "_")
}

fn render_discussion(d: &SyntheticDiscussion, date: NaiveDate, idx: usize, out: &mut String) {
    let anchor = esc(&anchor_of(&d.title));
    let t = esc(&d.title);
    let mut body = format!(
        "<div class=\"mw-heading mw-heading3\"><h3 id=\"{anchor}\"><a href=\"/wiki/{anchor}\">{t}</a></h3>\
         <span class=\"mw-editsection\">[<a href=\"#\">edit</a>]</span></div>\n\
         <dl><dd><a href=\"/wiki/{anchor}\">{t}</a> (<a href=\"#\">edit</a> | <a href=\"#\">talk</a> | <a href=\"#\">history</a>) \
         – (<a href=\"#\">View log</a> | <a href=\"#\">edits since nomination</a>)</dd></dl>\n\
         <dl><dd>(<i><a href=\"#\">Find sources:</a></i> \"{t}\" – <a href=\"#\">news</a> <b>·</b> <a href=\"#\">books</a>)</dd></dl>\n\
         <p>{} {}</p>\n<ul>",
        esc(&d.nomination),
        signature(idx, date)
    );
    let mut open_li = false;
    for (j, c) in d.comments.iter().enumerate() {
        let vote = c.vote.as_deref().map(|v| format!("<b>{}</b> ", esc(v))).unwrap_or_default();
        let line = format!("{vote}{} {}", esc(&c.text), signature(idx + j + 1, date));
        if c.depth == 0 {
            if open_li {
                body.push_str("</li>");
            }
            body.push_str(&format!("<li>{line}"));
            open_li = true;
        } else {
            body.push_str(&format!("<dl><dd>{line}</dd></dl>"));
        }
    }
    if open_li {
        body.push_str("</li>");
    }
    body.push_str("</ul>\n");
    match d.label {
        Some(label) if d.closed => {
            out.push_str(
                "<div class=\"boilerplate afd vfd xfd-closed archived mw-archivedtalk\">\n<dl><dd><i>The following discussion \
                 is an archived debate of the proposed deletion of the article below. <b>Please do not modify it.</b></i></dd></dl>\n",
            );
            out.push_str(&format!("<p>The result was <b>{}</b>. {}</p>\n", label.as_str(), signature(idx + 7, date)));
            out.push_str(&body);
            out.push_str(
                "<dl><dd><i>The above discussion is preserved as an archive of the debate. <b>Please do not modify it.</b></i></dd></dl></div>\n",
            );
        }
        _ => out.push_str(&body),
    }
}

/// Full HTML of a log page holding `discussions`.
pub fn render_log_page(date: NaiveDate, discussions: &[SyntheticDiscussion]) -> String {
    let name = format!("{} {} {}", date.year(), MONTHS[date.month0() as usize], date.day());
    let mut out = format!(
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"UTF-8\">\n<title>Wikipedia:Articles for deletion/Log/{name} - Wikipedia</title>\n</head>\n<body>\n\
         <h1 id=\"firstHeading\">Wikipedia:Articles for deletion/Log/{name}</h1>\n\
         <div id=\"mw-content-text\"><div class=\"mw-content-ltr mw-parser-output\">\n\
         <div class=\"mw-heading mw-heading2\"><h2 id=\"Purge_server_cache\">Purge server cache</h2></div>\n"
    );
    for (i, d) in discussions.iter().enumerate() {
        render_discussion(d, date, i * 3 + date.day() as usize, &mut out);
    }
    out.push_str("</div></div>\n</body>\n</html>\n");
    out
}

const NOISE: &[&str] = &["article", "source", "page", "editor", "discussion", "review", "text", "link", "per", "above"];

/// `(text, label)` items where every label has its own cue words (`c{i}w{j}`)
/// mixed with shared filler, so the classes are linearly separable.
pub fn separable_corpus<S: AsRef<str>>(labels: &[S], per_label: usize, seed: u64) -> Vec<(String, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(labels.len() * per_label);
    for _ in 0..per_label {
        for (i, label) in labels.iter().enumerate() {
            let mut words: Vec<String> = (0..4).map(|_| format!("c{i}w{}", rng.gen_range(0..12))).collect();
            words.extend((0..4).map(|_| NOISE.choose(&mut rng).unwrap().to_string()));
            words.shuffle(&mut rng);
            out.push((words.join(" "), label.as_ref().to_string()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_date() {
        let d = NaiveDate::from_ymd_opt(2023, 5, 1).unwrap();
        assert_eq!(synthetic_log(d), synthetic_log(d));
        assert_ne!(synthetic_log(d), synthetic_log(d.succ_opt().unwrap()));
    }

    #[test]
    fn labels_only_on_closed() {
        for day in 0..40 {
            let d = NaiveDate::from_ymd_opt(2023, 1, 1).unwrap() + chrono::Days::new(day);
            for disc in synthetic_log(d) {
                assert_eq!(disc.closed, disc.label.is_some());
            }
        }
    }
}
