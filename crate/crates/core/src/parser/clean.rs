//! HTML-to-text cleaning for discussion bodies.
//!
//! Output is one line per block-level element (comments, replies, paragraphs)
//! with whitespace collapsed inside each line. Text that was bold in the source
//! is kept wrapped in `**` so that vote keywords can be located later by
//! [`super::mask_votes`]; [`strip_bold_markers`] removes the annotation.

use ego_tree::NodeRef;
use scraper::{ElementRef, Html, Node};

use super::RawDiscussion;

/// Elements dropped wholesale, by class.
const SKIP_CLASSES: &[&str] = &[
    "mw-editsection",
    "reference",
    "noprint",
    "navbox",
    "xfd_relist",
    "delsort-notice",
    "mw-empty-elt",
    "plainlinks-nav",
];

const SKIP_ELEMENTS: &[&str] = &["script", "style", "noscript", "head", "title", "meta", "link"];

const BLOCK_ELEMENTS: &[&str] = &[
    "p", "div", "li", "dd", "dt", "dl", "ul", "ol", "blockquote", "h1", "h2", "h3", "h4", "h5", "h6", "table", "tr",
    "section", "center", "pre", "hr",
];

/// Block texts (lowercased, normalized) that are navigation or closure
/// boilerplate rather than discussion.
const BOILERPLATE_PREFIXES: &[&str] = &[
    "the following discussion is an archived debate",
    "the above discussion is preserved as an archive",
    "the result was",
    "please do not modify it",
    "(find sources:",
    "find sources:",
    "note: this discussion has been included in",
    "relisted to generate a more thorough discussion",
];

/// Nomination nav line: `Title (edit | talk | history ...) – (View log | edits since nomination)`.
const NAV_MARKERS: &[&str] = &["view log", "edits since nomination"];

struct TextBuilder {
    drop_boilerplate: bool,
    lines: Vec<String>,
    current: String,
    bold_depth: usize,
}

impl TextBuilder {
    fn push_text(&mut self, text: &str) {
        // literal runs of '*' would be confused with bold markers
        let mut last_star = false;
        for c in text.chars() {
            if c == '*' {
                if !last_star {
                    self.current.push('*');
                }
                last_star = true;
            } else {
                self.current.push(c);
                last_star = false;
            }
        }
    }

    fn break_line(&mut self) {
        let line = collapse_ws(&self.current);
        if !line.is_empty() {
            self.lines.push(line);
        }
        self.current.clear();
    }
}

fn collapse_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn is_boilerplate_block(el: &ElementRef<'_>) -> bool {
    let text = collapse_ws(&el.text().collect::<String>()).to_lowercase();
    if text.len() > 800 {
        return false;
    }
    BOILERPLATE_PREFIXES.iter().any(|p| text.starts_with(p)) || NAV_MARKERS.iter().all(|m| text.contains(m))
}

fn walk(node: NodeRef<'_, Node>, out: &mut TextBuilder) {
    match node.value() {
        Node::Text(t) => out.push_text(t),
        Node::Element(e) => {
            let name = e.name();
            if SKIP_ELEMENTS.contains(&name) || e.classes().any(|c| SKIP_CLASSES.contains(&c)) {
                return;
            }
            if name == "br" {
                out.break_line();
                return;
            }
            let el = ElementRef::wrap(node).unwrap();
            let block = BLOCK_ELEMENTS.contains(&name);
            if block && out.drop_boilerplate && is_boilerplate_block(&el) {
                return;
            }
            let bold = matches!(name, "b" | "strong") && out.bold_depth == 0;
            if block {
                out.break_line();
            }
            if bold {
                let mut inner = TextBuilder {
                    drop_boilerplate: out.drop_boilerplate,
                    lines: Vec::new(),
                    current: String::new(),
                    bold_depth: 1,
                };
                for child in node.children() {
                    walk(child, &mut inner);
                }
                inner.break_line();
                let content = inner.lines.join(" ");
                let content = content.trim_matches('*').trim();
                if !content.is_empty() {
                    out.current.push_str(" **");
                    out.current.push_str(content);
                    out.current.push_str("** ");
                }
            } else {
                for child in node.children() {
                    walk(child, out);
                }
            }
            if block {
                out.break_line();
            }
        }
        Node::Document | Node::Fragment => {
            for child in node.children() {
                walk(child, out);
            }
        }
        _ => {}
    }
}

/// Cleans an HTML fragment (or plain text) into annotated discussion text.
pub fn clean_html(fragment: &str) -> String {
    clean_fragment(fragment, true)
}

/// Like [`clean_html`] but keeps closure and navigation lines; used for
/// closing banners.
pub(crate) fn clean_fragment(fragment: &str, drop_boilerplate: bool) -> String {
    let doc = Html::parse_fragment(fragment);
    let mut out = TextBuilder { drop_boilerplate, lines: Vec::new(), current: String::new(), bold_depth: 0 };
    walk(doc.tree.root(), &mut out);
    out.break_line();
    let text = out.lines.join("\n");
    tidy_marker_spacing(&text)
}

/// Removes the space that bold insertion adds before punctuation, so that
/// `<b>Keep</b>.` reads `**Keep**.`.
fn tidy_marker_spacing(text: &str) -> String {
    static RE: std::sync::LazyLock<regex::Regex> =
        std::sync::LazyLock::new(|| regex::Regex::new(r"\*\* ([.,;:!?)\]])").unwrap());
    RE.replace_all(text, "**$1").into_owned()
}

/// Cleaned, bold-annotated text of a discussion body. The closing banner is
/// never part of the output.
pub fn clean_text(raw: &RawDiscussion) -> String {
    let text = clean_html(&raw.body_html);
    if text.is_empty() {
        log::warn!("discussion {:?} cleaned to empty text", raw.title);
    }
    text
}

/// Drops `**` bold annotations, leaving plain text.
pub fn strip_bold_markers(text: &str) -> String {
    text.lines()
        .map(|l| collapse_ws(&l.replace("**", "")))
        .filter(|l| !l.is_empty())
        .collect::<Vec<_>>()
        .join("\n")
}
