use chrono::NaiveDate;
use ego_tree::NodeRef;
use scraper::{ElementRef, Html, Node, Selector};
use serde::{Deserialize, Serialize};
use url::Url;

use super::ParseError;
use crate::collector::RawPage;

/// One AfD section as found on a log page, before cleaning.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDiscussion {
    pub title: String,
    /// Section anchor (`id` of the heading), used to target `#fragment` URLs.
    pub anchor: Option<String>,
    pub body_html: String,
    /// The "The result was ..." line of an archived discussion.
    pub closing_banner: Option<String>,
    pub source_url: Url,
    pub log_date: Option<NaiveDate>,
}

const ARCHIVE_FOOTER: &str = "the above discussion is preserved as an archive";
const RESULT_PHRASE: &str = "the result was";

enum Piece<'a> {
    Heading(ElementRef<'a>),
    Closed(ElementRef<'a>),
    Boundary,
    Content(NodeRef<'a, Node>),
}

fn has_class(el: &ElementRef<'_>, class: &str) -> bool {
    el.value().classes().any(|c| c == class)
}

fn is_section_heading(el: &ElementRef<'_>) -> bool {
    let name = el.value().name();
    name == "h3" || (name == "div" && has_class(el, "mw-heading3"))
}

fn is_boundary_heading(el: &ElementRef<'_>) -> bool {
    let name = el.value().name();
    matches!(name, "h1" | "h2") || (name == "div" && (has_class(el, "mw-heading1") || has_class(el, "mw-heading2")))
}

fn is_closed_wrapper(el: &ElementRef<'_>) -> bool {
    el.value().name() == "div"
        && (has_class(el, "xfd-closed") || (has_class(el, "boilerplate") && (has_class(el, "afd") || has_class(el, "vfd"))))
}

fn holds_structure(el: &ElementRef<'_>) -> bool {
    el.descendants().filter_map(ElementRef::wrap).skip(1).any(|d| {
        is_section_heading(&d) || is_boundary_heading(&d) || is_closed_wrapper(&d)
    })
}

fn flatten<'a>(node: NodeRef<'a, Node>, detect_closed: bool, out: &mut Vec<Piece<'a>>) {
    for child in node.children() {
        match ElementRef::wrap(child) {
            Some(el) if detect_closed && is_closed_wrapper(&el) => out.push(Piece::Closed(el)),
            Some(el) if is_section_heading(&el) => out.push(Piece::Heading(el)),
            Some(el) if is_boundary_heading(&el) => out.push(Piece::Boundary),
            Some(el) if holds_structure(&el) => flatten(child, detect_closed, out),
            _ => out.push(Piece::Content(child)),
        }
    }
}

/// Visible heading text, without `[edit]` links.
fn heading_text(el: &ElementRef<'_>) -> String {
    let mut buf = String::new();
    collect_text(*el, &mut buf, &|e| has_class(e, "mw-editsection"));
    buf.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn collect_text(el: ElementRef<'_>, buf: &mut String, skip: &dyn Fn(&ElementRef<'_>) -> bool) {
    for child in el.children() {
        match child.value() {
            Node::Text(t) => buf.push_str(t),
            Node::Element(_) => {
                let child_el = ElementRef::wrap(child).unwrap();
                if !skip(&child_el) {
                    collect_text(child_el, buf, skip);
                }
            }
            _ => {}
        }
    }
}

fn heading_anchor(el: &ElementRef<'_>) -> Option<String> {
    if let Some(id) = el.value().attr("id") {
        return Some(id.to_string());
    }
    el.descendants()
        .filter_map(ElementRef::wrap)
        .filter(|d| d.value().name() != "span" || !has_class(d, "mw-editsection"))
        .find_map(|d| d.value().attr("id").map(str::to_string))
}

fn node_text(node: NodeRef<'_, Node>) -> String {
    match node.value() {
        Node::Text(t) => t.to_string(),
        Node::Element(_) => ElementRef::wrap(node).unwrap().text().collect(),
        _ => String::new(),
    }
}

fn normalized(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn node_html(node: NodeRef<'_, Node>) -> String {
    match node.value() {
        Node::Text(t) => escape_text(t),
        Node::Element(_) => ElementRef::wrap(node).unwrap().html(),
        _ => String::new(),
    }
}

fn escape_text(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Section<'a> {
    heading: ElementRef<'a>,
    body: Vec<NodeRef<'a, Node>>,
    banner: Option<String>,
}

fn content_root(doc: &Html) -> ElementRef<'_> {
    let parser_output = Selector::parse("div.mw-parser-output").unwrap();
    if let Some(root) = doc.select(&parser_output).next() {
        return root;
    }
    let body = Selector::parse("body").unwrap();
    doc.select(&body).next().unwrap_or_else(|| doc.root_element())
}

fn closed_section(wrapper: ElementRef<'_>) -> Option<Section<'_>> {
    let mut inner = Vec::new();
    flatten(*wrapper, false, &mut inner);
    let heading_pos = inner.iter().position(|p| matches!(p, Piece::Heading(_)))?;
    let Piece::Heading(heading) = inner[heading_pos] else { unreachable!() };
    let banner = inner[..heading_pos].iter().find_map(|p| match p {
        Piece::Content(n) => {
            let text = super::clean::clean_fragment(&node_html(*n), false).replace('\n', " ");
            text.to_lowercase().contains(RESULT_PHRASE).then_some(text)
        }
        _ => None,
    });
    let body = inner[heading_pos + 1..]
        .iter()
        .filter_map(|p| match p {
            Piece::Content(n) => Some(*n),
            _ => None,
        })
        .filter(|n| !normalized(&node_text(*n)).to_lowercase().starts_with(ARCHIVE_FOOTER))
        .collect();
    Some(Section { heading, body, banner })
}

/// Splits a rendered AfD log page (or a single discussion page) into its
/// discussions, in document order.
pub fn extract_discussions(page: &RawPage) -> Result<Vec<RawDiscussion>, ParseError> {
    let parse_err = |reason: &str| ParseError { url: page.url.to_string(), reason: reason.to_string() };
    if page.body.trim().is_empty() {
        return Err(parse_err("empty body"));
    }
    let doc = Html::parse_document(&page.body);
    let mut pieces = Vec::new();
    flatten(*content_root(&doc), true, &mut pieces);

    let mut sections: Vec<Section<'_>> = Vec::new();
    let mut open: Option<Section<'_>> = None;
    for piece in pieces {
        match piece {
            Piece::Heading(heading) => {
                sections.extend(open.take());
                open = Some(Section { heading, body: Vec::new(), banner: None });
            }
            Piece::Closed(wrapper) => {
                sections.extend(open.take());
                sections.extend(closed_section(wrapper));
            }
            Piece::Boundary => sections.extend(open.take()),
            Piece::Content(node) => {
                if let Some(section) = open.as_mut() {
                    section.body.push(node);
                }
            }
        }
    }
    sections.extend(open.take());

    if sections.is_empty() {
        return Err(parse_err("no AfD discussion sections found"));
    }

    let mut out = Vec::with_capacity(sections.len());
    for section in sections {
        let title = heading_text(&section.heading);
        let body_html: String = section.body.iter().map(|n| node_html(*n)).collect();
        if title.is_empty() || body_html.trim().is_empty() {
            log::warn!("{}: skipping section {:?} with empty title or body", page.url, title);
            continue;
        }
        out.push(RawDiscussion {
            title,
            anchor: heading_anchor(&section.heading),
            body_html,
            closing_banner: section.banner,
            source_url: page.url.clone(),
            log_date: page.log_date,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::Utc;

    pub(crate) fn page(body: &str) -> RawPage {
        RawPage {
            url: Url::parse("https://en.wikipedia.org/wiki/Wikipedia:Articles_for_deletion/Log/2024_July_15").unwrap(),
            fetched_at: Utc::now(),
            body: body.to_string(),
            from_cache: false,
            log_date: NaiveDate::from_ymd_opt(2024, 7, 15),
        }
    }

    fn closed(title: &str, label: &str, comments: &str) -> String {
        format!(
            r#"<div class="boilerplate afd vfd xfd-closed archived mw-archivedtalk">
<dl><dd><i>The following discussion is an archived debate of the proposed deletion of the article below. <b>Please do not modify it.</b></i></dd></dl>
<p>The result was <b>{label}</b>. <a href="/wiki/User:Closer">Closer</a> 10:00, 22 July 2024 (UTC)</p>
<div class="mw-heading mw-heading3"><h3 id="{id}">{title}</h3><span class="mw-editsection">[edit]</span></div>
{comments}
<dl><dd><i>The above discussion is preserved as an archive of the debate. <b>Please do not modify it.</b></i></dd></dl>
</div>"#,
            id = title.replace(' ', "_")
        )
    }

    #[test]
    fn three_closed_one_open() {
        let html = format!(
            "<html><body><div class=\"mw-parser-output\"><p>Log preamble</p>{}{}{}<div class=\"mw-heading mw-heading3\"><h3 id=\"Open_one\">Open one</h3></div><p>Nomination text.</p><ul><li><b>Keep</b> fine.</li></ul></div></body></html>",
            closed("Alpha", "delete", "<p>Nom A.</p>"),
            closed("Beta", "keep", "<p>Nom B.</p>"),
            closed("Gamma", "merge", "<p>Nom C.</p>"),
        );
        let found = extract_discussions(&page(&html)).unwrap();
        let titles: Vec<_> = found.iter().map(|d| d.title.as_str()).collect();
        assert_eq!(titles, ["Alpha", "Beta", "Gamma", "Open one"]);
        assert_eq!(found.iter().filter(|d| d.closing_banner.is_some()).count(), 3);
        assert!(found[0].closing_banner.as_deref().unwrap().starts_with("The result was **delete**."));
        assert!(!found[0].body_html.contains("preserved as an archive"));
        assert_eq!(found[3].anchor.as_deref(), Some("Open_one"));
        assert!(found[3].body_html.contains("Nomination text."));
    }

    #[test]
    fn empty_page_is_parse_error() {
        assert!(extract_discussions(&page("")).is_err());
        assert!(extract_discussions(&page("<html><body><p>nothing here</p></body></html>")).is_err());
    }

    #[test]
    fn nested_replies_stay_in_order() {
        let html = r#"<div class="mw-parser-output"><h3><span class="mw-headline" id="Legacy">Legacy</span><span class="mw-editsection">[edit]</span></h3>
<p>first</p><ul><li>second<dl><dd>third<dl><dd>fourth</dd></dl></dd></dl></li><li>fifth</li></ul></div>"#;
        let found = extract_discussions(&page(html)).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].title, "Legacy");
        assert_eq!(found[0].anchor.as_deref(), Some("Legacy"));
        let body = &found[0].body_html;
        let pos: Vec<_> = ["first", "second", "third", "fourth", "fifth"].iter().map(|w| body.find(w).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn level_two_heading_ends_section() {
        let html = r#"<div class="mw-parser-output"><h3 id="A">A</h3><p>body a</p><div class="mw-heading mw-heading2"><h2>Footer</h2></div><p>footer junk</p></div>"#;
        let found = extract_discussions(&page(html)).unwrap();
        assert_eq!(found.len(), 1);
        assert!(!found[0].body_html.contains("footer junk"));
    }

    #[test]
    fn sections_wrapped_in_section_elements() {
        let html = r#"<div class="mw-parser-output"><section><h3 id="A">A</h3><p>body a</p></section><section><h3 id="B">B</h3><p>body b</p></section></div>"#;
        let found = extract_discussions(&page(html)).unwrap();
        assert_eq!(found.iter().map(|d| d.title.as_str()).collect::<Vec<_>>(), ["A", "B"]);
        assert!(found[1].body_html.contains("body b") && !found[1].body_html.contains("body a"));
    }
}
