#!/usr/bin/env python3
"""Writes the bundled AfD fixture corpus.

Each `<date>.html` is a rendered daily log page; `<date>.expected.jsonl` holds
one golden record per discussion, derived from the generator's own ground
truth: title, anchor, closed flag, canonical label, the ordered comment texts
(as they must appear in cleaned text) and the bold vote strings.

Run from this directory: python3 generate_corpus.py
"""
import html
import json
import pathlib

OUT = pathlib.Path(__file__).parent / "afd"

USERS = ["Jane Doe", "Hoary Marmot", "Lankiveil", "Bearian", "Dream Focus", "Oaktree b",
         "Spiderone", "Star Mississippi", "Liz", "Sandstein", "Randykitty", "Cunard",
         "Extraordinary Writ", "Owen×", "Vanamonde93", "LibStar"]

MONTHS = ["January", "February", "March", "April", "May", "June", "July", "August",
          "September", "October", "November", "December"]


def sig(i, date):
    user = USERS[i % len(USERS)]
    y, m, d = date
    hh, mm = 8 + (i * 3) % 14, (i * 17) % 60
    return (f'<a href="/wiki/User:{html.escape(user.replace(" ", "_"))}" title="User:{html.escape(user)}">{html.escape(user)}</a> '
            f'(<a href="/wiki/User_talk:{html.escape(user.replace(" ", "_"))}">talk</a>) '
            f'{hh:02d}:{mm:02d}, {d} {MONTHS[m - 1]} {y} (UTC)'), f"{user} (talk) {hh:02d}:{mm:02d}, {d} {MONTHS[m - 1]} {y} (UTC)"


def anchor_of(title):
    return title.replace(" ", "_")


def heading(title, legacy):
    a = html.escape(anchor_of(title))
    t = html.escape(title)
    if legacy:
        return (f'<h3><span class="mw-headline" id="{a}"><a href="/wiki/{a}">{t}</a></span>'
                f'<span class="mw-editsection"><span class="mw-editsection-bracket">[</span><a href="#">edit</a>'
                f'<span class="mw-editsection-bracket">]</span></span></h3>')
    return (f'<div class="mw-heading mw-heading3"><h3 id="{a}"><a href="/wiki/{a}">{t}</a></h3>'
            f'<span class="mw-editsection"><span class="mw-editsection-bracket">[</span><a href="#">edit</a>'
            f'<span class="mw-editsection-bracket">]</span></span></div>')


def nav_lines(title, date):
    a = html.escape(anchor_of(title))
    t = html.escape(title)
    y, m, d = date
    return (f'<dl><dd><span id="{a}_nav"></span><a href="/wiki/{a}">{t}</a> ('
            f'<span class="plainlinks"><a href="#">edit</a> | <a href="#">talk</a> | <a href="#">history</a> | '
            f'<a href="#">protect</a> | <a href="#">delete</a> | <a href="#">links</a> | <a href="#">watch</a> | '
            f'<a href="#">logs</a> | <a href="#">views</a></span>) – (<a href="/wiki/Wikipedia:Articles_for_deletion/Log/{y}_{MONTHS[m-1]}_{d}#{a}">View log</a>'
            f' | <span class="plainlinks"><a href="#">edits since nomination</a></span>)</dd></dl>\n'
            f'<dl><dd>(<i><span class="plainlinks"><a href="#">Find sources:</a></span></i> "{t}" – '
            f'<a href="#">news</a> <b>·</b> <a href="#">newspapers</a> <b>·</b> <a href="#">books</a> <b>·</b> '
            f'<a href="#">scholar</a> <b>·</b> <a href="#">JSTOR</a>)</dd></dl>\n')


def bold(text, strong=False):
    tag = "strong" if strong else "b"
    return f"<{tag}>{html.escape(text)}</{tag}>"


def render_comment(c, i, date, nested_depth=0):
    """c = (vote or None, text, replies). Returns (html, [expected texts], [votes])."""
    vote, text, replies = c[0], c[1], c[2] if len(c) > 2 else []
    sig_html, sig_text = sig(i, date)
    body = (bold(vote, strong=(i % 5 == 3)) + " " if vote else "") + html.escape(text) + " " + sig_html
    expected = [text]
    votes = [vote] if vote else []
    inner = ""
    for j, r in enumerate(replies):
        r_html, r_exp, r_votes = render_comment(r, i + j + 1, date, nested_depth + 1)
        inner += f"<dl><dd>{r_html}</dd></dl>"
        expected += r_exp
        votes += r_votes
    return body + inner, expected, votes


def render_discussion(disc, date, legacy, idx):
    title = disc["title"]
    parts = [heading(title, legacy), nav_lines(title, date)]
    nom_sig, _ = sig(idx, date)
    parts.append(f"<p>{html.escape(disc['nomination'])} {nom_sig}</p>\n")
    expected = [disc["nomination"]]
    votes = []
    if disc.get("delsort"):
        parts.append(f'<dl><dd><small class="delsort-notice">Note: This discussion has been included in the list of '
                     f'{disc["delsort"]}-related deletion discussions. {nom_sig}</small></dd></dl>\n')
    items = []
    for j, c in enumerate(disc["comments"]):
        c_html, c_exp, c_votes = render_comment(c, idx + j + 1, date)
        items.append(f"<li>{c_html}</li>")
        expected += c_exp
        votes += c_votes
        if disc.get("relist_after") == j:
            items.append('</ul>\n<div class="xfd_relist" style="border-top: 1px solid #AAAAAA;"><dl><dd><span style="color: #FF4F00;">'
                         'Relisted to generate a more thorough discussion and clearer consensus.</span><br/>'
                         f'<small>Please add new comments below this notice. Thanks, {nom_sig}</small></dd></dl></div>\n<ul>')
    parts.append("<ul>" + "".join(items) + "</ul>\n")
    body = "".join(parts)
    if disc["closed"]:
        closer, _ = sig(idx + 7, date)
        result = disc["result_html"]
        body = ('<div class="boilerplate afd vfd xfd-closed archived mw-archivedtalk" style="background-color: #F3F9FF; margin: 0 auto; padding: 0 10px 0 10px; border: 1px solid #AAAAAA;">\n'
                '<dl><dd><i>The following discussion is an archived debate of the proposed deletion of the article below. '
                '<b style="color: red">Please do not modify it.</b> Subsequent comments should be made on the appropriate discussion page '
                "(such as the article's talk page or in a deletion review). No further edits should be made to this page.</i></dd></dl>\n"
                f'<p>The result was {result}. {closer}</p>\n'
                + body +
                '<dl><dd><i>The above discussion is preserved as an archive of the debate. <b style="color: red">Please do not modify it.</b> '
                "Subsequent comments should be made on the appropriate discussion page (such as the article's talk page or in a deletion review). "
                "No further edits should be made to this page.</i></dd></dl></div>\n")
    golden = {
        "title": title,
        "anchor": anchor_of(title),
        "closed": disc["closed"],
        "label": disc.get("label"),
        "comments": expected,
        "votes": votes,
    }
    return body, golden


def render_page(date, discussions, variant):
    y, m, d = date
    name = f"{y} {MONTHS[m-1]} {d}"
    sections = []
    goldens = []
    for i, disc in enumerate(discussions):
        legacy = variant in ("legacy",) or (variant == "mixed" and i % 2 == 1)
        body, golden = render_discussion(disc, date, legacy, i * 3 + d)
        if variant == "sections":
            body = f'<section data-mw-section-id="{i + 1}">{body}</section>'
        sections.append(body)
        goldens.append(golden)
    page = (f'<!DOCTYPE html>\n<html class="client-nojs" lang="en" dir="ltr">\n<head>\n<meta charset="UTF-8">\n'
            f'<title>Wikipedia:Articles for deletion/Log/{name} - Wikipedia</title>\n<style>.mw-editsection{{display:none}}</style>\n'
            f'<script>var wgPageName="Wikipedia:Articles_for_deletion/Log/{y}_{MONTHS[m-1]}_{d}";</script>\n</head>\n<body>\n'
            f'<div id="content" class="mw-body"><h1 id="firstHeading" class="firstHeading">Wikipedia:Articles for deletion/Log/{name}</h1>\n'
            f'<div id="mw-content-text" class="mw-body-content"><div class="mw-content-ltr mw-parser-output" lang="en" dir="ltr">\n'
            f'<div class="afd-log-nav" style="text-align:center"><p>&lt; {MONTHS[m-1]} {d - 1 if d > 1 else d} | {MONTHS[m-1]} {d + 1} &gt;</p></div>\n'
            f'<div class="mw-heading mw-heading2"><h2 id="Purge_server_cache">Purge server cache</h2></div>\n'
            + "".join(sections) +
            '</div></div></div>\n<div id="footer"><p>Text is available under the Creative Commons Attribution-ShareAlike License.</p></div>\n'
            '</body>\n</html>\n')
    return page, goldens


def D(title, label, result_html, nomination, comments, closed=True, **kw):
    d = {"title": title, "label": label, "result_html": result_html, "nomination": nomination,
         "comments": comments, "closed": closed}
    d.update(kw)
    return d


def O(title, nomination, comments, **kw):
    return D(title, None, None, nomination, comments, closed=False, **kw)


PAGES = [
    ((2023, 1, 4), "modern", [
        D("Kelvor Matusan", "delete", "<b>delete</b>",
          "Non-notable footballer who never played a professional match. Fails WP:NFOOTY and WP:GNG.",
          [("Delete", "Searches turn up only transfer rumours and a database entry."),
           ("Delete", "Per nom, nothing in reliable sources.", [(None, "Agree, I looked at the Serbian press too.")]),
           ("Comment", "The club itself might be notable, the player is not.")], delsort="Football"),
        D("Orvane Bakery", "keep", "<b>keep</b>",
          "Local bakery with promotional tone and no independent coverage.",
          [("Keep", "Two lengthy features in the regional newspaper and a book chapter establish notability."),
           ("Keep", "The sources found meet WP:NCORP, the tone can be fixed by editing."),
           ("Weak delete", "Coverage is mostly local.")]),
        O("Sandrin Peaks Festival",
          "A music festival that ran twice. Sources are all press releases.",
          [("Delete", "Press releases are not independent coverage."),
           ("Keep", "There is a review in a national music magazine.")]),
    ]),
    ((2023, 2, 11), "legacy", [
        D("Tarquin Ellweather", "redirect", "<b>redirect</b> to <a href=\"/wiki/Ellweather_family\">Ellweather family</a>",
          "Minor aristocrat known only through his family.",
          [("Redirect", "Redirect to Ellweather family where he is already mentioned."),
           ("Redirect", "Per above, a plausible search term."),
           ("Delete", "No coverage at all.")]),
        D("Gullhaven Lighthouse", "merge", "<b>Merge</b> to Gullhaven",
          "Stub about a lighthouse that has no coverage apart from the town article.",
          [("Merge", "Merge into Gullhaven, the town article has a section on the harbour."),
           ("Merge", "Agree, a merge keeps the sourced content."),
           ("Keep", "Lighthouses are usually notable.")]),
    ]),
    ((2023, 3, 19), "mixed", [
        D("Pell Quorvath", "no consensus", "<b>no consensus</b>",
          "Academic with a modest citation record, unclear whether WP:NPROF is met.",
          [("Keep", "h-index of 21 is acceptable in this field."),
           ("Delete", "Citation counts are low for a highly cited field."),
           ("Keep", "Named chair at a major university, passes criterion 5."),
           ("Delete", "The chair is not a named chair in the WP:NPROF sense.")], relist_after=1),
        D("Marrowdale Rovers F.C.", "speedy keep", "<b>speedy keep</b>",
          "Club plays in a regional league.",
          [("Speedy keep", "Nomination is clearly erroneous, the club played in the national cup."),
           ("Keep", "Obviously notable, see the sources in the article.")]),
        D("Ysolde Farrance", "delete", "<b>Delete</b>",
          "Actress with only minor roles.",
          [("Delete", "Only uncredited roles, fails WP:NACTOR."),
           ("Strong delete", "Possible autobiography.")]),
    ]),
    ((2023, 4, 2), "modern", [
        D("Brindlewick Software", "speedy delete", "<b>Speedy delete</b> (G11)",
          "Blatant advertising. The whole article reads like a brochure.",
          [("Speedy delete", "G11, unambiguous promotion."),
           ("Delete", "Promotional, no coverage.")]),
        D("Halloran Vex (poet)", "withdrawn", "<b>withdrawn</b>",
          "Poet who seems to lack coverage.",
          [("Keep", "Several reviews of her collections exist in literary journals."),
           ("Withdrawn", "Nominator here, I withdraw the nomination given the reviews found.")]),
    ]),
    ((2023, 5, 27), "sections", [
        D("Dunmere Quarry Railway", "keep", "<b>Keep</b>",
          "Short industrial railway, possibly not notable.",
          [("Keep", "Covered in detail by two books on industrial railways."),
           ("Keep", "Per above, easily passes WP:GNG.")]),
        D("Cassius Thorne-Belfry", "delete", "<b>delete</b>",
          "Businessman whose article was created by a paid editor.",
          [("Delete", "Undisclosed paid editing and no independent coverage."),
           ("Delete", "Interviews are not independent.")]),
        D("Nethery Glen", "redirect", "<b>Redirect</b>",
          "Unincorporated community without sourcing.",
          [("Redirect", "Redirect to the county article, GNIS is not reliable for populated places.")]),
    ]),
    ((2023, 6, 8), "modern", [
        D("Velmore Circuit", "no consensus", "<b>No consensus</b>",
          "Racing circuit that closed in the 1990s.",
          [("Keep", "Hosted national championship rounds."),
           ("Delete", "No significant coverage found."),
           ("Merge", "Could be merged into the town article.")]),
        D("Ilse Moravcová", "speedy delete", "<b>speedily deleted</b>",
          "Hoax article about a fictional Czech scientist.",
          [("Speedy delete", "Blatant hoax, none of the cited works exist."),
           ("Delete", "Confirmed hoax, the university has no record of her.")]),
    ]),
    ((2023, 7, 30), "legacy", [
        D("Aldercombe Parish Council", "merge", "<b>merge</b>",
          "Parish councils are rarely notable on their own.",
          [("Merge", "Merge to Aldercombe per WP:ORG."),
           ("Merge", "Agree with merging.")]),
        O("Griswold T. Pemberley",
          "Politician who lost a primary election.",
          [("Delete", "Unelected candidates fail WP:NPOL."),
           ("Redirect", "Redirect to the election article.")]),
    ]),
    ((2023, 8, 14), "modern", [
        D("Thessaly Orchard Press", "withdrawn", "<b>Withdraw</b>",
          "Small publisher, cannot find sources.",
          [("Keep", "There is a detailed history in a trade journal."),
           ("Withdrawn", "I withdraw, thanks for finding it.")]),
        D("Rookhaven (band)", "delete", "<b>delete</b>",
          "Band with one self-released EP.",
          [("Delete", "Fails WP:NBAND, no charting and no reviews."),
           ("Delete", "Nothing found.")], delsort="Bands and musicians"),
    ]),
    ((2023, 9, 3), "mixed", [
        D("Ostrander Mills", "keep", "<b>keep</b>",
          "Former mill town article lacking sources.",
          [("Keep", "Legally recognized populated places are presumed notable."),
           ("Keep", "Added three historical sources.")]),
        D("Calloway Brink", "speedy keep", "<b>Speedy Keep</b>",
          "Disruptive nomination by a blocked sockpuppet.",
          [("Speedy keep", "Nominator is a sockpuppet, WP:SK criterion 4."),
           ("Speedy keep", "Per above.")]),
    ]),
    ((2023, 10, 21), "modern", [
        D("Westbury Lantern Parade", "redirect", "<b>Redirect</b>",
          "Annual local event with only local coverage.",
          [("Redirect", "Redirect to Westbury#Culture."),
           ("Delete", "Not even worth a redirect.")]),
        D("Fennimore Ashgrove", "no consensus", "<b>no-consensus</b>",
          "Sculptor with a few gallery shows.",
          [("Keep", "Work held in a national collection."),
           ("Delete", "Gallery listings are not coverage.")], relist_after=0),
    ]),
    ((2023, 11, 7), "legacy", [
        D("Quillon Trade Fair", "delete", "<b>Delete</b>",
          "Trade fair without independent coverage.",
          [("Delete", "Fails WP:NEVENT."),
           ("Delete", "Agree with nominator.")]),
        D("Harrowgate Stoneworks", "merge", "<b>Merge</b>",
          "Defunct company with little coverage.",
          [("Merge", "Merge to the family article."),
           ("Keep", "The company history book is enough.")]),
    ]),
    ((2023, 12, 12), "modern", [
        D("Perpetua Oyelaran", "speedy delete", "<b>Speedy delete</b>",
          "Attack page about a private individual.",
          [("Speedy delete", "G10, attack page."),
           ("Speedy delete", "Tagged for G10.")]),
        D("Lindqvist Observatory", "keep", "<b>Keep</b>",
          "University observatory with few sources.",
          [("Keep", "Described in several astronomy journals."),
           ("Keep", "Meets WP:GNG easily.")]),
    ]),
    ((2024, 1, 9), "sections", [
        D("Mirela Constantin (judoka)", "withdrawn", "<b>Withdrawn</b>",
          "Judoka without major medals.",
          [("Keep", "She won a continental championship medal."),
           ("Withdrawn", "Nomination withdrawn.")]),
        O("Barrowfield Chess Club",
          "Amateur chess club with no coverage.",
          [("Delete", "No independent coverage found.")]),
    ]),
    ((2024, 2, 18), "modern", [
        D("Orrin Vantablack", "delete", "<b>delete</b>",
          "YouTuber with no independent sources.",
          [("Delete", "Only social media statistics."),
           ("Delete", "Fails WP:ENT.", [(None, "Agreed, the subscriber counts are not coverage.", [("Comment", "Follower counts never establish notability.")])])]),
        D("Kestrel Moor Reservoir", "keep", "<b>keep</b>",
          "Reservoir article sourced only to maps.",
          [("Keep", "Found engineering history in a civil engineering journal.")]),
    ]),
    ((2024, 3, 5), "mixed", [
        D("Tamsin Okoro-Welles", "no consensus", "<b>no consensus</b>",
          "Journalist whose notability is borderline.",
          [("Keep", "Won a national press award."),
           ("Delete", "The award is minor."),
           ("Keep", "Award is covered by reliable sources.")]),
        D("Glimmerbrook Academy", "redirect", "<b>redirect</b>",
          "Primary school article.",
          [("Redirect", "Redirect to the school district per WP:NSCHOOL outcomes.")]),
    ]),
    ((2024, 4, 16), "modern", [
        D("Ashcombe Viaduct", "speedy keep", "<b>speedy keep</b>",
          "Viaduct article nominated without a rationale.",
          [("Speedy keep", "No deletion rationale was given, WP:SK criterion 1."),
           ("Keep", "Listed structure.")]),
        D("Poldark Crisps", "delete", "<b>delete</b>",
          "Snack brand with only product listings.",
          [("Delete", "Product listings are not coverage.")]),
    ]),
    ((2024, 5, 1), "legacy", [
        D("Yevgenia Ransome", "merge", "<b>merge</b>",
          "Character from a minor novel series.",
          [("Merge", "Merge to the list of characters."),
           ("Merge", "Per above.")]),
        D("Thornbury Gasworks", "withdrawn", "<b>Nomination withdrawn</b>",
          "Old gasworks, no sources.",
          [("Keep", "Listed building with a heritage report."),
           ("Withdrawn", "I withdraw my nomination.")]),
    ]),
    ((2024, 5, 22), "modern", [
        D("Corvin Halstead", "speedy delete", "<b>Speedy Delete</b>",
          "Self-promotional autobiography.",
          [("Speedy delete", "G11 and A7, written by the subject."),
           ("Delete", "Nothing to save.")]),
        D("Pemberton Salt Marsh", "keep", "<b>Keep</b>",
          "Nature reserve article with thin sourcing.",
          [("Keep", "Designated SSSI, presumed notable.")]),
    ]),
    ((2024, 6, 10), "sections", [
        D("Ludovica Brennan", "no consensus", "<b>No consensus</b>",
          "Author with one book.",
          [("Keep", "Two reviews in major newspapers."),
           ("Delete", "WP:BLP1E style, one book only.")]),
        D("Harcastle Tunnel", "redirect", "<b>Redirect</b>",
          "Short tunnel with no sources.",
          [("Redirect", "Redirect to the railway line article.")]),
    ]),
    ((2024, 7, 2), "modern", [
        D("Imrie Fosdyke", "merge", "<b>Merge</b>",
          "Football manager with a short career.",
          [("Merge", "Merge to the club's list of managers.")]),
        D("Santerra Holdings", "delete", "<b>Delete</b>",
          "Holding company with no coverage.",
          [("Delete", "Fails WP:NCORP."),
           ("Delete", "Per nom.")]),
    ]),
    ((2024, 7, 15), "modern", [
        D("Raisul Islam Ador", "speedy delete", "<b>speedy delete</b>",
          "None establish his Wikipedia:Notability . The first reference is almost identical in wording to his official web site.",
          [("Speedy delete", "G11, the article copies his official biography."),
           ("Delete", "No reliable sources found.")]),
        O("Wrenfield Lido",
          "Open air pool with only local coverage.",
          [("Keep", "Covered in a national architecture survey."),
           ("Delete", "Local coverage only.")]),
    ]),
]


def main():
    OUT.mkdir(exist_ok=True)
    for old in OUT.glob("*"):
        old.unlink()
    for date, variant, discussions in PAGES:
        page, goldens = render_page(date, discussions, variant)
        stem = f"{date[0]:04d}-{date[1]:02d}-{date[2]:02d}"
        (OUT / f"{stem}.html").write_text(page, encoding="utf-8")
        with open(OUT / f"{stem}.expected.jsonl", "w", encoding="utf-8") as f:
            for g in goldens:
                f.write(json.dumps(g, ensure_ascii=False) + "\n")
    print(f"wrote {len(PAGES)} pages")


if __name__ == "__main__":
    main()
