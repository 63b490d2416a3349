"""Heuristic extraction of structured records from anthology-style pages.

The supported page dialect is pinned by explicit structural markers so
extraction is testable against the bundled fixture corpus:

* **index** pages carry ``<section class="venue-index" data-category=...>``
  blocks, one per top-level category, whose ``venue-link`` anchors name the
  venues;
* **venue** pages carry a ``venue-page`` section in which ``year-heading``
  headings group ``proceedings-link`` anchors (one event per year), each
  optionally described by an ``event-desc`` span;
* **proceedings** pages carry a ``proceedings-page`` section holding a
  ``paper-list`` container of ``paper-entry`` blocks -- a ``paper-title``
  anchor (whose href's final path segment is the paper id), a
  ``paper-authors`` span, an optional ``paper-abstract`` block, an optional
  ``pdf-link`` anchor, an optional ``bibkey`` span -- plus an optional
  ``pagination`` nav of follow-up links;
* **paper** landing pages carry a ``paper-detail`` block.

Relative links resolve against the page's ``<base href>``, falling back to
the ``base_url`` keyword.  A thin adapter mapping a live site's markup onto
these markers keeps the extraction interface unchanged.

All operations are pure functions of their inputs; they are safe to call
concurrently.  Recoverable anomalies degrade per entry, never per page:
``parse_proceedings`` reports them in ``ParseReport.warnings``, the other
operations log them at warning level.
"""
from __future__ import annotations

import logging
import posixpath
import re
from dataclasses import dataclass, field
from enum import Enum
from urllib.parse import urljoin, urlparse

from . import htmldoc
from .errors import EmptyInput, StructureError, UnrecognizedPage
from .model import (
    Category,
    ConContent,
    ConferenceRecord,
    CrawlLog,
    PaperRecord,
    make_conf_id,
    normalize_author,
)

logger = logging.getLogger(__name__)

_AUTHOR_SPLIT_RE = re.compile(r",|\band\b")

_CATEGORY_TOKENS = {
    "acl-events": Category.ACL_EVENT,
    "non-acl-events": Category.NON_ACL_EVENT,
}


class PageKind(str, Enum):
    INDEX = "index"
    VENUE = "venue"
    PROCEEDINGS = "proceedings"
    PAPER = "paper"


@dataclass(frozen=True)
class ParseReport:
    """Outcome bookkeeping for one parsed page."""

    records_extracted: int
    warnings: tuple[str, ...]
    source_url: str


def classify_page(html: str, source_url: str = "") -> PageKind:
    """Classify a page by its structural markers.

    Raises:
        EmptyInput: if ``html`` is empty or whitespace-only.
        UnrecognizedPage: if no marker set matches.
    """
    if not html or not html.strip():
        raise EmptyInput("page body is empty")
    root = htmldoc.parse_html(html)
    if root.find(cls="venue-index") is not None:
        return PageKind.INDEX
    if root.find(cls="venue-page") is not None:
        return PageKind.VENUE
    if root.find(cls="proceedings-page") is not None:
        return PageKind.PROCEEDINGS
    if root.find(cls="paper-detail") is not None:
        return PageKind.PAPER
    raise UnrecognizedPage(f"no marker set matches {source_url or '<page>'}")


def _resolve(root: htmldoc.Node, href: str, base_url: str | None) -> str:
    base = htmldoc.base_href(root) or base_url
    return urljoin(base, href) if base else href


def parse_index(html: str, *, base_url: str | None = None
                ) -> list[tuple[Category, str, str]]:
    """Extract (category, venue_name, venue_url) tuples from the site index.

    Every venue link appears exactly once, in document order; duplicated
    links are dropped with a logged warning.

    Raises:
        StructureError: if neither category section is found.
    """
    root = htmldoc.parse_html(html)
    sections = root.find_all(cls="venue-index")
    if not sections:
        raise StructureError("index page has no category sections")
    out: list[tuple[Category, str, str]] = []
    seen: set[str] = set()
    for section in sections:
        token = section.attrs.get("data-category", "")
        category = _CATEGORY_TOKENS.get(token)
        if category is None:
            logger.warning("skipping category section with unknown token %r", token)
            continue
        for anchor in section.find_all(tag="a", cls="venue-link"):
            href = anchor.attrs.get("href")
            name = anchor.text()
            if not href or not name:
                logger.warning("skipping venue link without href or name")
                continue
            url = _resolve(root, href, base_url)
            if url in seen:
                logger.warning("dropping duplicate venue link %s", url)
                continue
            seen.add(url)
            out.append((category, name, url))
    return out


def parse_venue_page(html: str, category: Category, venue_key: str, *,
                     base_url: str | None = None) -> list[ConferenceRecord]:
    """Extract one ConferenceRecord per (year, proceedings link) pair.

    Every record starts with a pending crawl log, and its kind is
    ``conference`` regardless of how the page labels the event.

    Raises:
        StructureError: if no year-grouped proceedings links are found.
    """
    root = htmldoc.parse_html(html)
    section = root.find(cls="venue-page")
    records: list[ConferenceRecord] = []
    seen_years: set[int] = set()
    if section is not None:
        year: int | None = None
        for node in section.iter_nodes():
            if node.has_class("year-heading"):
                text = node.text()
                try:
                    year = int(text)
                except ValueError:
                    logger.warning("skipping non-numeric year heading %r", text)
                    year = None
            elif node.tag == "a" and node.has_class("proceedings-link"):
                if year is None:
                    logger.warning("skipping proceedings link outside a year group")
                    continue
                if year in seen_years:
                    logger.warning("dropping duplicate proceedings link for %s-%s",
                                   venue_key, year)
                    continue
                href = node.attrs.get("href")
                if not href:
                    continue
                seen_years.add(year)
                records.append(ConferenceRecord(
                    conf_id=make_conf_id(venue_key, year),
                    venue_key=venue_key,
                    year=year,
                    title=node.text(),
                    desc=_sibling_desc(section, node),
                    url=_resolve(root, href, base_url),
                    category=category,
                    crawl_log=CrawlLog(),
                ))
    if not records:
        raise StructureError(f"venue page for {venue_key!r} has no year-grouped links")
    return records


def _sibling_desc(section: htmldoc.Node, anchor: htmldoc.Node) -> str | None:
    """The event-desc span sharing a parent with the proceedings anchor."""
    for node in section.iter_nodes():
        if anchor in node.children:
            for sibling in node.children:
                if isinstance(sibling, htmldoc.Node) and sibling.has_class("event-desc"):
                    text = sibling.text()
                    return text or None
    return None


def anthology_id_from_url(url: str) -> str:
    """The paper identifier encoded as the final path segment of its URL."""
    path = urlparse(url).path
    segment = posixpath.basename(path.rstrip("/"))
    return segment


def _split_authors(span: htmldoc.Node) -> list[str]:
    linked = span.find_all(tag="a")
    if linked:
        return [a.text() for a in linked if a.text()]
    text = span.text()
    if not text:
        return []
    return [part.strip() for part in _AUTHOR_SPLIT_RE.split(text) if part.strip()]


def parse_proceedings(html: str, conference: ConferenceRecord, *,
                      base_url: str | None = None
                      ) -> tuple[ConContent, list[PaperRecord], ParseReport]:
    """Extract the papers listed on a proceedings page.

    Each entry yields one PaperRecord inheriting ``venue_key`` and ``year``
    from ``conference``.  Entries missing a title are skipped with a
    warning; missing abstracts, PDF links, or bibkeys leave those fields
    absent.  The returned ConContent carries the per-paper landing links
    and any pagination links for the next crawl hop.

    Raises:
        StructureError: if the paper-list container is absent.
    """
    root = htmldoc.parse_html(html)
    container = root.find(cls="paper-list")
    if container is None:
        raise StructureError(f"no paper-list container on {conference.conf_id}")

    warnings: list[str] = []
    papers: list[PaperRecord] = []
    landing_links: list[str] = []
    seen_ids: set[str] = set()

    for position, entry in enumerate(container.find_all(cls="paper-entry"), start=1):
        title_anchor = entry.find(tag="a", cls="paper-title")
        if title_anchor is None or not title_anchor.text():
            warnings.append(f"entry {position}: no title, skipped")
            continue
        href = title_anchor.attrs.get("href")
        if not href:
            warnings.append(f"entry {position}: title anchor has no href, skipped")
            continue
        page_url = _resolve(root, href, base_url)
        anthology_id = anthology_id_from_url(page_url)
        if not anthology_id:
            warnings.append(f"entry {position}: no id in {page_url}, skipped")
            continue
        if anthology_id in seen_ids:
            warnings.append(f"entry {position}: duplicate id {anthology_id}, skipped")
            continue

        author_span = entry.find(cls="paper-authors")
        authors = []
        if author_span is not None:
            for name in _split_authors(author_span):
                try:
                    authors.append(normalize_author(name))
                except EmptyInput:
                    continue

        abstract_node = entry.find(cls="paper-abstract")
        abstract = abstract_node.text() if abstract_node is not None else None
        if abstract == "":
            abstract = None
            warnings.append(f"entry {position}: empty abstract block")

        pdf_anchor = entry.find(tag="a", cls="pdf-link")
        pdf_url = None
        if pdf_anchor is not None and pdf_anchor.attrs.get("href"):
            pdf_url = _resolve(root, pdf_anchor.attrs["href"], base_url)

        bibkey_node = entry.find(cls="bibkey")
        bibkey = bibkey_node.text() if bibkey_node is not None else None

        seen_ids.add(anthology_id)
        landing_links.append(page_url)
        papers.append(PaperRecord(
            anthology_id=anthology_id,
            title=title_anchor.text(),
            authors=tuple(authors),
            venue_key=conference.venue_key,
            year=conference.year,
            page_url=page_url,
            pdf_url=pdf_url,
            abstract=abstract,
            bibkey=bibkey or None,
        ))

    next_links: list[str] = []
    nav = root.find(cls="pagination")
    if nav is not None:
        for anchor in nav.find_all(tag="a"):
            href = anchor.attrs.get("href")
            if href:
                next_links.append(_resolve(root, href, base_url))

    content = ConContent(
        conference=conference,
        paper_page_links=tuple(landing_links),
        next_page_links=tuple(next_links),
    )
    report = ParseReport(
        records_extracted=len(papers),
        warnings=tuple(warnings),
        source_url=conference.url,
    )
    return content, papers, report
