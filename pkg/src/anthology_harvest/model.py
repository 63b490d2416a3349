"""Domain records and the canonicalization rules shared by every module.

All types here are immutable value objects: once constructed they are safe
to share between concurrent workers without synchronization.  Identity of a
paper is its ``anthology_id``; identity of a conference is its ``conf_id``
(``"<venue_key>-<year>"``).
"""
from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from urllib.parse import urlparse

from .errors import EmptyInput

VENUE_KEY_RE = re.compile(r"^[a-z0-9_-]+$")
YEAR_MIN = 1950
YEAR_MAX = 2100

_WS_RE = re.compile(r"\s+")
_NON_TOKEN_RE = re.compile(r"[^a-z0-9]+")


class Category(str, Enum):
    """Top-level grouping of venues on the site index."""

    ACL_EVENT = "acl_event"
    NON_ACL_EVENT = "non_acl_event"


class Kind(str, Enum):
    """Publication format.

    Journals, tutorials, and workshops are all recorded under the single
    kind ``conference``: the venues share one web structure, so the crawler
    treats every publication format uniformly.
    """

    CONFERENCE = "conference"


class CrawlStatus(str, Enum):
    PENDING = "pending"
    FETCHING = "fetching"
    PARSED = "parsed"
    STORED = "stored"
    FAILED = "failed"


def _strip_diacritics(text: str) -> str:
    # Compatibility decomposition, then drop combining marks: deterministic
    # and locale-independent.
    decomposed = unicodedata.normalize("NFKD", text)
    return "".join(ch for ch in decomposed if not unicodedata.combining(ch))


def canonical_venue(raw: str) -> str:
    """Collapse a printed venue name to its canonical lowercase token.

    Casefolds, strips diacritics, and replaces every run of whitespace or
    punctuation with ``-``.  Idempotent on its own output.

    Raises:
        EmptyInput: if ``raw`` is empty or no token characters survive.
    """
    if not raw or not raw.strip():
        raise EmptyInput("venue name is empty")
    folded = _strip_diacritics(raw.strip()).casefold()
    token = _NON_TOKEN_RE.sub("-", folded).strip("-")
    if not token:
        raise EmptyInput(f"no token characters in venue name {raw!r}")
    return token


@dataclass(frozen=True, slots=True)
class AuthorName:
    """An author as printed, plus the normalized form used for matching."""

    full: str
    normalized: str


def normalize_author(full: str) -> AuthorName:
    """Build an AuthorName from the display form.

    ``normalized`` is a pure function of ``full``:
    casefold(strip_diacritics(collapse_whitespace(trim(full)))).

    Raises:
        EmptyInput: if ``full`` is empty after trimming.
    """
    trimmed = full.strip() if full else ""
    if not trimmed:
        raise EmptyInput("author name is empty")
    collapsed = _WS_RE.sub(" ", trimmed)
    # Compatibility decomposition can itself introduce whitespace (e.g. a
    # spacing macron decomposes to space + combining mark), so collapse again.
    normalized = _WS_RE.sub(" ", _strip_diacritics(collapsed).casefold()).strip()
    return AuthorName(full=collapsed, normalized=normalized)


def is_absolute_url(url: str) -> bool:
    parts = urlparse(url)
    return parts.scheme in ("http", "https") and bool(parts.netloc)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ValueError(message)


@dataclass(frozen=True, slots=True)
class PaperRecord:
    """One publication: the data unit recorded for literature retrieval.

    Two PaperRecords are the *same paper* for set purposes iff their
    ``anthology_id`` values are equal; dataclass equality stays full-field so
    round-trip tests can compare records exactly.
    """

    anthology_id: str
    title: str
    authors: tuple[AuthorName, ...]
    venue_key: str
    year: int
    page_url: str
    pdf_url: str | None = None
    abstract: str | None = None
    bibkey: str | None = None

    def __post_init__(self) -> None:
        _require(bool(self.anthology_id), "anthology_id must be non-empty")
        _require(bool(self.title), "title must be non-empty")
        _require(
            VENUE_KEY_RE.match(self.venue_key) is not None,
            f"venue_key {self.venue_key!r} must match [a-z0-9_-]+",
        )
        _require(
            YEAR_MIN <= self.year <= YEAR_MAX,
            f"year {self.year} outside [{YEAR_MIN}, {YEAR_MAX}]",
        )
        _require(is_absolute_url(self.page_url), f"page_url {self.page_url!r} must be absolute")
        if self.pdf_url is not None:
            _require(is_absolute_url(self.pdf_url), f"pdf_url {self.pdf_url!r} must be absolute")


@dataclass(frozen=True, slots=True)
class CrawlLog:
    """Bookkeeping recorded while crawling one conference."""

    status: CrawlStatus = CrawlStatus.PENDING
    attempts: int = 0
    last_error: str | None = None
    fetched_at: str | None = None  # UTC ISO-8601
    paper_count: int | None = None

    def __post_init__(self) -> None:
        _require(self.attempts >= 0, "attempts must be non-negative")
        if self.status is CrawlStatus.STORED:
            _require(self.paper_count is not None, "stored log needs paper_count")
        if self.status is CrawlStatus.FAILED:
            _require(bool(self.last_error), "failed log needs last_error")
        if self.status is not CrawlStatus.PENDING:
            _require(self.attempts >= 1, "non-pending log needs attempts >= 1")
        if self.paper_count is not None:
            _require(self.paper_count >= 0, "paper_count must be non-negative")


@dataclass(frozen=True, slots=True)
class ConferenceRecord:
    """One event entry (venue x year) acting as a crawl index unit."""

    conf_id: str
    venue_key: str
    year: int
    title: str
    url: str
    category: Category
    desc: str | None = None
    kind: Kind = Kind.CONFERENCE
    crawl_log: CrawlLog = field(default_factory=CrawlLog)

    def __post_init__(self) -> None:
        _require(
            VENUE_KEY_RE.match(self.venue_key) is not None,
            f"venue_key {self.venue_key!r} must match [a-z0-9_-]+",
        )
        _require(
            YEAR_MIN <= self.year <= YEAR_MAX,
            f"year {self.year} outside [{YEAR_MIN}, {YEAR_MAX}]",
        )
        _require(
            self.conf_id == make_conf_id(self.venue_key, self.year),
            f"conf_id {self.conf_id!r} != {self.venue_key}-{self.year}",
        )
        _require(bool(self.title), "title must be non-empty")
        _require(is_absolute_url(self.url), f"url {self.url!r} must be absolute")


@dataclass(frozen=True, slots=True)
class ConContent:
    """Transient crawl-hop payload: links discovered on a proceedings page.

    Never persisted -- the store has no operation accepting it.  It only
    carries what the next crawl hop needs.
    """

    conference: ConferenceRecord
    paper_page_links: tuple[str, ...]
    next_page_links: tuple[str, ...] = ()


def make_conf_id(venue_key: str, year: int) -> str:
    return f"{venue_key}-{year}"


def parse_conf_id(conf_id: str) -> tuple[str, int]:
    """Recover (venue_key, year) from a conf_id; exact round-trip."""
    venue_key, _, year_text = conf_id.rpartition("-")
    if not venue_key or not year_text.isdigit():
        raise ValueError(f"malformed conf_id {conf_id!r}")
    return venue_key, int(year_text)
