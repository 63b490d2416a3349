"""SQLite-backed persistence for the two-table conference/paper schema.

The store is defined against plain standard SQL so another relational
backend can sit behind the same interface; the embedded SQLite
implementation keeps tests hermetic.  All mutations go through one
serialized write path (a lock around a single connection), which is the
synchronization contract the crawler relies on; readers see consistent
snapshots.

Authors are stored as an ordered JSON array in one column plus a normalized
concatenation column used for matching -- two tables only, no join table.
Timestamps are UTC ISO-8601 strings.
"""
from __future__ import annotations

import json
import re
import sqlite3
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import DuplicateInBatch, StoreUnavailable
from .model import (
    Category,
    ConferenceRecord,
    CrawlLog,
    CrawlStatus,
    Kind,
    PaperRecord,
    normalize_author,
)
from .paperlist import PaperList

DDL_CONFERENCE = """\
CREATE TABLE IF NOT EXISTS conference (
  conf_id TEXT PRIMARY KEY,
  venue_key TEXT NOT NULL,
  year INTEGER NOT NULL,
  title TEXT NOT NULL,
  "desc" TEXT,
  url TEXT NOT NULL,
  category TEXT NOT NULL,
  kind TEXT NOT NULL,
  status TEXT NOT NULL,
  attempts INTEGER NOT NULL,
  last_error TEXT,
  fetched_at TEXT,
  paper_count INTEGER
)"""

DDL_PAPER = """\
CREATE TABLE IF NOT EXISTS paper (
  anthology_id TEXT PRIMARY KEY,
  title TEXT NOT NULL,
  authors TEXT NOT NULL,
  authors_normalized TEXT NOT NULL,
  venue_key TEXT NOT NULL,
  year INTEGER NOT NULL,
  page_url TEXT NOT NULL,
  pdf_url TEXT,
  abstract TEXT,
  bibkey TEXT
)"""

PAPER_COLUMNS = (
    "anthology_id", "title", "authors", "authors_normalized", "venue_key",
    "year", "page_url", "pdf_url", "abstract", "bibkey",
)
CONFERENCE_COLUMNS = (
    "conf_id", "venue_key", "year", "title", "desc", "url", "category",
    "kind", "status", "attempts", "last_error", "fetched_at", "paper_count",
)
INT_COLUMNS = {"year", "attempts", "paper_count"}
PRIMARY_KEYS = {"paper": "anthology_id", "conference": "conf_id"}
TABLE_COLUMNS = {"paper": PAPER_COLUMNS, "conference": CONFERENCE_COLUMNS}


@dataclass(frozen=True)
class StoreConfig:
    """Where the relational store lives.

    ``location`` may be ``:memory:``, a database file path, or a directory
    (the file is then ``<location>/<database_name>.db``).
    """

    database_name: str = "aclanthology"
    location: str = "."

    def __post_init__(self) -> None:
        if not self.database_name:
            raise ValueError("database_name must be non-empty")

    def database_path(self) -> str:
        if self.location == ":memory:":
            return ":memory:"
        loc = Path(self.location)
        if loc.suffix in (".db", ".sqlite", ".sqlite3"):
            return str(loc)
        return str(loc / f"{self.database_name}.db")


def _like_casefold(pattern, value) -> bool:
    """LIKE with %/_ wildcards, case-insensitive via Unicode casefold.

    Registered as SQLite's LIKE implementation so the rendered SQL stays
    standard while matching semantics stay identical to the in-memory
    reference used by the tests.
    """
    if pattern is None or value is None:
        return False
    regex = []
    for ch in str(pattern).casefold():
        if ch == "%":
            regex.append(".*")
        elif ch == "_":
            regex.append(".")
        else:
            regex.append(re.escape(ch))
    return re.fullmatch("".join(regex), str(value).casefold(), re.DOTALL) is not None


class Store:
    """Handle over one open database; create via init_schema()."""

    def __init__(self, conn: sqlite3.Connection, path: str):
        self._conn = conn
        self._lock = threading.RLock()
        self.path = path
        self._closed = False

    def close(self) -> None:
        with self._lock:
            if not self._closed:
                self._conn.close()
                self._closed = True

    def __enter__(self) -> "Store":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _check_open(self) -> None:
        if self._closed:
            raise StoreUnavailable(f"store at {self.path} is closed")

    def execute_sql(self, sql: str, params: Sequence = ()) -> list[dict]:
        """Run one read query; rows come back as column->value dicts."""
        with self._lock:
            self._check_open()
            try:
                cur = self._conn.execute(sql, tuple(params))
                rows = cur.fetchall()
            except sqlite3.Error as exc:
                raise StoreUnavailable(f"query failed: {exc}") from exc
        return [dict(row) for row in rows]

    def execute_scalar(self, sql: str, params: Sequence = ()):
        with self._lock:
            self._check_open()
            try:
                row = self._conn.execute(sql, tuple(params)).fetchone()
            except sqlite3.Error as exc:
                raise StoreUnavailable(f"query failed: {exc}") from exc
        return None if row is None else row[0]

    def execute_tuples(self, sql: str, params: Sequence = ()) -> list[tuple]:
        with self._lock:
            self._check_open()
            try:
                return [tuple(r) for r in self._conn.execute(sql, tuple(params))]
            except sqlite3.Error as exc:
                raise StoreUnavailable(f"query failed: {exc}") from exc

    # -- write path (serialized) --------------------------------------------

    def _write_batch(self, statements: Iterable[tuple[str, Sequence]]) -> None:
        """Apply statements in one transaction: all or nothing."""
        with self._lock:
            self._check_open()
            try:
                self._conn.execute("BEGIN IMMEDIATE")
            except sqlite3.Error as exc:
                raise StoreUnavailable(f"cannot begin transaction: {exc}") from exc
            try:
                for sql, params in statements:
                    self._conn.execute(sql, tuple(params))
            except Exception:
                self._conn.execute("ROLLBACK")
                raise
            self._conn.execute("COMMIT")


def init_schema(cfg: StoreConfig) -> Store:
    """Open (creating if needed) the database and ensure both tables exist.

    Idempotent: a second call on the same location is a no-op that
    preserves data.

    Raises:
        StoreUnavailable: if the location cannot be opened.
    """
    path = cfg.database_path()
    try:
        conn = sqlite3.connect(path, check_same_thread=False)
    except sqlite3.Error as exc:
        raise StoreUnavailable(f"cannot open database at {path}: {exc}") from exc
    conn.row_factory = sqlite3.Row
    conn.isolation_level = None  # explicit transaction control
    conn.create_function("like", 2, _like_casefold, deterministic=True)
    try:
        conn.execute(DDL_CONFERENCE)
        conn.execute(DDL_PAPER)
    except sqlite3.Error as exc:
        conn.close()
        raise StoreUnavailable(f"cannot create schema at {path}: {exc}") from exc
    return Store(conn, path)


def _conference_row(rec: ConferenceRecord) -> tuple:
    log = rec.crawl_log
    return (
        rec.conf_id, rec.venue_key, rec.year, rec.title, rec.desc, rec.url,
        rec.category.value, rec.kind.value, log.status.value, log.attempts,
        log.last_error, log.fetched_at, log.paper_count,
    )


def _paper_row(rec: PaperRecord) -> tuple:
    return (
        rec.anthology_id,
        rec.title,
        json.dumps([a.full for a in rec.authors], ensure_ascii=False),
        " | ".join(a.normalized for a in rec.authors),
        rec.venue_key,
        rec.year,
        rec.page_url,
        rec.pdf_url,
        rec.abstract,
        rec.bibkey,
    )


_CONFERENCE_UPSERT = (
    'INSERT OR REPLACE INTO conference (conf_id, venue_key, year, title, "desc", url, '
    "category, kind, status, attempts, last_error, fetched_at, paper_count) "
    "VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)"
)
_PAPER_UPSERT = (
    "INSERT OR REPLACE INTO paper (anthology_id, title, authors, authors_normalized, "
    "venue_key, year, page_url, pdf_url, abstract, bibkey) "
    "VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?)"
)


def upsert_conference(h: Store, rec: ConferenceRecord) -> str:
    """Insert or replace the row keyed by conf_id; returns 'inserted'/'updated'."""
    existing = h.execute_scalar("SELECT COUNT(*) FROM conference WHERE conf_id = ?",
                                (rec.conf_id,))
    h._write_batch([(_CONFERENCE_UPSERT, _conference_row(rec))])
    return "updated" if existing else "inserted"


def _check_batch_ids(recs: Sequence[PaperRecord]) -> None:
    ids = [r.anthology_id for r in recs]
    if len(ids) != len(set(ids)):
        dupes = sorted({i for i in ids if ids.count(i) > 1})
        raise DuplicateInBatch(f"duplicate anthology_id in batch: {dupes}")


def _count_existing(h: Store, ids: Sequence[str]) -> int:
    if not ids:
        return 0
    placeholders = ", ".join("?" for _ in ids)
    return h.execute_scalar(
        f"SELECT COUNT(*) FROM paper WHERE anthology_id IN ({placeholders})", ids)


def upsert_papers(h: Store, recs: Sequence[PaperRecord]) -> tuple[int, int]:
    """Write a batch of papers atomically; returns (inserted, updated).

    Either every row reflects its record or none does.

    Raises:
        DuplicateInBatch: two records share an anthology_id; nothing written.
    """
    recs = list(recs)
    _check_batch_ids(recs)
    existing = _count_existing(h, [r.anthology_id for r in recs])
    h._write_batch((_PAPER_UPSERT, _paper_row(r)) for r in recs)
    return len(recs) - existing, existing


def upsert_crawl_batch(h: Store, conference: ConferenceRecord,
                       papers: Sequence[PaperRecord]) -> tuple[int, int]:
    """One crawl task's writes -- conference row plus its papers -- in a
    single atomic transaction."""
    papers = list(papers)
    _check_batch_ids(papers)
    existing = _count_existing(h, [p.anthology_id for p in papers])
    statements = [(_CONFERENCE_UPSERT, _conference_row(conference))]
    statements += [(_PAPER_UPSERT, _paper_row(p)) for p in papers]
    h._write_batch(statements)
    return len(papers) - existing, existing


def paper_from_row(row: Mapping) -> PaperRecord:
    """Hydrate one paper row; authors re-normalize from their display forms."""
    return PaperRecord(
        anthology_id=row["anthology_id"],
        title=row["title"],
        authors=tuple(normalize_author(a) for a in json.loads(row["authors"])),
        venue_key=row["venue_key"],
        year=row["year"],
        page_url=row["page_url"],
        pdf_url=row["pdf_url"],
        abstract=row["abstract"],
        bibkey=row["bibkey"],
    )


def conference_from_row(row: Mapping) -> ConferenceRecord:
    return ConferenceRecord(
        conf_id=row["conf_id"],
        venue_key=row["venue_key"],
        year=row["year"],
        title=row["title"],
        desc=row["desc"],
        url=row["url"],
        category=Category(row["category"]),
        kind=Kind(row["kind"]),
        crawl_log=CrawlLog(
            status=CrawlStatus(row["status"]),
            attempts=row["attempts"],
            last_error=row["last_error"],
            fetched_at=row["fetched_at"],
            paper_count=row["paper_count"],
        ),
    )


def load_all_papers(h: Store) -> PaperList:
    """Every stored paper, in (year, venue_key, anthology_id) order."""
    rows = h.execute_sql(
        "SELECT * FROM paper ORDER BY year, venue_key, anthology_id")
    return PaperList(items=tuple(paper_from_row(r) for r in rows))


def load_all_conferences(h: Store) -> list[ConferenceRecord]:
    rows = h.execute_sql("SELECT * FROM conference ORDER BY venue_key, year")
    return [conference_from_row(r) for r in rows]
