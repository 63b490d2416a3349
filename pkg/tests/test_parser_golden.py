"""Manifest-driven golden suite: every fixture page parses to its expected
record count and every spot-check field matches byte-for-byte."""
import json
from pathlib import Path

import pytest

from anthology_harvest import Category, PageKind, classify_page, parse_index, parse_proceedings, parse_venue_page
from anthology_harvest.model import parse_conf_id
from conftest import FIXTURES, make_conference

_PAGE_PATHS = [
    p["path"]
    for p in json.loads((FIXTURES / "manifest.json").read_text())["pages"]
]

_CATEGORY_BY_VENUE = {
    "acl": Category.ACL_EVENT,
    "emnlp": Category.ACL_EVENT,
    "naacl": Category.ACL_EVENT,
    "coling": Category.NON_ACL_EVENT,
    "tacl": Category.NON_ACL_EVENT,
}


def field_as_string(record, field: str) -> str:
    """Manifest spot-check rendering: authors joined by '; ', None -> ''."""
    if field == "authors":
        return "; ".join(a.full for a in record.authors)
    value = getattr(record, field)
    return "" if value is None else str(value)


def run_golden_page(fixtures_root, page: dict) -> int:
    """Check one manifest page entry; returns the record count."""
    html = (fixtures_root / page["path"]).read_text(encoding="utf-8")
    kind = classify_page(html, page["path"])
    assert kind.value == page["kind"], page["path"]

    if kind is PageKind.INDEX:
        rows = parse_index(html)
        assert len(rows) == page["expected_records"], page["path"]
        return len(rows)

    if kind is PageKind.VENUE:
        venue_key = page["path"].split("/")[1].split(".")[0]
        records = parse_venue_page(html, _CATEGORY_BY_VENUE[venue_key], venue_key)
        assert len(records) == page["expected_records"], page["path"]
        return len(records)

    name = page["path"].split("/")[1].rsplit(".", 1)[0]
    venue_key, year = parse_conf_id(name)
    conf = make_conference(venue=venue_key, year=year,
                           category=_CATEGORY_BY_VENUE[venue_key])
    _, papers, report = parse_proceedings(html, conf)
    assert len(papers) == page["expected_records"], page["path"]
    assert report.records_extracted == len(papers)

    by_id = {p.anthology_id: p for p in papers}
    for check in page["spot_checks"]:
        record = by_id[check["anthology_id"]]
        actual = field_as_string(record, check["field"])
        assert actual == check["value"], (
            f"{page['path']} {check['anthology_id']}.{check['field']}: "
            f"{actual!r} != {check['value']!r}")
    return len(papers)


def test_manifest_covers_the_corpus(manifest):
    kinds = [p["kind"] for p in manifest["pages"]]
    assert kinds.count("index") == 1
    assert kinds.count("venue") == 5
    assert kinds.count("proceedings") == 25
    assert len(manifest["pages"]) >= 25


@pytest.mark.parametrize("path", _PAGE_PATHS)
def test_golden_page(fixtures_root, manifest, path):
    page = next(p for p in manifest["pages"] if p["path"] == path)
    run_golden_page(fixtures_root, page)
