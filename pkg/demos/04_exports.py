#!/usr/bin/env python3
"""Serializing a PaperList: JSON lines, RFC-4180 CSV, and BibTeX."""
from pathlib import Path

from anthology_harvest import (
    CrawlConfig,
    FetchPolicy,
    FilterRule,
    FixtureSource,
    StoreConfig,
    filter_papers,
    init_schema,
    load_all_papers,
    run_crawl,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def main():
    handle = init_schema(StoreConfig(location=":memory:"))
    run_crawl(CrawlConfig(venues=(), year_range=(2019, 2023), workers=4,
                          policy=FetchPolicy(min_interval_ms=0),
                          source=FixtureSource(root=FIXTURES)), handle)
    papers = filter_papers(
        load_all_papers(handle),
        [FilterRule.keyword_all(["story generation"]),
         FilterRule.year_between(2021, 2023),
         FilterRule.venue_in(["acl", "emnlp", "naacl"]),
         FilterRule.keyword_any(["event", "persona", "coherence", "metrics"])])
    handle.close()

    print("=== JSON lines ===")
    print(papers.to_jsonl())
    print("=== CSV ===")
    print(papers.to_csv())
    print("=== BibTeX ===")
    print(papers.to_bibtex())


if __name__ == "__main__":
    main()
