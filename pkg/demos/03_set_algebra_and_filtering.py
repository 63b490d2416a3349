#!/usr/bin/env python3
"""PaperList set algebra, rule-based filtering, and statistics.

Reproduces the bundled corpus's four-paper retrieval: recent story
generation work in the three major venues, narrowed by keyword rules.
"""
from pathlib import Path

from anthology_harvest import (
    CrawlConfig,
    FetchPolicy,
    FilterRule,
    FixtureSource,
    StoreConfig,
    complement,
    filter_papers,
    init_schema,
    intersect,
    load_all_papers,
    run_crawl,
    stats,
    union,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def main():
    handle = init_schema(StoreConfig(location=":memory:"))
    run_crawl(CrawlConfig(venues=(), year_range=(2019, 2023), workers=4,
                          policy=FetchPolicy(min_interval_ms=0),
                          source=FixtureSource(root=FIXTURES)), handle)
    everything = load_all_papers(handle)
    handle.close()
    print(f"universe: {len(everything)} papers")

    # Slice two overlapping subsets and combine them.
    recent = filter_papers(everything, [FilterRule.year_between(2022, 2023)])
    acl_only = filter_papers(everything, [FilterRule.venue_in(["acl"])])
    print(f"2022-2023: {len(recent)}, acl: {len(acl_only)}, "
          f"union: {len(union(recent, acl_only))}, "
          f"both: {len(intersect(recent, acl_only))}, "
          f"rest of corpus: {len(complement(union(recent, acl_only), everything))}")

    # The narrow search: all keyword + any keyword + venue + years.
    rules = [
        FilterRule.year_between(2021, 2023),
        FilterRule.venue_in(["acl", "emnlp", "naacl"]),
        FilterRule.keyword_all(["story generation"]),
        FilterRule.keyword_any(["event", "persona", "coherence", "metrics"]),
    ]
    hits = filter_papers(everything, rules)
    print(f"\nnarrow search result ({len(hits)} papers):")
    for paper in hits:
        print(f"  {paper.year}  {paper.title}")

    print("\ncounts by venue and year:")
    for venue, years in stats(everything, ["venue_key", "year"]).items():
        row = ", ".join(f"{year}: {n}" for year, n in years.items())
        print(f"  {venue:8s} {row}")


if __name__ == "__main__":
    main()
