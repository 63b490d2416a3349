#!/usr/bin/env python3
"""The chainable retriever: builder chains, rendered SQL, and execution.

Every call returns a new builder, so chains can be forked and reused.
"""
from pathlib import Path

from anthology_harvest import (
    CrawlConfig,
    FetchPolicy,
    FixtureSource,
    StoreConfig,
    hydrate_papers,
    init_schema,
    render_sql,
    run_crawl,
    table,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def main():
    handle = init_schema(StoreConfig(location=":memory:"))
    run_crawl(CrawlConfig(venues=(), year_range=(2019, 2023), workers=4,
                          policy=FetchPolicy(min_interval_ms=0),
                          source=FixtureSource(root=FIXTURES)), handle)

    # The canonical chained retrieval: two conjoined IN conditions.
    recent_top = (table("paper", handle)
                  .where({"year": ["in", [2021, 2022, 2023]]})
                  .where({"venue_key": ["in", ["acl", "emnlp", "naacl"]]}))
    print("SQL:", render_sql(recent_top.build()))
    rows = recent_top.query()
    print(f"rows: {len(rows)}\n")

    # Fork the chain: same prefix, two different suffixes.
    newest = recent_top.order("year", "desc").limit(3).query()
    count = recent_top.count().query()
    print(f"total matching: {count}; three newest:")
    for paper in hydrate_papers(newest):
        print(f"  {paper.year}  {paper.anthology_id}  {paper.title[:60]}")

    # Aggregates and grouping.
    print("\nper-venue paper counts:")
    for venue, n in table("paper", handle).group("venue_key").count().query():
        print(f"  {venue:8s} {n}")
    print("\nearliest year:", table("paper", handle).min("year").query())
    print("papers without an abstract:",
          table("paper", handle).where("abstract", "is_null").count().query())
    print("any TACL paper at all?",
          table("paper", handle).where("venue_key", "eq", "tacl").exists())
    handle.close()


if __name__ == "__main__":
    main()
