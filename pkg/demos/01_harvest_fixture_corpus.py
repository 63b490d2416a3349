#!/usr/bin/env python3
"""Harvest the bundled fixture corpus into a temporary database.

Walks the whole pipeline: discover the venue index, plan one task per
conference, run the worker pool, and persist everything.  Progress lines
(`<conf_id> <status> <papers> <ms>`) stream to stderr while it runs.
"""
import tempfile
from pathlib import Path

from anthology_harvest import (
    CrawlConfig,
    FetchPolicy,
    FixtureSource,
    StoreConfig,
    init_schema,
    load_all_papers,
    run_crawl,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def main():
    workdir = Path(tempfile.mkdtemp(prefix="anthology-demo-"))
    print(f"database directory: {workdir}")

    handle = init_schema(StoreConfig(location=str(workdir)))
    config = CrawlConfig(
        venues=("acl", "emnlp", "naacl"),
        year_range=(2021, 2023),
        workers=4,
        policy=FetchPolicy(min_interval_ms=0),
        source=FixtureSource(root=FIXTURES),
    )
    report = run_crawl(config, handle)

    print(f"\ntasks: {report.tasks_total}, stored: {report.tasks_succeeded}, "
          f"failed: {report.tasks_failed}, papers: {report.papers_stored}, "
          f"wall: {report.wall_ms} ms")

    papers = load_all_papers(handle)
    print(f"\nfirst five of {len(papers)} stored papers:")
    for paper in list(papers)[:5]:
        authors = ", ".join(a.full for a in paper.authors) or "(no authors)"
        print(f"  {paper.anthology_id}  {paper.title}")
        print(f"      {authors}")
    handle.close()


if __name__ == "__main__":
    main()
