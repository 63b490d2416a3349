#!/usr/bin/env python3
"""Crawling against the scriptable mock server: retries, failure isolation,
and the politeness gate.

One page answers 503 twice before succeeding (the crawler retries with
backoff), another fails permanently (that task is recorded as failed
without disturbing the rest), and the request log shows every request
start spaced at least the politeness interval apart.
"""
from pathlib import Path

from anthology_harvest import (
    CrawlConfig,
    FetchPolicy,
    MockSource,
    StoreConfig,
    init_schema,
    run_crawl,
)
from anthology_harvest.mockserver import ScriptedCorpusServer

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
INTERVAL_MS = 25


def main():
    with ScriptedCorpusServer(FIXTURES) as server:
        server.script("/proceedings/acl-2022.html", [503, 503, 200])
        server.script("/proceedings/emnlp-2021.html", [500])
        print(f"mock server at {server.base_url}")

        handle = init_schema(StoreConfig(location=":memory:"))
        config = CrawlConfig(
            venues=("acl", "emnlp"),
            year_range=(2021, 2022),
            workers=4,
            policy=FetchPolicy(max_attempts=3, base_backoff_ms=50,
                               timeout_ms=5000, min_interval_ms=INTERVAL_MS),
            source=MockSource(endpoint=server.base_url),
        )
        report = run_crawl(config, handle)
        handle.close()

        print(f"\ntasks: {report.tasks_total}, stored: {report.tasks_succeeded}, "
              f"failed: {report.tasks_failed}")
        for conf_id, log in sorted(report.per_conference.items()):
            detail = log.last_error or f"{log.paper_count} papers"
            print(f"  {conf_id:12s} {log.status.value:7s} "
                  f"attempts={log.attempts}  {detail}")

        counts = server.request_counts()
        print("\nrequests per path:")
        for path, n in sorted(counts.items()):
            print(f"  {n}x {path}")

        stamps = sorted(e.timestamp_ns for e in server.request_log())
        gaps = [(b - a) / 1e6 for a, b in zip(stamps, stamps[1:])]
        print(f"\nsmallest gap between request starts: {min(gaps):.2f} ms "
              f"(politeness interval: {INTERVAL_MS} ms)")


if __name__ == "__main__":
    main()
