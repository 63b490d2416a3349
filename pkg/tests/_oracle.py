"""Brute-force reference engine for query results.

Evaluates a QueryAst over plain dict rows entirely in Python, independent
of the SQL path: its own record->row mapping, its own LIKE matcher, its own
three-valued comparison handling, and its own ordering/pagination.  Tests
compare execute() output against this engine exactly.
"""
from __future__ import annotations

import json

from anthology_harvest.model import PaperRecord
from anthology_harvest.query import Condition, ConditionGroup, QueryAst

PK = {"paper": "anthology_id", "conference": "conf_id"}
ALL_COLUMNS = {
    "paper": ("anthology_id", "title", "authors", "authors_normalized",
              "venue_key", "year", "page_url", "pdf_url", "abstract", "bibkey"),
}


def paper_row(rec: PaperRecord) -> dict:
    """Independent record->row mapping mirroring the documented schema."""
    return {
        "anthology_id": rec.anthology_id,
        "title": rec.title,
        "authors": json.dumps([a.full for a in rec.authors], ensure_ascii=False),
        "authors_normalized": " | ".join(a.normalized for a in rec.authors),
        "venue_key": rec.venue_key,
        "year": rec.year,
        "page_url": rec.page_url,
        "pdf_url": rec.pdf_url,
        "abstract": rec.abstract,
        "bibkey": rec.bibkey,
    }


def like_match(pattern: str, value: str) -> bool:
    """%/_ wildcard matching, case-insensitive, via dynamic programming."""
    p = pattern.casefold()
    v = value.casefold()

    # dp[i] = True if p[:i] matches some prefix; walk value chars.
    prev = [True] + [False] * len(p)
    for i in range(1, len(p) + 1):
        prev[i] = prev[i - 1] and p[i - 1] == "%"
    for ch in v:
        cur = [False] * (len(p) + 1)
        for i in range(1, len(p) + 1):
            pc = p[i - 1]
            if pc == "%":
                cur[i] = cur[i - 1] or prev[i]
            elif pc == "_" or pc == ch:
                cur[i] = prev[i - 1]
        prev = cur
    return prev[len(p)]


def cond_matches(row: dict, cond: Condition) -> bool:
    value = row.get(cond.column)
    if cond.op == "is_null":
        return value is None
    if cond.op == "is_not_null":
        return value is not None
    if value is None:
        return False  # SQL three-valued logic: NULL never satisfies these
    if cond.op == "eq":
        return value == cond.value
    if cond.op == "neq":
        return value != cond.value
    if cond.op == "gt":
        return value > cond.value
    if cond.op == "gte":
        return value >= cond.value
    if cond.op == "lt":
        return value < cond.value
    if cond.op == "lte":
        return value <= cond.value
    if cond.op == "in":
        return value in cond.value
    if cond.op == "not_in":
        return value not in cond.value
    if cond.op == "like":
        return like_match(str(cond.value), str(value))
    if cond.op == "between":
        low, high = cond.value
        return low <= value <= high
    raise AssertionError(f"unhandled op {cond.op}")


def _item_matches(row: dict, item) -> bool:
    if isinstance(item, ConditionGroup):
        results = [cond_matches(row, c) for c in item.conditions]
        return all(results) if item.joiner == "and" else any(results)
    return cond_matches(row, item)


def where_matches(row: dict, terms) -> bool:
    """AND binds tighter than OR: the terms form an OR of AND-chains."""
    if not terms:
        return True
    chains: list[list] = [[]]
    for connector, item in terms:
        if connector == "or" and chains[-1]:
            chains.append([])
        chains[-1].append(item)
    return any(all(_item_matches(row, item) for item in chain) for chain in chains)


def _sort_rows(rows: list[dict], pairs: list[tuple[str, str]]) -> list[dict]:
    out = list(rows)
    for column, direction in reversed(pairs):
        def key(row, c=column):
            v = row.get(c)
            return (v is not None, 0 if v is None else v)
        out.sort(key=key, reverse=(direction == "desc"))
    return out


def _ordering(ast: QueryAst) -> list[tuple[str, str]]:
    pairs = list(ast.order_by)
    named = {c for c, _ in pairs}
    if ast.group_by is not None:
        tail = ast.group_by
    elif ast.distinct:
        tail = ast.projection or ALL_COLUMNS[ast.source]
    else:
        tail = (PK[ast.source],)
    pairs += [(c, "asc") for c in tail if c not in named]
    return pairs


def _aggregate(values: list, fn: str):
    if fn == "count":
        return len(values)
    if fn == "distinct_count":
        return len(set(values))
    if not values:
        return None
    if fn == "min":
        return min(values)
    if fn == "max":
        return max(values)
    if fn == "sum":
        return sum(values)
    if fn == "avg":
        return sum(values) / len(values)
    raise AssertionError(f"unhandled aggregate {fn}")


def _agg_over(rows: list[dict], aggregate: tuple[str, str | None]):
    fn, column = aggregate
    if fn == "count" and column is None:
        return len(rows)
    values = [r.get(column) for r in rows if r.get(column) is not None]
    return _aggregate(values, fn)


def _paginate(rows: list, ast: QueryAst) -> list:
    start = ast.offset or 0
    if ast.limit is not None:
        return rows[start:start + ast.limit]
    return rows[start:]


def eval_ast(rows: list[dict], ast: QueryAst):
    """Mirror of execute(): scalar, grouped tuples, or dict rows."""
    kept = [r for r in rows if where_matches(r, ast.conditions)]

    if ast.group_by is not None:
        buckets: dict[tuple, list[dict]] = {}
        for row in kept:
            key = tuple(row.get(c) for c in ast.group_by)
            buckets.setdefault(key, []).append(row)
        if ast.having is not None:
            min_rows = {}
            filtered = {}
            for key, group in buckets.items():
                if ast.having.column == "count":
                    probe = {"count": len(group)}
                    if cond_matches(probe, Condition("count", ast.having.op,
                                                     ast.having.value)):
                        filtered[key] = group
                else:
                    probe = {ast.having.column: key[ast.group_by.index(ast.having.column)]}
                    if cond_matches(probe, ast.having):
                        filtered[key] = group
            buckets = filtered
        group_rows = []
        for key, group in buckets.items():
            row = dict(zip(ast.group_by, key))
            if ast.aggregate is not None:
                row["__agg__"] = _agg_over(group, ast.aggregate)
            group_rows.append(row)
        ordered = _sort_rows(group_rows, _ordering(ast))
        ordered = _paginate(ordered, ast)
        out = []
        for row in ordered:
            values = [row[c] for c in ast.group_by]
            if ast.aggregate is not None:
                values.append(row["__agg__"])
            out.append(tuple(values))
        return out

    if ast.aggregate is not None:
        return _agg_over(kept, ast.aggregate)

    ordered = _sort_rows(kept, _ordering(ast))
    columns = ast.projection or ALL_COLUMNS[ast.source]
    projected = [{c: r.get(c) for c in columns} for r in ordered]
    if ast.distinct:
        seen = set()
        deduped = []
        for row in projected:
            key = tuple(row[c] for c in columns)
            if key not in seen:
                seen.add(key)
                deduped.append(row)
        projected = _sort_rows(deduped, _ordering(ast))
    return _paginate(projected, ast)
