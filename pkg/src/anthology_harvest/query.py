"""The retriever: a chainable query builder over the relational store.

A chain starts at ``table()`` and every subsequent call returns a *new*
builder value, so a prefix can be reused for several different suffixes.
``build()`` normalizes the chain into a QueryAst; ``render_sql()`` turns an
AST into deterministic standard SQL with positional placeholders; and
``execute()`` runs it, returning rows for plain selects, tuples for grouped
selects, or a scalar for bare aggregates.

Builder operations: table, where, or_where, and_group, or_group, field,
group, having, order, limit, offset, distinct, count, min, max, avg, sum,
distinct_count, build, query, find_one, exists.

Conditions accept two spellings::

    .where("year", "in", [2021, 2022])      # column, op, value
    .where({"year": ["in", [2021, 2022]]})  # mapping form
    .where({"venue_key": "acl"})            # bare value means eq

Determinism: executed row order always ends with the primary key ascending
as a final tiebreaker (grouped queries tiebreak on the group tuple,
distinct queries on the projected tuple), so pagination is repeatable.
``render_sql`` itself renders the AST verbatim, without the implicit
tiebreaker.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Mapping, Sequence, Union

from .errors import BadArity, InvalidChain, MissingColumn, UnknownColumn
from .paperlist import PaperList
from .store import PAPER_COLUMNS, PRIMARY_KEYS, TABLE_COLUMNS, Store, paper_from_row

OPS = ("eq", "neq", "gt", "gte", "lt", "lte", "in", "not_in", "like",
       "between", "is_null", "is_not_null")

_OP_SQL = {
    "eq": "=", "neq": "!=", "gt": ">", "gte": ">=", "lt": "<", "lte": "<=",
}

AGGREGATES = ("count", "min", "max", "avg", "sum", "distinct_count")

# Identifiers that collide with SQL keywords get quoted when rendered.
_RESERVED_IDENTIFIERS = {"desc"}

COUNT_PSEUDO_COLUMN = "count"


def _ident(name: str) -> str:
    return f'"{name}"' if name in _RESERVED_IDENTIFIERS else name


@dataclass(frozen=True)
class Condition:
    column: str
    op: str
    value: Any = None

    def __post_init__(self) -> None:
        if self.op not in OPS:
            raise BadArity(f"unknown operator {self.op!r}; pick from {list(OPS)}")
        if self.op in ("in", "not_in"):
            if not isinstance(self.value, (list, tuple)) or len(self.value) == 0:
                raise BadArity(f"{self.op} needs a non-empty list")
        elif self.op == "between":
            ok = isinstance(self.value, (list, tuple)) and len(self.value) == 2
            if not ok:
                raise BadArity("between needs a (low, high) pair")
            low, high = self.value
            if low > high:
                raise BadArity(f"between pair must be ordered, got ({low!r}, {high!r})")
        elif self.op in ("is_null", "is_not_null"):
            if self.value is not None:
                raise BadArity(f"{self.op} takes no value")
        elif self.value is None or isinstance(self.value, (list, tuple)):
            raise BadArity(f"{self.op} needs a single scalar value")


@dataclass(frozen=True)
class ConditionGroup:
    """Parenthesized conditions joined by one connective."""

    joiner: str  # "and" | "or"
    conditions: tuple[Condition, ...]

    def __post_init__(self) -> None:
        if self.joiner not in ("and", "or"):
            raise InvalidChain(f"group joiner must be and/or, got {self.joiner!r}")
        if not self.conditions:
            raise InvalidChain("condition group must be non-empty")


WhereItem = Union[Condition, ConditionGroup]
# (connector, item); the first connector is ignored when rendering.
WhereTerm = tuple[str, WhereItem]


@dataclass(frozen=True)
class QueryAst:
    """Normalized representation of one chainable query."""

    source: str
    conditions: tuple[WhereTerm, ...] = ()
    group_by: tuple[str, ...] | None = None
    having: Condition | None = None
    order_by: tuple[tuple[str, str], ...] = ()
    limit: int | None = None
    offset: int | None = None
    projection: tuple[str, ...] | None = None
    aggregate: tuple[str, str | None] | None = None
    distinct: bool = False


def _coerce_conditions(args: tuple, kwargs: Mapping[str, Any]) -> list[Condition]:
    """Accept ('col', 'op', value), ('col', value), or a mapping form."""
    if kwargs:
        raise BadArity("conditions are positional; use where('col', 'op', value)")
    if len(args) == 1 and isinstance(args[0], Condition):
        return [args[0]]
    if (len(args) == 1 and isinstance(args[0], (list, tuple))
            and 2 <= len(args[0]) <= 3 and isinstance(args[0][0], str)):
        return _coerce_conditions(tuple(args[0]), {})
    if len(args) == 1 and isinstance(args[0], Mapping):
        out = []
        for column, spec in args[0].items():
            if isinstance(spec, (list, tuple)) and len(spec) == 2 and spec[0] in OPS:
                out.append(Condition(column, spec[0], spec[1]))
            else:
                out.append(Condition(column, "eq", spec))
        if not out:
            raise BadArity("empty condition mapping")
        return out
    if len(args) == 3:
        return [Condition(args[0], args[1], args[2])]
    if len(args) == 2:
        column, value = args
        if value in ("is_null", "is_not_null"):
            return [Condition(column, value)]
        return [Condition(column, "eq", value)]
    raise BadArity(f"cannot build a condition from {args!r}")


@dataclass(frozen=True)
class Builder:
    """Immutable chainable builder; start with .table()."""

    handle: Store | None = None
    _source: str | None = None
    _conditions: tuple[WhereTerm, ...] = ()
    _group_by: tuple[str, ...] | None = None
    _having: Condition | None = None
    _order_by: tuple[tuple[str, str], ...] = ()
    _limit: int | None = None
    _offset: int | None = None
    _projection: tuple[str, ...] | None = None
    _aggregate: tuple[str, str | None] | None = None
    _distinct: bool = False

    # -- chain entry ---------------------------------------------------------

    def table(self, source: str) -> "Builder":
        if source not in TABLE_COLUMNS:
            raise UnknownColumn(f"unknown table {source!r}; pick from {sorted(TABLE_COLUMNS)}")
        return replace(self, _source=source)

    def _require_table(self) -> str:
        if self._source is None:
            raise InvalidChain("call table() first")
        return self._source

    def _check_column(self, column: str) -> None:
        if column not in TABLE_COLUMNS[self._require_table()]:
            raise UnknownColumn(
                f"column {column!r} not in table {self._source!r}")

    def _checked(self, conds: Iterable[Condition]) -> tuple[Condition, ...]:
        conds = tuple(conds)
        for cond in conds:
            self._check_column(cond.column)
        return conds

    # -- conditions ----------------------------------------------------------

    def where(self, *args, **kwargs) -> "Builder":
        """Conjoin one or more conditions (repeated calls AND together)."""
        terms = tuple(("and", c) for c in self._checked(_coerce_conditions(args, kwargs)))
        return replace(self, _conditions=self._conditions + terms)

    def or_where(self, *args, **kwargs) -> "Builder":
        """Attach one or more conditions with OR."""
        terms = tuple(("or", c) for c in self._checked(_coerce_conditions(args, kwargs)))
        return replace(self, _conditions=self._conditions + terms)

    def _group_terms(self, connector: str, joiner: str, specs: Iterable) -> "Builder":
        conds: list[Condition] = []
        for spec in specs:
            conds.extend(_coerce_conditions((spec,), {}))
        group = ConditionGroup(joiner=joiner, conditions=self._checked(conds))
        return replace(self, _conditions=self._conditions + ((connector, group),))

    def and_group(self, specs: Iterable, joiner: str = "or") -> "Builder":
        """AND a parenthesized group (disjunctive by default) onto the chain."""
        return self._group_terms("and", joiner, specs)

    def or_group(self, specs: Iterable, joiner: str = "and") -> "Builder":
        """OR a parenthesized group (conjunctive by default) onto the chain."""
        return self._group_terms("or", joiner, specs)

    # -- shaping  --------------------------------------------------------

    def field(self, *columns: str) -> "Builder":
        self._require_table()
        if not columns:
            raise InvalidChain("field() needs at least one column")
        for c in columns:
            self._check_column(c)
        return replace(self, _projection=tuple(columns))

    def group(self, *columns: str) -> "Builder":
        self._require_table()
        if not columns:
            raise InvalidChain("group() needs at least one column")
        for c in columns:
            self._check_column(c)
        return replace(self, _group_by=tuple(columns))

    def having(self, *args, **kwargs) -> "Builder":
        conds = _coerce_conditions(args, kwargs)
        if len(conds) != 1:
            raise InvalidChain("having() takes exactly one condition")
        cond = conds[0]
        if cond.column != COUNT_PSEUDO_COLUMN:
            self._check_column(cond.column)
        return replace(self, _having=cond)

    def order(self, column: str, direction: str = "asc") -> "Builder":
        self._check_column(column)
        if direction not in ("asc", "desc"):
            raise InvalidChain(f"direction must be asc/desc, got {direction!r}")
        return replace(self, _order_by=self._order_by + ((column, direction),))

    def limit(self, n: int) -> "Builder":
        if n < 0:
            raise InvalidChain("limit must be non-negative")
        return replace(self, _limit=n)

    def offset(self, n: int) -> "Builder":
        if n < 0:
            raise InvalidChain("offset must be non-negative")
        return replace(self, _offset=n)

    def distinct(self) -> "Builder":
        self._require_table()
        return replace(self, _distinct=True)

    # -- aggregates ------------------------------------------------------

    def _agg(self, fn: str, column: str | None) -> "Builder":
        self._require_table()
        if column is not None:
            self._check_column(column)
        return replace(self, _aggregate=(fn, column))

    def count(self, column: str | None = None) -> "Builder":
        return self._agg("count", column)

    def min(self, column: str) -> "Builder":
        return self._agg("min", column)

    def max(self, column: str) -> "Builder":
        return self._agg("max", column)

    def avg(self, column: str) -> "Builder":
        return self._agg("avg", column)

    def sum(self, column: str) -> "Builder":
        return self._agg("sum", column)

    def distinct_count(self, column: str) -> "Builder":
        return self._agg("distinct_count", column)

    # -- terminals -------------------------------------------------------

    def build(self) -> QueryAst:
        """Validate the chain and produce its normalized AST.

        Raises:
            InvalidChain: structural misuse (having without group, offset
                without limit, projection mixed with grouping, ...).
        """
        source = self._require_table()
        if self._having is not None and self._group_by is None:
            raise InvalidChain("having() requires group()")
        if self._offset is not None and self._limit is None:
            raise InvalidChain("offset() requires limit()")
        if self._aggregate is not None and self._projection is not None:
            raise InvalidChain("aggregates cannot be combined with field()")
        if self._aggregate is not None and self._distinct:
            raise InvalidChain("use distinct_count() instead of distinct() + aggregate")
        if self._group_by is not None and self._projection is not None:
            raise InvalidChain("group() fixes the select list; drop field()")
        if self._group_by is not None and self._distinct:
            raise InvalidChain("group() already deduplicates; drop distinct()")
        if self._group_by is not None:
            for column, _ in self._order_by:
                if column not in self._group_by:
                    raise InvalidChain(
                        f"order column {column!r} must be grouped")
        elif self._distinct and self._projection is not None:
            for column, _ in self._order_by:
                if column not in self._projection:
                    raise InvalidChain(
                        f"order column {column!r} must be projected under distinct()")
        if self._having is not None and self._having.column != COUNT_PSEUDO_COLUMN:
            if self._having.column not in (self._group_by or ()):
                raise InvalidChain("having() may reference 'count' or a grouped column")
        return QueryAst(
            source=source,
            conditions=self._conditions,
            group_by=self._group_by,
            having=self._having,
            order_by=self._order_by,
            limit=self._limit,
            offset=self._offset,
            projection=self._projection,
            aggregate=self._aggregate,
            distinct=self._distinct,
        )

    def query(self):
        """Build and execute against the bound store."""
        if self.handle is None:
            raise InvalidChain("builder has no store bound; pass Builder(handle)")
        return execute(self.handle, self.build())

    def find_one(self):
        """First row of the (deterministically ordered) result, or None."""
        rows = self.limit(1).query()
        if not isinstance(rows, list):
            raise InvalidChain("find_one() applies to row queries, not aggregates")
        return rows[0] if rows else None

    def exists(self) -> bool:
        """Whether any row matches the current chain."""
        if self.handle is None:
            raise InvalidChain("builder has no store bound; pass Builder(handle)")
        probe = replace(self, _order_by=(), _limit=1, _offset=None,
                        _projection=None, _aggregate=("count", None),
                        _distinct=False, _group_by=None, _having=None)
        return bool(execute(self.handle, probe.build()))


def table(source: str, handle: Store | None = None) -> Builder:
    """Start a chain: ``table("paper").where(...)``."""
    return Builder(handle=handle).table(source)


# -- rendering ---------------------------------------------------------------


def _render_condition(cond: Condition, params: list) -> str:
    col = _ident(cond.column)
    if cond.op in _OP_SQL:
        params.append(cond.value)
        return f"{col} {_OP_SQL[cond.op]} ?"
    if cond.op == "like":
        params.append(cond.value)
        return f"{col} LIKE ?"
    if cond.op in ("in", "not_in"):
        placeholders = ", ".join("?" for _ in cond.value)
        params.extend(cond.value)
        keyword = "IN" if cond.op == "in" else "NOT IN"
        return f"{col} {keyword} ({placeholders})"
    if cond.op == "between":
        params.extend(cond.value)
        return f"{col} BETWEEN ? AND ?"
    if cond.op == "is_null":
        return f"{col} IS NULL"
    return f"{col} IS NOT NULL"


def _render_where(terms: Sequence[WhereTerm], params: list) -> str:
    parts: list[str] = []
    for i, (connector, item) in enumerate(terms):
        if isinstance(item, ConditionGroup):
            inner = f" {item.joiner.upper()} ".join(
                _render_condition(c, params) for c in item.conditions)
            rendered = f"({inner})"
        else:
            rendered = _render_condition(item, params)
        if i == 0:
            parts.append(rendered)
        else:
            parts.append(f"{connector.upper()} {rendered}")
    return " ".join(parts)


def _render_aggregate(aggregate: tuple[str, str | None]) -> str:
    fn, column = aggregate
    if fn == "count":
        return f"COUNT({_ident(column)})" if column else "COUNT(*)"
    if fn == "distinct_count":
        return f"COUNT(DISTINCT {_ident(column)})"
    return f"{fn.upper()}({_ident(column)})"


def _render(ast: QueryAst, params: list, *, executed: bool = False) -> str:
    if ast.group_by is not None:
        select_list = ", ".join(_ident(c) for c in ast.group_by)
        if ast.aggregate is not None:
            select_list += f", {_render_aggregate(ast.aggregate)}"
    elif ast.aggregate is not None:
        select_list = _render_aggregate(ast.aggregate)
    elif ast.projection is not None:
        select_list = ", ".join(_ident(c) for c in ast.projection)
    else:
        select_list = "*"
    if ast.distinct:
        select_list = f"DISTINCT {select_list}"

    sql = f"SELECT {select_list} FROM {ast.source}"
    if ast.conditions:
        sql += f" WHERE {_render_where(ast.conditions, params)}"
    if ast.group_by is not None:
        sql += f" GROUP BY {', '.join(_ident(c) for c in ast.group_by)}"
    if ast.having is not None:
        lhs = ("COUNT(*)" if ast.having.column == COUNT_PSEUDO_COLUMN
               else _ident(ast.having.column))
        having = Condition("__having__", ast.having.op, ast.having.value)
        rendered = _render_condition(having, params).replace('__having__', lhs, 1)
        sql += f" HAVING {rendered}"

    order_pairs = list(ast.order_by)
    if executed:
        order_pairs += _implicit_order(ast, order_pairs)
    if order_pairs:
        rendered = ", ".join(f"{_ident(c)} {d.upper()}" for c, d in order_pairs)
        sql += f" ORDER BY {rendered}"
    if ast.limit is not None:
        sql += f" LIMIT {ast.limit}"
    if ast.offset is not None:
        sql += f" OFFSET {ast.offset}"
    return sql


def _implicit_order(ast: QueryAst,
                    explicit: Sequence[tuple[str, str]]) -> list[tuple[str, str]]:
    """The deterministic tiebreaker appended at execution time."""
    if ast.aggregate is not None and ast.group_by is None:
        return []
    named = {c for c, _ in explicit}
    if ast.group_by is not None:
        tail = ast.group_by
    elif ast.distinct:
        tail = ast.projection or TABLE_COLUMNS[ast.source]
    else:
        tail = (PRIMARY_KEYS[ast.source],)
    return [(c, "asc") for c in tail if c not in named]


def render_sql(ast: QueryAst) -> str:
    """Deterministic standard-SQL text with positional placeholders."""
    return _render(ast, [])


def bind_params(ast: QueryAst) -> list:
    """The positional parameter values matching render_sql's placeholders."""
    params: list = []
    _render(ast, params)
    return params


def execute(h: Store, ast: QueryAst):
    """Run the query and return its result.

    Bare aggregates return a scalar; grouped queries return a list of
    tuples (group values, then the aggregate when present); row queries
    return a list of column->value dicts.
    """
    params: list = []
    sql = _render(ast, params, executed=True)
    if ast.aggregate is not None and ast.group_by is None:
        return h.execute_scalar(sql, params)
    if ast.group_by is not None:
        return h.execute_tuples(sql, params)
    return h.execute_sql(sql, params)


def hydrate_papers(rows: Sequence[Mapping]) -> PaperList:
    """Turn full-projection paper rows into a PaperList, order preserved.

    Raises:
        MissingColumn: if the rows carry only a partial projection.
    """
    records = []
    for row in rows:
        missing = [c for c in PAPER_COLUMNS if c not in row.keys()]
        if missing:
            raise MissingColumn(f"rows lack columns {missing}; select the full row")
        records.append(paper_from_row(row))
    return PaperList.from_iterable(records)
