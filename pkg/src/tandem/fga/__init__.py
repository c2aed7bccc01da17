"""Filter-groupby-aggregate queries compiled to map/reduce circuit pipelines
executed under dual execution, plus the plaintext oracle they are checked
against."""

from .executor import ExecutionStats, FgaExecutor, FgaResult
from .plan import QueryPlan, plan_query
from .query import (
    FgaQuery,
    TableSchema,
    oracle_eval,
    parse_where,
    where_to_text,
)

__all__ = [
    "FgaQuery",
    "TableSchema",
    "oracle_eval",
    "parse_where",
    "where_to_text",
    "QueryPlan",
    "plan_query",
    "FgaExecutor",
    "FgaResult",
    "ExecutionStats",
]
