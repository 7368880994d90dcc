from .config import RunSpec, parse_config
from .runner import build_objective, run_experiment, run_matrix, run_single
from .trace import (
    AGGREGATE_HEADER,
    TRACE_HEADER,
    AggregateRow,
    TraceRow,
    aggregate_runs,
    read_csv,
    write_aggregate_csv,
    write_csv,
)

__all__ = [
    "RunSpec",
    "parse_config",
    "build_objective",
    "run_experiment",
    "run_matrix",
    "run_single",
    "TraceRow",
    "AggregateRow",
    "TRACE_HEADER",
    "AGGREGATE_HEADER",
    "aggregate_runs",
    "read_csv",
    "write_csv",
    "write_aggregate_csv",
]
