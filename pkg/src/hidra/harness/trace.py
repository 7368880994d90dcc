"""Trace rows, the bit-exact CSV schema, and run aggregation.

Trace CSV header (one row per logged generation)::

    run_id,restart_index,generation,evals_used,best_fitness,mean_fitness,ref_fitness_at_mean,sigma,n_eval,fitness_std,s_stat

Aggregate CSV header (one row per checkpoint on a common evaluation grid)::

    evals_used,best_fitness_gmean,best_fitness_amean,mean_fitness_gmean,mean_fitness_amean,ref_fitness_gmean,ref_fitness_amean,sigma_gmean,n_eval_mean,fitness_std_gmean,fitness_std_amean,s_stat_mean

Floats are written with 17 significant digits, which round-trips IEEE
doubles exactly; unavailable values (e.g. the noise-free reference of a
controller task) are written as ``nan``. Geometric means are taken over
positive finite values only; log-scale plots read the ``gmean`` columns,
zero-crossing metrics the ``amean`` ones.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from ..errors import ContractViolationError

TRACE_HEADER = (
    "run_id,restart_index,generation,evals_used,best_fitness,mean_fitness,"
    "ref_fitness_at_mean,sigma,n_eval,fitness_std,s_stat"
)

AGGREGATE_HEADER = (
    "evals_used,best_fitness_gmean,best_fitness_amean,mean_fitness_gmean,"
    "mean_fitness_amean,ref_fitness_gmean,ref_fitness_amean,sigma_gmean,"
    "n_eval_mean,fitness_std_gmean,fitness_std_amean,s_stat_mean"
)

_INT_FIELDS = ("run_id", "restart_index", "generation", "evals_used", "n_eval")


def _float_eq(a: float, b: float) -> bool:
    return a == b or (math.isnan(a) and math.isnan(b))


@dataclass(frozen=True, eq=False)
class TraceRow:
    """One logged record of a single run."""

    run_id: int
    restart_index: int
    generation: int
    evals_used: int
    best_fitness: float
    mean_fitness: float
    ref_fitness_at_mean: float  # nan when the objective has no reference
    sigma: float
    n_eval: int
    fitness_std: float
    s_stat: float               # nan when uncertainty handling is off

    def __eq__(self, other):
        if not isinstance(other, TraceRow):
            return NotImplemented
        for f in fields(self):
            a, b = getattr(self, f.name), getattr(other, f.name)
            if f.name in _INT_FIELDS:
                if a != b:
                    return False
            elif not _float_eq(a, b):
                return False
        return True

    def __hash__(self):
        return hash((self.run_id, self.generation, self.evals_used))


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_csv(rows, path) -> None:
    """Write trace rows in (run_id, evals_used) order with the exact header."""
    if not rows:
        raise ContractViolationError("no rows to write")
    ordered = sorted(rows, key=lambda r: (r.run_id, r.evals_used))
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(TRACE_HEADER + "\n")
        for r in ordered:
            fh.write(
                f"{r.run_id},{r.restart_index},{r.generation},{r.evals_used},"
                f"{_fmt(r.best_fitness)},{_fmt(r.mean_fitness)},"
                f"{_fmt(r.ref_fitness_at_mean)},{_fmt(r.sigma)},{r.n_eval},"
                f"{_fmt(r.fitness_std)},{_fmt(r.s_stat)}\n"
            )


def read_csv(path) -> list[TraceRow]:
    with open(path) as fh:
        header = fh.readline().rstrip("\n")
        if header != TRACE_HEADER:
            raise ContractViolationError(f"unexpected trace header: {header!r}")
        rows = []
        for line in fh:
            parts = line.rstrip("\n").split(",")
            if len(parts) != 11:
                raise ContractViolationError(f"malformed trace line: {line!r}")
            rows.append(
                TraceRow(
                    run_id=int(parts[0]),
                    restart_index=int(parts[1]),
                    generation=int(parts[2]),
                    evals_used=int(parts[3]),
                    best_fitness=float(parts[4]),
                    mean_fitness=float(parts[5]),
                    ref_fitness_at_mean=float(parts[6]),
                    sigma=float(parts[7]),
                    n_eval=int(parts[8]),
                    fitness_std=float(parts[9]),
                    s_stat=float(parts[10]),
                )
            )
    return rows


@dataclass(frozen=True, eq=False)
class AggregateRow:
    evals_used: float
    best_fitness_gmean: float
    best_fitness_amean: float
    mean_fitness_gmean: float
    mean_fitness_amean: float
    ref_fitness_gmean: float
    ref_fitness_amean: float
    sigma_gmean: float
    n_eval_mean: float
    fitness_std_gmean: float
    fitness_std_amean: float
    s_stat_mean: float

    def __eq__(self, other):
        if not isinstance(other, AggregateRow):
            return NotImplemented
        return all(
            _float_eq(getattr(self, f.name), getattr(other, f.name))
            for f in fields(self)
        )

    def __hash__(self):
        return hash(self.evals_used)


def _gmean(values: np.ndarray) -> float:
    ok = np.isfinite(values) & (values > 0)
    if not ok.any():
        return float("nan")
    return float(np.exp(np.mean(np.log(values[ok]))))


def _amean(values: np.ndarray) -> float:
    ok = np.isfinite(values)
    if not ok.any():
        return float("nan")
    return float(np.mean(values[ok]))


def aggregate_runs(rows) -> list[AggregateRow]:
    """Collapse repeated runs onto a common evaluation grid.

    Each metric is linearly interpolated per run onto the grid (the union of
    all checkpoints inside the evaluation range shared by every run), then
    combined across runs: geometric mean for positive fitness-like metrics
    and the step size, arithmetic mean for everything else (and additionally
    for the fitness metrics, for objectives that cross zero).
    """
    if not rows:
        raise ContractViolationError("cannot aggregate zero rows")
    by_run: dict[int, list[TraceRow]] = {}
    for r in rows:
        by_run.setdefault(r.run_id, []).append(r)
    runs = []
    for run_id in sorted(by_run):
        rs = sorted(by_run[run_id], key=lambda r: r.evals_used)
        runs.append(rs)
    lo = max(rs[0].evals_used for rs in runs)
    hi = min(rs[-1].evals_used for rs in runs)
    if lo > hi:
        raise ContractViolationError(
            "runs share no evaluation range; refusing to aggregate mismatched runs"
        )
    grid = sorted({r.evals_used for rs in runs for r in rs if lo <= r.evals_used <= hi})
    grid_arr = np.asarray(grid, dtype=np.float64)

    metrics = (
        "best_fitness", "mean_fitness", "ref_fitness_at_mean", "sigma",
        "n_eval", "fitness_std", "s_stat",
    )
    interp: dict[str, np.ndarray] = {}
    for name in metrics:
        mat = np.empty((len(runs), len(grid)), dtype=np.float64)
        for i, rs in enumerate(runs):
            xs = np.asarray([r.evals_used for r in rs], dtype=np.float64)
            ys = np.asarray([float(getattr(r, name)) for r in rs], dtype=np.float64)
            mat[i] = np.interp(grid_arr, xs, ys)
        interp[name] = mat

    out = []
    for j, e in enumerate(grid):
        out.append(
            AggregateRow(
                evals_used=float(e),
                best_fitness_gmean=_gmean(interp["best_fitness"][:, j]),
                best_fitness_amean=_amean(interp["best_fitness"][:, j]),
                mean_fitness_gmean=_gmean(interp["mean_fitness"][:, j]),
                mean_fitness_amean=_amean(interp["mean_fitness"][:, j]),
                ref_fitness_gmean=_gmean(interp["ref_fitness_at_mean"][:, j]),
                ref_fitness_amean=_amean(interp["ref_fitness_at_mean"][:, j]),
                sigma_gmean=_gmean(interp["sigma"][:, j]),
                n_eval_mean=_amean(interp["n_eval"][:, j]),
                fitness_std_gmean=_gmean(interp["fitness_std"][:, j]),
                fitness_std_amean=_amean(interp["fitness_std"][:, j]),
                s_stat_mean=_amean(interp["s_stat"][:, j]),
            )
        )
    return out


def write_aggregate_csv(agg_rows, path) -> None:
    if not agg_rows:
        raise ContractViolationError("no rows to write")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(AGGREGATE_HEADER + "\n")
        for r in agg_rows:
            fh.write(
                ",".join(
                    _fmt(getattr(r, name)) for name in AGGREGATE_HEADER.split(",")
                )
                + "\n"
            )
