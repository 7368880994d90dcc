"""Experiment driver: execute RunSpecs, emit trace rows, write CSV files.

Each repetition ``i`` of a spec is keyed by ``seed + i`` and consumes three
private RNG streams: stream 0 for initialization and restart redraws,
stream 1 for offspring sampling, stream 2 for fitness noise and the
re-evaluation subset. A run is therefore a pure function of
``(spec, run_id)``, and repeated invocations produce byte-identical CSVs.
"""
from __future__ import annotations

import dataclasses
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..benchmarks import ellipsoid_objective, rosenbrock_objective
from ..control import PointMassObjective
from ..core import Budget, Objective, evaluate_counted, spawn_stream
from ..errors import HidraError, UpdateSkippedError
from ..restarts import default_stop_criteria, restart_params, should_stop
from ..strategies import ask, default_params, init_state, tell
from ..uncertainty import UncertaintyState, evaluate_generation
from .config import RunSpec
from .trace import TraceRow, aggregate_runs, write_aggregate_csv, write_csv


def build_objective(spec: RunSpec) -> Objective:
    if spec.problem in ("sphere", "ellipsoid"):
        k = 1.0 if spec.problem == "sphere" else spec.k
        return ellipsoid_objective(spec.d, k, spec.noise)
    if spec.problem == "rosenbrock":
        return rosenbrock_objective(spec.d, spec.noise)
    if spec.problem == "pointmass":
        return PointMassObjective(hidden=spec.hidden)
    raise HidraError(f"unknown problem {spec.problem!r}")


def initial_mean(spec: RunSpec, rng) -> np.ndarray:
    # Controller parameters start at zero (neutral tanh policy); benchmark
    # means are drawn uniformly from the configured box.
    if spec.problem == "pointmass":
        return np.zeros(spec.d)
    lo, hi = spec.init_box
    return rng.uniform(lo, hi, spec.d)


def _population_stats(f: np.ndarray) -> tuple[float, float, float]:
    finite = f[np.isfinite(f)]
    if finite.size == 0:
        return float("inf"), float("nan"), float("nan")
    return float(finite.min()), float(finite.mean()), float(finite.std())


def run_single(spec: RunSpec, run_id: int) -> list[TraceRow]:
    """Execute one repetition: restart loop until the budget is used up."""
    base_seed = spec.seed + run_id
    rng_init = spawn_stream(base_seed, 0)
    rng_ask = spawn_stream(base_seed, 1)
    rng_eval = spawn_stream(base_seed, 2)

    obj = build_objective(spec)
    budget = Budget(spec.budget)
    params = default_params(spec.d, spec.algorithm, lam=spec.lam)
    sigma0 = spec.effective_sigma0
    m0 = initial_mean(spec, rng_init)
    max_gens = spec.max_gens if spec.max_gens is not None else 2**62

    rows: list[TraceRow] = []
    last_logged_evals = -1
    restart_index = 0

    def log_row(state, f, uh, force=False):
        nonlocal last_logged_evals
        if budget.used <= last_logged_evals:
            return
        if not force and state.generation % spec.log_every != 0:
            return
        best, mean, std = _population_stats(f)
        ref = obj.reference(state.m)
        rows.append(
            TraceRow(
                run_id=run_id,
                restart_index=restart_index,
                generation=state.generation,
                evals_used=budget.used,
                best_fitness=best,
                mean_fitness=mean,
                ref_fitness_at_mean=float("nan") if ref is None else float(ref),
                sigma=state.sigma,
                n_eval=uh.n_eval if uh is not None else 1,
                fitness_std=std,
                s_stat=uh.last_s if uh is not None else float("nan"),
            )
        )
        last_logged_evals = budget.used

    while True:
        state = init_state(params, m0, sigma0)
        uh = UncertaintyState() if spec.uh else None
        crit = default_stop_criteria(
            spec.d, params.lam, sigma_floor=spec.sigma_floor,
            max_gens=max_gens, target_fitness=spec.target_fitness,
        )
        if spec.stagnation_gens is not None:
            crit = dataclasses.replace(crit, stagnation_gens=spec.stagnation_gens)
        history: list[float] = []
        stop_reason = None
        f: np.ndarray | None = None
        while True:
            if budget.exhausted:
                stop_reason = "budget_exhausted"
                break
            try:
                with budget.generation():
                    x = ask(state, params, rng_ask)
                    if uh is not None:
                        f, uh = evaluate_generation(obj, x, budget, uh, rng_eval)
                    else:
                        f = np.array(
                            [evaluate_counted(obj, xi, budget, rng_eval) for xi in x]
                        )
                    tell(state, params, f)
            except UpdateSkippedError:
                # The population carried no information; flag the event and
                # abort this repetition without touching other cells.
                log_row(state, np.full(params.lam, np.nan), uh, force=True)
                return rows
            history.append(float(np.min(np.where(np.isfinite(f), f, np.inf))))
            log_row(state, f, uh)
            reason = should_stop(state, history, crit)
            if reason is not None:
                stop_reason = reason
                break
        log_row(state, f if f is not None else np.full(params.lam, np.nan), uh, force=True)
        if stop_reason == "budget_exhausted" or budget.exhausted or not spec.restarts:
            break
        params, m0, sigma0 = restart_params(
            params, (spec.init_box, spec.effective_sigma0), rng_init
        )
        restart_index += 1
    return rows


def run_experiment(spec: RunSpec) -> list[TraceRow]:
    """All repetitions of one spec, sequentially."""
    rows: list[TraceRow] = []
    for run_id in range(spec.runs):
        rows.extend(run_single(spec, run_id))
    return rows


@dataclass
class CellResult:
    spec: RunSpec
    name: str
    trace_path: Path | None
    aggregate_path: Path | None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _run_cell_repetition(args) -> tuple[int, int, list[TraceRow]]:
    cell_idx, run_id, spec = args
    return cell_idx, run_id, run_single(spec, run_id)


def run_matrix(specs, out_dir, jobs: int = 1) -> list[CellResult]:
    """Run every cell, isolate failures, and write trace + aggregate CSVs."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = _unique_names(specs)
    cell_rows: dict[int, list[TraceRow]] = {i: [] for i in range(len(specs))}
    errors: dict[int, str] = {}

    tasks = [(i, run_id, spec) for i, spec in enumerate(specs) for run_id in range(spec.runs)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for (i, run_id, spec), fut in [
                (t, pool.submit(_run_cell_repetition, t)) for t in tasks
            ]:
                try:
                    _, _, rows = fut.result()
                    cell_rows[i].extend(rows)
                except Exception as exc:  # isolate the failing cell
                    errors[i] = f"run {run_id}: {exc}"
    else:
        for t in tasks:
            i, run_id, spec = t
            if i in errors:
                continue
            try:
                _, _, rows = _run_cell_repetition(t)
                cell_rows[i].extend(rows)
            except Exception as exc:
                errors[i] = f"run {run_id}: {exc}"

    results = []
    for i, spec in enumerate(specs):
        name = names[i]
        if i in errors:
            results.append(CellResult(spec, name, None, None, errors[i]))
            continue
        rows = cell_rows[i]
        try:
            trace_path = out / f"{name}_trace.csv"
            agg_path = out / f"{name}_agg.csv"
            write_csv(rows, trace_path)
            write_aggregate_csv(aggregate_runs(rows), agg_path)
            results.append(CellResult(spec, name, trace_path, agg_path))
        except Exception as exc:
            results.append(CellResult(spec, name, None, None, str(exc)))
    return results


def _unique_names(specs) -> list[str]:
    seen: dict[str, int] = {}
    names = []
    for spec in specs:
        base = spec.cell_name()
        count = seen.get(base, 0)
        seen[base] = count + 1
        names.append(base if count == 0 else f"{base}.{count}")
    return names
