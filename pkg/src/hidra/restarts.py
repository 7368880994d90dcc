"""Stopping criteria for a single run and restart preparation.

A stopped-but-unfinished run restarts with doubled population size, all
learning rates recomputed for the new population, a fresh initial mean from
the configured box, the configured initial step size, and an identity
transform.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import RngStream
from .errors import ContractViolationError
from .strategies import StrategyParams, StrategyState, default_params


@dataclass(frozen=True)
class StopCriteria:
    sigma_floor: float = 1e-20
    stagnation_gens: int = 10_000   # window without relative best-fitness improvement
    max_gens: int = 2**62
    target_fitness: float | None = None

    def __post_init__(self):
        if self.sigma_floor <= 0 or self.stagnation_gens <= 0 or self.max_gens <= 0:
            raise ContractViolationError("stop thresholds must be positive")


def default_stop_criteria(d: int, lam: int, sigma_floor: float = 1e-20,
                          max_gens: int = 2**62,
                          target_fitness: float | None = None) -> StopCriteria:
    """Scale-aware defaults; the stagnation window grows with d/lam."""
    return StopCriteria(
        sigma_floor=sigma_floor,
        stagnation_gens=int(100 + 30 * d / lam),
        max_gens=max_gens,
        target_fitness=target_fitness,
    )


STAGNATION_REL_TOL = 1e-12


def should_stop(state: StrategyState, history, crit: StopCriteria) -> str | None:
    """First matching stop reason, or None to continue.

    ``history`` is the per-generation best-fitness trace of the current run.
    Reasons, in the order they are checked: ``sigma_below_floor``,
    ``sigma_above_ceiling`` (hard divergence guard), ``stagnation``,
    ``max_generations``, ``target_reached``, ``non_finite_state``.
    """
    if len(history) == 0:
        raise ContractViolationError("history must be non-empty")
    if state.sigma <= crit.sigma_floor or state.sigma_bound_hit == "floor":
        return "sigma_below_floor"
    if state.sigma_bound_hit == "ceiling":
        return "sigma_above_ceiling"
    w = crit.stagnation_gens
    if len(history) > w:
        past_best = min(history[:-w])
        recent_best = min(history[-w:])
        scale = max(abs(past_best), 1e-300)
        if (past_best - recent_best) / scale <= STAGNATION_REL_TOL:
            return "stagnation"
    if state.generation >= crit.max_gens:
        return "max_generations"
    if crit.target_fitness is not None and min(history) <= crit.target_fitness:
        return "target_reached"
    if not (
        math.isfinite(state.sigma)
        and np.isfinite(state.m).all()
        and np.isfinite(state.p_sigma).all()
    ):
        return "non_finite_state"
    return None


def restart_params(prev: StrategyParams, prev_init: tuple[tuple[float, float], float],
                   rng: RngStream) -> tuple[StrategyParams, np.ndarray, float]:
    """Double the population and redraw initial conditions.

    ``prev_init`` is ``((low, high), sigma0)``: the initialization box for
    the mean and the configured initial step size. Dependent learning rates
    are recomputed for the doubled population; the caller builds a fresh
    state from the returned triple, which resets the transform to identity
    and zeroes all paths.
    """
    (low, high), sigma0 = prev_init
    params = default_params(prev.dim, prev.variant, lam=2 * prev.lam)
    m0 = rng.uniform(low, high, prev.dim)
    return params, m0, float(sigma0)
