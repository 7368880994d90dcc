"""Uncertainty handling: adapt the number of averaged evaluations per individual.

Noise is detected from rank instability: part of the population is evaluated
a second time and the normalized average rank displacement ``s`` between the
two rankings drives the per-individual evaluation count up or down. Because
``s`` is purely rank-based it inherits invariance under strictly increasing
fitness transformations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from .core import Budget, Objective, RngStream, evaluate_counted
from .errors import ContractViolationError
from .strategies import rank_order


@dataclass(frozen=True)
class UncertaintyState:
    """Current evaluation effort and the statistic that produced it."""

    n_eval: int = 1           # averaged evaluations per individual
    n_max: int = 100          # cap on n_eval
    theta: float = 0.2        # rank-change tolerance
    alpha: float = 1.5        # adaptation factor
    reev_fraction: float = 0.1  # fraction of the population evaluated twice
    last_s: float = 0.0

    def __post_init__(self):
        if not (1 <= self.n_eval <= self.n_max):
            raise ContractViolationError("need 1 <= n_eval <= n_max")
        if not (0.0 <= self.theta <= 1.0):
            raise ContractViolationError("theta must lie in [0, 1]")
        if self.alpha <= 1.0:
            raise ContractViolationError("alpha must exceed 1")
        if not (0.0 < self.reev_fraction <= 1.0):
            raise ContractViolationError("reev_fraction must lie in (0, 1]")


def mean_evaluate(obj: Objective, x: np.ndarray, n: int, budget: Budget,
                  rng: RngStream) -> float:
    """Mean of ``n`` independent evaluations; consumes exactly ``n`` budget units."""
    if n < 1:
        raise ContractViolationError("n must be >= 1")
    total = 0.0
    for _ in range(n):
        total += evaluate_counted(obj, x, budget, rng)
    return total / n


def rank_change(f_first, f_second_at: Mapping[int, float], lam: int) -> float:
    """Normalized mean rank displacement of the re-evaluated individuals.

    Ranks are computed over all ``lam`` individuals under the first fitness
    values, then again with each re-evaluated individual's value replaced by
    its second measurement; ties break by index both times. The result lies
    in [0, 1]: 0 means re-evaluation moved nobody, 1 means every re-evaluated
    individual jumped across the whole ranking.
    """
    if lam < 2:
        raise ContractViolationError("need a population of at least 2 to rank")
    if not f_second_at:
        raise ContractViolationError("no re-evaluated individuals given")
    f1 = np.asarray(f_first, dtype=np.float64)
    if f1.shape != (lam,):
        raise ContractViolationError(f"expected {lam} first-pass values, got {f1.shape}")
    idx = np.fromiter(f_second_at.keys(), dtype=np.int64)
    if idx.min() < 0 or idx.max() >= lam:
        raise ContractViolationError("re-evaluation index out of range")
    f2 = f1.copy()
    for i, v in f_second_at.items():
        f2[i] = v
    ranks1 = np.empty(lam, dtype=np.int64)
    ranks1[rank_order(f1)] = np.arange(lam)
    ranks2 = np.empty(lam, dtype=np.int64)
    ranks2[rank_order(f2)] = np.arange(lam)
    return float(np.mean(np.abs(ranks1[idx] - ranks2[idx]))) / (lam - 1)


def adapt(state: UncertaintyState, s: float) -> UncertaintyState:
    """Raise the evaluation count when ranks are unstable, decay it otherwise."""
    if not (0.0 <= s <= 1.0):
        raise ContractViolationError("s must lie in [0, 1]")
    if s > state.theta:
        n = min(state.n_max, max(state.n_eval + 1, math.ceil(state.alpha * state.n_eval)))
    else:
        n = max(1, math.floor(state.n_eval / state.alpha))
    return replace(state, n_eval=n, last_s=s)


def evaluate_generation(obj: Objective, offspring: np.ndarray, budget: Budget,
                        uh: UncertaintyState, rng: RngStream
                        ) -> tuple[np.ndarray, UncertaintyState]:
    """Evaluate one population with re-evaluation-driven effort adaptation.

    Every offspring gets an ``n_eval``-averaged fitness; ``ceil(reev_fraction
    * lam)`` of them, chosen uniformly without replacement, get a second
    averaged measurement. The rank-change statistic of the two rankings
    adapts ``n_eval`` for the next generation, and re-evaluated individuals
    report the mean of both measurements. Consumes exactly
    ``(lam + n_reev) * n_eval`` budget units.
    """
    lam = len(offspring)
    n = uh.n_eval
    first = np.array([mean_evaluate(obj, x, n, budget, rng) for x in offspring])
    n_reev = math.ceil(uh.reev_fraction * lam)
    chosen = rng.choice(lam, size=n_reev, replace=False)
    second = {int(i): mean_evaluate(obj, offspring[i], n, budget, rng) for i in chosen}
    s = rank_change(first, second, lam)
    final = first.copy()
    for i, v in second.items():
        final[i] = 0.5 * (first[i] + v)
    return final, adapt(uh, s)
