"""Shared contracts: objective abstraction, budget accounting, RNG streams.

Every stochastic component in the package draws from a stream obtained via
:func:`spawn_stream`, so a whole experiment is a pure function of
``(seed, config)``.
"""
from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExhaustedError, ContractViolationError

RngStream = np.random.Generator


def spawn_stream(seed: int, index: int) -> RngStream:
    """Return the RNG stream identified by ``(seed, index)``.

    Equal ``(seed, index)`` pairs yield byte-identical streams; distinct
    indices yield statistically independent streams derived from the same
    seed, which makes per-worker evaluation deterministic under parallelism.
    """
    if index < 0:
        raise ContractViolationError(f"stream index must be >= 0, got {index}")
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(index,))
    return np.random.Generator(np.random.PCG64(seq))


class Objective:
    """A black-box fitness function of fixed dimension.

    Subclasses implement :meth:`eval`; stochastic objectives must draw
    exclusively from the stream passed in, so evaluation is pure given the
    stream and safe to run concurrently with per-call streams.
    :meth:`reference` returns the noise-free value where one is defined
    (synthetic benchmarks) and ``None`` where only Monte Carlo estimates
    exist (controller tasks).
    """

    dim: int

    def eval(self, x: np.ndarray, rng: RngStream) -> float:
        raise NotImplementedError

    def reference(self, x: np.ndarray) -> float | None:
        return None


@dataclass
class Budget:
    """Evaluation budget checked at generation granularity.

    ``used`` may overshoot ``max_evals`` by at most one generation's worth of
    evaluations: drivers open a generation window (:meth:`generation`) while
    evaluating a population, and exhaustion is only enforced outside a
    window or when opening one.
    """

    max_evals: int
    used: int = 0
    _in_generation: bool = field(default=False, repr=False)

    def __post_init__(self):
        if self.max_evals <= 0:
            raise ContractViolationError("max_evals must be positive")

    @property
    def exhausted(self) -> bool:
        return self.used >= self.max_evals

    @property
    def remaining(self) -> int:
        return max(0, self.max_evals - self.used)

    def consume(self, n: int = 1) -> None:
        if n < 0:
            raise ContractViolationError("cannot consume a negative number of evaluations")
        if self.exhausted and not self._in_generation:
            raise BudgetExhaustedError(
                f"budget exhausted ({self.used}/{self.max_evals} evaluations used)"
            )
        self.used += n

    @contextmanager
    def generation(self):
        """Open a window in which mid-generation overshoot is permitted."""
        if self.exhausted:
            raise BudgetExhaustedError(
                f"cannot start a generation: budget exhausted ({self.used}/{self.max_evals})"
            )
        self._in_generation = True
        try:
            yield self
        finally:
            self._in_generation = False


def evaluate_counted(obj: Objective, x: np.ndarray, budget: Budget, rng: RngStream) -> float:
    """Evaluate ``obj`` at ``x``, charging exactly one budget unit."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != obj.dim:
        raise ContractViolationError(
            f"objective expects vectors of length {obj.dim}, got shape {x.shape}"
        )
    budget.consume(1)
    return float(obj.eval(x, rng))
