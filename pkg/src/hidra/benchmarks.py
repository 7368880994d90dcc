"""Synthetic benchmark problems: sphere/ellipsoid family, Rosenbrock, noise models.

The ellipsoid family is ``f̄(x) = sqrt(x^T H x)`` with diagonal ``H`` whose
eigenvalues are geometrically spaced between 1 and the condition number
``k``; ``k = 1`` is the sphere. A disturbance model is applied on top of the
noise-free value, so every benchmark exposes both a stochastic ``eval`` and
the exact ``reference``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import Objective, RngStream, spawn_stream
from .errors import ContractViolationError

NOISE_KINDS = ("none", "multiplicative", "additive", "thresholded_additive")


@dataclass(frozen=True)
class NoiseModel:
    """Disturbance applied to a noise-free fitness value.

    ``multiplicative`` scales by ``1 + c*u`` with ``u ~ U(-1, 1)`` so the
    disturbance range is proportional to the value itself and vanishes at
    the optimum; ``additive`` adds ``epsilon * N(0, 1)`` everywhere;
    ``thresholded_additive`` adds it only where the noise-free value exceeds
    ``threshold``. Zero-strength models are normalized to ``none`` so they
    are indistinguishable from it, draw for draw.
    """

    kind: str = "none"
    c: float = 0.0
    epsilon: float = 0.0
    threshold: float = 0.0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ContractViolationError(f"unknown noise kind {self.kind!r}")
        if self.c < 0 or self.epsilon < 0:
            raise ContractViolationError("noise strengths must be non-negative")
        if not math.isfinite(self.threshold):
            raise ContractViolationError("threshold must be finite")

    @staticmethod
    def none() -> "NoiseModel":
        return NoiseModel()

    @staticmethod
    def multiplicative(c: float) -> "NoiseModel":
        if c == 0:
            return NoiseModel()
        return NoiseModel(kind="multiplicative", c=c)

    @staticmethod
    def additive(epsilon: float) -> "NoiseModel":
        if epsilon == 0:
            return NoiseModel()
        return NoiseModel(kind="additive", epsilon=epsilon)

    @staticmethod
    def thresholded_additive(epsilon: float, threshold: float) -> "NoiseModel":
        if epsilon == 0:
            return NoiseModel()
        return NoiseModel(kind="thresholded_additive", epsilon=epsilon, threshold=threshold)


def apply_noise(fbar: float, model: NoiseModel, rng: RngStream) -> float:
    """Disturb a noise-free value. Consumes no evaluation budget."""
    if model.kind == "none":
        return fbar
    if model.kind == "multiplicative":
        return fbar * (1.0 + model.c * rng.uniform(-1.0, 1.0))
    if model.kind == "additive":
        return fbar + model.epsilon * rng.standard_normal()
    # thresholded_additive: the region below the threshold is noise-free
    if fbar <= model.threshold:
        return fbar
    return fbar + model.epsilon * rng.standard_normal()


def ellipsoid_eigs(d: int, k: float) -> np.ndarray:
    """Geometrically spaced eigenvalues 1 = eig_1 < ... < eig_d = k."""
    if d < 1:
        raise ContractViolationError("dimension must be >= 1")
    if k < 1:
        raise ContractViolationError(f"condition number must be >= 1, got {k}")
    if d == 1:
        return np.ones(1)
    return np.power(k, np.arange(d, dtype=np.float64) / (d - 1))


@dataclass(frozen=True)
class EllipsoidSpec:
    d: int
    k: float
    eigs: np.ndarray

    def __post_init__(self):
        if self.eigs.shape != (self.d,):
            raise ContractViolationError("eigenvalue vector must have length d")


def make_ellipsoid(d: int, k: float) -> EllipsoidSpec:
    return EllipsoidSpec(d=d, k=k, eigs=ellipsoid_eigs(d, k))


def eval_ellipsoid(x: np.ndarray, spec: EllipsoidSpec) -> float:
    """sqrt(sum eigs_i * x_i^2), safe against under/overflow of the squares."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (spec.d,):
        raise ContractViolationError(f"expected vector of length {spec.d}, got {x.shape}")
    y = x if spec.k == 1.0 else np.sqrt(spec.eigs) * x
    with np.errstate(over="ignore", under="ignore"):
        s = float(y @ y)
    if 1e-200 < s < 1e200:
        return math.sqrt(s)
    m = float(np.max(np.abs(y)))
    if m == 0.0:
        return 0.0
    if not math.isfinite(m):
        return math.inf
    r = y / m
    return m * math.sqrt(float(r @ r))


def rosenbrock(x: np.ndarray) -> float:
    """Banana-valley function; global optimum 0 at the all-ones point."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] < 2:
        raise ContractViolationError("rosenbrock needs dimension >= 2")
    a = x[1:] - x[:-1] ** 2
    b = 1.0 - x[:-1]
    return float(100.0 * (a @ a) + b @ b)


class BenchmarkObjective(Objective):
    """A noise-free base function wrapped in a disturbance model."""

    def __init__(self, dim: int, base: Callable[[np.ndarray], float], noise: NoiseModel,
                 name: str = "benchmark"):
        self.dim = dim
        self.noise = noise
        self.name = name
        self._base = base

    def reference(self, x: np.ndarray) -> float:
        return self._base(np.asarray(x, dtype=np.float64))

    def eval(self, x: np.ndarray, rng: RngStream) -> float:
        return apply_noise(self.reference(x), self.noise, rng)


def _orthogonal_matrix(d: int, seed: int) -> np.ndarray:
    """Deterministic random rotation (QR of a Gaussian matrix, sign-fixed)."""
    g = spawn_stream(seed, 0).standard_normal((d, d))
    q, r = np.linalg.qr(g)
    return q * np.sign(np.diag(r))


def ellipsoid_objective(d: int, k: float, noise: NoiseModel = NoiseModel(),
                        rotation_seed: int | None = None) -> BenchmarkObjective:
    """Ellipsoid with condition number ``k``; optionally rotated (non-separable)."""
    spec = make_ellipsoid(d, k)
    if rotation_seed is None:
        base = lambda x: eval_ellipsoid(x, spec)
    else:
        rot = _orthogonal_matrix(d, rotation_seed)
        base = lambda x: eval_ellipsoid(rot @ x, spec)
    tag = "sphere" if k == 1.0 else f"ellipsoid(k={k:g})"
    return BenchmarkObjective(d, base, noise, name=tag)


def sphere_objective(d: int, noise: NoiseModel = NoiseModel()) -> BenchmarkObjective:
    return ellipsoid_objective(d, 1.0, noise)


def rosenbrock_objective(d: int, noise: NoiseModel = NoiseModel()) -> BenchmarkObjective:
    return BenchmarkObjective(d, rosenbrock, noise, name="rosenbrock")
