"""Three evolution strategies behind one ask/tell surface.

All variants share sampling ``x_i = m + sigma * T(z_i)`` with ``z_i ~ N(0, I)``,
rank-based recombination of the best ``mu`` offspring, and cumulative
step-size adaptation. They differ only in the transform ``T``:

* ``simple`` — identity, cost O(d) per sample;
* ``ma``     — full matrix ``M`` adapted multiplicatively (covariance
  ``M M^T`` implicitly, no decomposition or inverse), cost O(d^2);
* ``lmma``   — a short sequence of adapted direction vectors applied as
  rank-one mixes, cost O(d * n_vectors).

Minimization convention throughout: lower fitness is better.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .core import RngStream
from .errors import ContractViolationError, ProtocolError, UpdateSkippedError

VARIANTS = ("simple", "ma", "lmma")

SIGMA_FLOOR = 1e-300
SIGMA_CEILING = 1e100


@dataclass
class StrategyParams:
    """Population and learning-rate constants of one strategy instance."""

    variant: str
    dim: int
    lam: int                 # population size
    mu: int                  # parents used in recombination
    weights: np.ndarray      # (mu,) positive, decreasing, sums to 1
    mu_w: float              # variance-effective selection mass 1 / sum(w^2)
    c_sigma: float           # path smoothing rate for step-size control
    d_sigma: float           # step-size damping
    c_1: float               # rank-one matrix rate (ma)
    c_mu: float              # rank-mu matrix rate (ma)
    n_vectors: int           # number of direction vectors (lmma)
    c_d: np.ndarray          # (n_vectors,) per-vector transform strengths
    c_c: np.ndarray          # (n_vectors,) per-vector update rates


def default_params(d: int, variant: str, lam: int | None = None) -> StrategyParams:
    """Standard parameter choices as a function of dimension.

    ``lam`` overrides the default population size ``4 + floor(3 ln d)``;
    every dependent rate is recomputed from the override, which is also how
    restarts with doubled populations obtain their constants.
    """
    if d < 1:
        raise ContractViolationError("dimension must be >= 1")
    if variant not in VARIANTS:
        raise ContractViolationError(f"unknown variant {variant!r}, expected one of {VARIANTS}")
    if lam is None:
        lam = 4 + int(math.floor(3.0 * math.log(d)))
    if lam < 4:
        raise ContractViolationError("population size must be >= 4")
    mu = lam // 2
    w = np.log(mu + 0.5) - np.log(np.arange(1, mu + 1, dtype=np.float64))
    w /= w.sum()
    mu_w = 1.0 / float(w @ w)
    if variant == "lmma":
        # the low-rank variant pairs with a population-scaled path rate and
        # unit damping; its step-size rule compares the squared path length
        # with its expectation (see tell). The cap keeps some path memory
        # in small dimensions, where 2*lam/d would exceed 1.
        c_sigma = min(2.0 * lam / d, 0.7)
        d_sigma = 1.0
    else:
        c_sigma = (mu_w + 2.0) / (d + mu_w + 5.0)
        d_sigma = 1.0 + c_sigma + 2.0 * max(0.0, math.sqrt((mu_w - 1.0) / (d + 1.0)) - 1.0)
    c_1 = 2.0 / ((d + 1.3) ** 2 + mu_w)
    c_mu = min(1.0 - c_1, 2.0 * (mu_w - 2.0 + 1.0 / mu_w) / ((d + 2.0) ** 2 + mu_w))
    n_vectors = lam
    j = np.arange(n_vectors, dtype=np.float64)
    c_d = np.minimum(1.0, 1.0 / (1.5**j * d))
    c_c = np.minimum(1.0, lam / (4.0**j * d))
    return StrategyParams(
        variant=variant, dim=d, lam=lam, mu=mu, weights=w, mu_w=mu_w,
        c_sigma=c_sigma, d_sigma=d_sigma, c_1=c_1, c_mu=c_mu,
        n_vectors=n_vectors, c_d=c_d, c_c=c_c,
    )


@dataclass
class StrategyState:
    """Full mutable state of one run: mean, step size, transform, paths."""

    m: np.ndarray
    sigma: float
    p_sigma: np.ndarray
    generation: int = 0
    matrix: np.ndarray | None = None    # (d, d), ma only
    vectors: np.ndarray | None = None   # (n_vectors, d), lmma only
    last_z: np.ndarray | None = field(default=None, repr=False)
    last_d: np.ndarray | None = field(default=None, repr=False)
    pending_tell: bool = False
    sigma_bound_hit: str | None = None  # "floor" | "ceiling" once a hard bound is reached


def init_state(params: StrategyParams, m0: np.ndarray, sigma0: float) -> StrategyState:
    m0 = np.array(m0, dtype=np.float64)
    if m0.shape != (params.dim,):
        raise ContractViolationError(f"initial mean must have length {params.dim}")
    if sigma0 < 0:
        raise ContractViolationError("sigma0 must be non-negative")
    state = StrategyState(m=m0, sigma=float(sigma0), p_sigma=np.zeros(params.dim))
    if params.variant == "ma":
        state.matrix = np.eye(params.dim)
    elif params.variant == "lmma":
        state.vectors = np.zeros((params.n_vectors, params.dim))
    return state


def expected_norm(d: int) -> float:
    """Series approximation of E||N(0, I_d)||, the CSA path-length reference."""
    if d < 1:
        raise ContractViolationError("dimension must be >= 1")
    return math.sqrt(d) * (1.0 - 1.0 / (4.0 * d) + 1.0 / (21.0 * d * d))


def _transform_rows(state: StrategyState, params: StrategyParams, z: np.ndarray) -> np.ndarray:
    if params.variant == "simple":
        return z
    if params.variant == "ma":
        return z @ state.matrix.T
    # lmma: vector j takes part only once generation >= j (1-based), so
    # early sampling stays near-isotropic until vectors carry signal.
    n_active = min(state.generation, params.n_vectors)
    return kernels.lmma_transform(z, state.vectors, params.c_d, n_active)


def transform_apply(state: StrategyState, params: StrategyParams, z: np.ndarray) -> np.ndarray:
    """Apply the current sampling transform to a single direction vector."""
    z = np.asarray(z, dtype=np.float64)
    if z.shape != (params.dim,):
        raise ContractViolationError(f"expected vector of length {params.dim}, got {z.shape}")
    return _transform_rows(state, params, z[None, :])[0]


def ask(state: StrategyState, params: StrategyParams, rng: RngStream) -> np.ndarray:
    """Sample the next population; rows are the lam offspring."""
    if state.pending_tell:
        raise ProtocolError("ask called twice without an intervening tell")
    z = rng.standard_normal((params.lam, params.dim))
    dirs = _transform_rows(state, params, z)
    x = state.m[None, :] + state.sigma * dirs
    state.last_z = z
    state.last_d = dirs
    state.pending_tell = True
    return x


def rank_order(fitnesses: np.ndarray) -> np.ndarray:
    """Ascending fitness order; ties and non-finite values resolved by index."""
    f = np.asarray(fitnesses, dtype=np.float64)
    keys = np.where(np.isfinite(f), f, np.inf)
    return np.argsort(keys, kind="stable")


def _clamp_sigma(state: StrategyState) -> None:
    if state.sigma < SIGMA_FLOOR:
        state.sigma = SIGMA_FLOOR
        state.sigma_bound_hit = "floor"
    elif state.sigma > SIGMA_CEILING:
        state.sigma = SIGMA_CEILING
        state.sigma_bound_hit = "ceiling"


def tell(state: StrategyState, params: StrategyParams, fitnesses) -> StrategyState:
    """Consume the fitness values of the last ask and update all state.

    Offspring are ranked ascending (stable ties by index; non-finite values
    rank strictly worst). If at least ``mu`` values are non-finite the
    update is skipped and the step size is shrunk by 0.8 instead, so a
    diverged population cannot poison the state; if no value is finite at
    all the generation carries no information and `UpdateSkippedError`
    is raised.
    """
    if not state.pending_tell:
        raise ProtocolError("tell called without a matching ask")
    f = np.asarray(fitnesses, dtype=np.float64)
    if f.shape != (params.lam,):
        raise ContractViolationError(f"expected {params.lam} fitness values, got {f.shape}")
    state.pending_tell = False

    finite = np.isfinite(f)
    n_bad = int(params.lam - finite.sum())
    if n_bad == params.lam:
        raise UpdateSkippedError("all fitness values are non-finite")
    if n_bad >= params.mu:
        state.sigma *= 0.8
        _clamp_sigma(state)
        state.generation += 1
        return state

    order = rank_order(f)
    sel = order[: params.mu]
    zw = params.weights @ state.last_z[sel]
    dw = params.weights @ state.last_d[sel]

    state.m = state.m + state.sigma * dw

    cs = params.c_sigma
    state.p_sigma = (1.0 - cs) * state.p_sigma + math.sqrt(
        cs * (2.0 - cs) * params.mu_w
    ) * zw
    if params.variant == "lmma":
        # squared path length against its chi^2 expectation
        excess = float(state.p_sigma @ state.p_sigma) / params.dim - 1.0
        log_step = 0.5 * (cs / params.d_sigma) * excess
    else:
        path_ratio = float(np.linalg.norm(state.p_sigma)) / expected_norm(params.dim)
        log_step = (cs / params.d_sigma) * (path_ratio - 1.0)
    # one generation never moves log(sigma) by more than 1
    state.sigma *= math.exp(min(1.0, max(-1.0, log_step)))
    _clamp_sigma(state)

    if params.variant == "ma":
        # M <- M (I + c_1/2 (p p^T - I) + c_mu/2 (sum_i w_i z_i z_i^T - I)),
        # expanded to low-rank products so the update costs O((mu+1) d^2).
        z_sel = state.last_z[sel]
        shrink = 1.0 - 0.5 * params.c_1 - 0.5 * params.c_mu
        mp = state.matrix @ state.p_sigma
        mz = state.matrix @ z_sel.T
        state.matrix = (
            shrink * state.matrix
            + (0.5 * params.c_1) * np.outer(mp, state.p_sigma)
            + (0.5 * params.c_mu) * ((mz * params.weights) @ z_sel)
        )
    elif params.variant == "lmma":
        cc = params.c_c
        fade = np.sqrt(cc * (2.0 - cc) * params.mu_w)
        state.vectors = (1.0 - cc)[:, None] * state.vectors + fade[:, None] * zw[None, :]

    state.generation += 1
    return state
