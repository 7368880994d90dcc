"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

Two inner loops dominate runtime at scale: the sequential low-rank sampling
transform (applied to every offspring every generation) and the controller
rollout (a stepwise simulation that cannot be vectorized over time). Both
are implemented twice:

* a numba ``@njit`` version compiled on first use (``cache=True``), and
* a pure-numpy version with identical semantics.

The active backend is chosen once at import time from the ``HIDRA_BACKEND``
environment variable: ``auto`` (default) uses numba when importable,
``numba`` requires it, ``numpy`` forces the fallback. ``IMPLEMENTATIONS``
exposes both variants regardless of the selection so they can be compared
directly (see ``perf/bench_kernels.py`` and ``tests/test_kernels.py``).
"""
from __future__ import annotations

import math
import os

import numpy as np

_VALID_BACKENDS = ("auto", "numba", "numpy")


def _resolve_backend() -> str:
    choice = os.environ.get("HIDRA_BACKEND", "auto").strip().lower()
    if choice not in _VALID_BACKENDS:
        raise ValueError(
            f"HIDRA_BACKEND must be one of {_VALID_BACKENDS}, got {choice!r}"
        )
    if choice == "numpy":
        return "numpy"
    try:
        import numba  # noqa: F401
    except ImportError:
        if choice == "numba":
            raise
        return "numpy"
    return "numba"


BACKEND = _resolve_backend()


# ---------------------------------------------------------------------------
# Low-rank sampling transform
#
# Rows of `z` are isotropic normal draws; each stored direction vector v_j
# mixes its own projection back into every row:
#     row <- (1 - c_d[j]) * row + c_d[j] * v_j * (v_j . row),  j = 1..n_active
# applied sequentially, so the result depends on vector order.
# ---------------------------------------------------------------------------

def _lmma_mix_inplace(out, vectors, c_d, n_active):
    lam, d = out.shape
    for j in range(n_active):
        c = c_d[j]
        base = 1.0 - c
        v = vectors[j]
        for i in range(lam):
            dot = 0.0
            for t in range(d):
                dot += v[t] * out[i, t]
            cdot = c * dot
            for t in range(d):
                out[i, t] = base * out[i, t] + cdot * v[t]


def lmma_transform_numpy(z, vectors, c_d, n_active):
    """Pure-numpy sequential low-rank transform; returns a new array."""
    out = np.array(z, dtype=np.float64, copy=True, order="C")
    if out.ndim != 2:
        raise ValueError("z must be a (population, dim) matrix")
    for j in range(int(n_active)):
        proj = out @ vectors[j]
        out *= 1.0 - c_d[j]
        out += np.outer(c_d[j] * proj, vectors[j])
    return out


# ---------------------------------------------------------------------------
# Controller rollout
#
# theta is the flat parameter vector of a fully connected tanh network:
# per layer, the (out x in) weight matrix in row-major order, then the bias.
# The point mass integrates  vel += action + noise;  pos += vel  and the
# per-step reward is the negated distance to the target; the kernel returns
# the negated discounted return (a minimization fitness).
# ---------------------------------------------------------------------------

def _rollout_steps(theta, sizes, pos0, vel0, target, step_noise, gamma, action_scale, tau):
    n_layers = sizes.shape[0]
    width = 6
    for li in range(n_layers):
        if sizes[li] > width:
            width = sizes[li]
    buf_a = np.empty(width, dtype=np.float64)
    buf_b = np.empty(width, dtype=np.float64)
    pos_x = pos0[0]
    pos_y = pos0[1]
    vel_x = vel0[0]
    vel_y = vel0[1]
    tx = target[0]
    ty = target[1]
    ret = 0.0
    disc = 1.0
    for t in range(tau):
        buf_a[0] = pos_x
        buf_a[1] = pos_y
        buf_a[2] = vel_x
        buf_a[3] = vel_y
        buf_a[4] = tx - pos_x
        buf_a[5] = ty - pos_y
        src = buf_a
        dst = buf_b
        off = 0
        for li in range(n_layers - 1):
            nin = sizes[li]
            nout = sizes[li + 1]
            boff = off + nin * nout
            for o in range(nout):
                acc = theta[boff + o]
                row = off + o * nin
                for k in range(nin):
                    acc += theta[row + k] * src[k]
                dst[o] = math.tanh(acc)
            off = boff + nout
            tmp = src
            src = dst
            dst = tmp
        vel_x += action_scale * src[0] + step_noise[t, 0]
        vel_y += action_scale * src[1] + step_noise[t, 1]
        pos_x += vel_x
        pos_y += vel_y
        dx = pos_x - tx
        dy = pos_y - ty
        ret += disc * (-math.sqrt(dx * dx + dy * dy))
        disc *= gamma
    if not math.isfinite(ret):
        return math.inf
    return -ret


def rollout_numpy(theta, sizes, pos0, vel0, target, step_noise, gamma, action_scale, tau):
    """Pure-numpy rollout: same stepping as the jitted kernel, layer math via BLAS."""
    n_layers = len(sizes)
    layers = []
    off = 0
    for li in range(n_layers - 1):
        nin, nout = int(sizes[li]), int(sizes[li + 1])
        w = theta[off : off + nin * nout].reshape(nout, nin)
        off += nin * nout
        b = theta[off : off + nout]
        off += nout
        layers.append((w, b))
    pos = np.array(pos0, dtype=np.float64)
    vel = np.array(vel0, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    ret = 0.0
    disc = 1.0
    for t in range(tau):
        h = np.concatenate((pos, vel, target - pos))
        for w, b in layers:
            h = np.tanh(w @ h + b)
        vel = vel + action_scale * h + step_noise[t]
        pos = pos + vel
        ret += disc * (-math.hypot(pos[0] - target[0], pos[1] - target[1]))
        disc *= gamma
    if not math.isfinite(ret):
        return math.inf
    return -ret


# ---------------------------------------------------------------------------
# Backend wiring
# ---------------------------------------------------------------------------

IMPLEMENTATIONS: dict[str, dict] = {
    "numpy": {"lmma_transform": lmma_transform_numpy, "rollout": rollout_numpy},
}

if BACKEND == "numba":
    from numba import njit

    _lmma_mix_jit = njit(cache=True)(_lmma_mix_inplace)
    _rollout_jit = njit(cache=True)(_rollout_steps)

    def lmma_transform_numba(z, vectors, c_d, n_active):
        out = np.array(z, dtype=np.float64, copy=True, order="C")
        if out.ndim != 2:
            raise ValueError("z must be a (population, dim) matrix")
        _lmma_mix_jit(out, vectors, c_d, int(n_active))
        return out

    def rollout_numba(theta, sizes, pos0, vel0, target, step_noise, gamma, action_scale, tau):
        return _rollout_jit(
            theta, sizes, pos0, vel0, target, step_noise, float(gamma),
            float(action_scale), int(tau),
        )

    IMPLEMENTATIONS["numba"] = {
        "lmma_transform": lmma_transform_numba,
        "rollout": rollout_numba,
    }
    lmma_transform = lmma_transform_numba
    rollout = rollout_numba
else:
    lmma_transform = lmma_transform_numpy
    rollout = rollout_numpy
