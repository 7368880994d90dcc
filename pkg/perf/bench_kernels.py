#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy fallbacks.

Run as a script; prints per-call timings and speedups for the two hot
kernels (low-rank sampling transform, controller rollout) over a small grid
of problem sizes. Works regardless of HIDRA_BACKEND because it times the
implementations directly.

    python3 perf/bench_kernels.py [--repeats N]
"""
import argparse
import time

import numpy as np

from hidra import kernels, spawn_stream
from hidra.control import param_count


def best_of(fn, repeats, inner):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn()
        best = min(best, (time.perf_counter() - t0) / inner)
    return best


def bench_lmma(repeats):
    print("low-rank transform: (lam x d) draws through n_vectors mixing vectors")
    rng = spawn_stream(1, 0)
    for d, lam in ((200, 19), (2000, 26), (8000, 31)):
        z = rng.standard_normal((lam, d))
        vectors = rng.standard_normal((lam, d)) * 0.3
        c_d = 1.0 / (1.5 ** np.arange(lam) * d)
        rows = {}
        for name, impl in kernels.IMPLEMENTATIONS.items():
            fn = impl["lmma_transform"]
            fn(z, vectors, c_d, lam)  # warm-up / jit
            rows[name] = best_of(lambda: fn(z, vectors, c_d, lam), repeats, inner=20)
        line = f"  d={d:5d} lam={lam:2d}:"
        for name, t in sorted(rows.items()):
            line += f"  {name} {t * 1e6:9.1f} us"
        if "numba" in rows:
            line += f"  speedup {rows['numpy'] / rows['numba']:5.2f}x"
        print(line)


def bench_rollout(repeats):
    print("controller rollout: tanh policy on the point-mass task, 100 steps")
    rng = spawn_stream(2, 0)
    for hidden in ((30, 30, 10), (64, 64)):
        sizes = np.asarray((6, *hidden, 2), dtype=np.int64)
        theta = 0.3 * rng.standard_normal(param_count(tuple(sizes)))
        pos0 = rng.uniform(-1, 1, 2)
        vel0 = np.zeros(2)
        target = np.zeros(2)
        noise = 0.05 * rng.standard_normal((100, 2))
        args = (theta, sizes, pos0, vel0, target, noise, 1.0, 0.1, 100)
        rows = {}
        for name, impl in kernels.IMPLEMENTATIONS.items():
            fn = impl["rollout"]
            fn(*args)  # warm-up / jit
            rows[name] = best_of(lambda: fn(*args), repeats, inner=50)
        line = f"  hidden={str(hidden):14s}:"
        for name, t in sorted(rows.items()):
            line += f"  {name} {t * 1e6:9.1f} us"
        if "numba" in rows:
            line += f"  speedup {rows['numpy'] / rows['numba']:5.2f}x"
        print(line)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repetitions; the best is reported")
    args = parser.parse_args()
    print(f"selected backend: {kernels.BACKEND}; "
          f"available: {sorted(kernels.IMPLEMENTATIONS)}")
    bench_lmma(args.repeats)
    bench_rollout(args.repeats)


if __name__ == "__main__":
    main()
