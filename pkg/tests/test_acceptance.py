"""Acceptance suite: one test per shipped claim, each printing a PASS/FAIL line.

Heavy experiment cells run once per session through module-scoped fixtures
(two worker processes) and are shared between checks. Everything is
deterministic given the frozen seeds. A full run takes tens of minutes;
run with ``pytest tests/test_acceptance.py -v -s`` to see the summary lines
as they appear. The noise-rescue cell additionally leaves its CSV traces in
``results/criterion6/`` so the plot frontend can be pointed at real data.
"""
import math
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import pytest

from hidra import NoiseModel, PointMassObjective, spawn_stream
from hidra.harness.config import RunSpec
from hidra.harness.runner import run_single
from hidra.harness.trace import aggregate_runs, write_aggregate_csv, write_csv

RESULTS_DIR = Path(__file__).resolve().parent.parent / "results"

pytestmark = pytest.mark.slow


# ---------------------------------------------------------------------------
# execution helpers
# ---------------------------------------------------------------------------

def _run_one(task):
    label, run_id, spec = task
    return label, run_id, run_single(spec, run_id)


def run_cells(cells: dict, jobs: int = 2) -> dict:
    """Execute {label: RunSpec} with per-repetition parallelism."""
    tasks = [
        (label, run_id, spec)
        for label, spec in cells.items()
        for run_id in range(spec.runs)
    ]
    out = {label: {} for label in cells}
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for label, run_id, rows in pool.map(_run_one, tasks):
            out[label][run_id] = rows
    return {
        label: [row for run_id in sorted(runs) for row in runs[run_id]]
        for label, runs in out.items()
    }


def curves(rows, metric="ref_fitness_at_mean"):
    """Per-run (evals, metric) arrays keyed by run_id."""
    by_run = {}
    for r in rows:
        by_run.setdefault(r.run_id, []).append(r)
    out = {}
    for run_id, rs in by_run.items():
        rs = sorted(rs, key=lambda r: r.evals_used)
        out[run_id] = (
            np.array([r.evals_used for r in rs], dtype=float),
            np.array([getattr(r, metric) for r in rs], dtype=float),
        )
    return out


def final_values(rows, metric="ref_fitness_at_mean"):
    return np.array([ys[-1] for _, ys in curves(rows, metric).values()])


def fit_slope(evals, values, window):
    lo, hi = window
    mask = (evals >= lo) & (evals <= hi) & np.isfinite(values) & (values > 0)
    if mask.sum() < 3:
        raise AssertionError("not enough points in the slope window")
    return np.polyfit(evals[mask], np.log(values[mask]), 1)[0]


def report(number, name, passed, detail):
    print(f"\nACCEPTANCE {number} {'PASS' if passed else 'FAIL'} - {name}: {detail}")
    assert passed, f"criterion {number} ({name}): {detail}"


# ---------------------------------------------------------------------------
# criterion 1: linear convergence, halving time grows with dimension
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def halving_runs():
    cells = {}
    for seed in range(1, 6):
        cells[f"d20_{seed}"] = RunSpec(
            algorithm="simple", problem="sphere", d=20, budget=20_000,
            runs=1, seed=seed, log_every=2, sigma_floor=1e-140,
        )
        cells[f"d200_{seed}"] = RunSpec(
            algorithm="simple", problem="sphere", d=200, budget=150_000,
            runs=1, seed=seed, log_every=5, sigma_floor=1e-140,
        )
    return run_cells(cells)


def halving_evals(rows):
    (evals, ref), = curves(rows).values()
    n = len(evals)
    window = (evals[int(0.1 * n)], evals[int(0.9 * n)])
    slope = fit_slope(evals, ref, window)  # ln units per evaluation
    return math.log(2.0) / -slope


def test_criterion_1_halving_time_ratio(halving_runs):
    h20 = np.mean([halving_evals(halving_runs[f"d20_{s}"]) for s in range(1, 6)])
    h200 = np.mean([halving_evals(halving_runs[f"d200_{s}"]) for s in range(1, 6)])
    ratio = h200 / h20
    report(
        1, "halving time grows linearly with dimension",
        5.0 <= ratio <= 30.0,
        f"evals per fitness halving: d=20 {h20:.0f}, d=200 {h200:.0f}, "
        f"ratio {ratio:.2f} (required within [5, 30], ideal 10)",
    )


# ---------------------------------------------------------------------------
# criterion 2: metric learning pays off on ill-conditioned problems
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def conditioning_runs():
    cells = {}
    for algo in ("simple", "ma", "lmma"):
        cells[algo] = RunSpec(
            algorithm=algo, problem="ellipsoid", k=1e6, d=20, budget=200_000,
            runs=5, seed=1, log_every=200,
        )
    return run_cells(cells)


def test_criterion_2_metric_learning_gap(conditioning_runs):
    med = {
        algo: float(np.median(final_values(conditioning_runs[algo])))
        for algo in ("simple", "ma", "lmma")
    }
    gap_ma = med["simple"] / med["ma"]
    gap_lmma = med["simple"] / med["lmma"]
    report(
        2, "full and low-rank metric learning beat the simple ES by 1000x",
        gap_ma >= 1e3 and gap_lmma >= 1e3,
        f"median final reference fitness: simple {med['simple']:.3g}, "
        f"ma {med['ma']:.3g} (gap {gap_ma:.1e}), "
        f"lmma {med['lmma']:.3g} (gap {gap_lmma:.1e}); required gap 1e3",
    )


# ---------------------------------------------------------------------------
# criterion 3: full-matrix adaptation needs Theta(d^2) samples
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def adaptation_runs():
    common = dict(algorithm="ma", runs=1, seed=1, sigma_floor=1e-250,
                  stagnation_gens=10**9)
    cells = {
        "sphere_500": RunSpec(problem="sphere", d=500, budget=1_000_000,
                              log_every=100, **common),
        "elli_500": RunSpec(problem="ellipsoid", k=1e6, d=500, budget=1_000_000,
                            log_every=100, **common),
        "sphere_20": RunSpec(problem="sphere", d=20, budget=40_000,
                             log_every=10, **common),
        "elli_20": RunSpec(problem="ellipsoid", k=1e6, d=20, budget=60_000,
                           log_every=10, **common),
    }
    return run_cells(cells)


def test_criterion_3_adaptation_sample_cost(adaptation_runs):
    def final_slope(label, budget):
        (evals, ref), = curves(adaptation_runs[label]).values()
        return fit_slope(evals, ref, (0.8 * budget, budget + 1))

    s_sphere_500 = final_slope("sphere_500", 1_000_000)
    s_elli_500 = final_slope("elli_500", 1_000_000)
    s_sphere_20 = final_slope("sphere_20", 40_000)
    s_elli_20 = final_slope("elli_20", 60_000)
    ratio_500 = s_elli_500 / s_sphere_500  # < 1 means shallower than sphere
    ratio_20 = s_elli_20 / s_sphere_20
    incomplete_500 = ratio_500 < 0.5
    complete_20 = 0.5 <= ratio_20 <= 2.0
    report(
        3, "matrix adaptation incomplete at d=500 within 1e6 evals, complete at d=20",
        incomplete_500 and complete_20,
        f"final-window slope ratios ellipsoid/sphere: d=500 {ratio_500:.3g} "
        f"(required < 0.5), d=20 {ratio_20:.3g} (required in [0.5, 2])",
    )


# ---------------------------------------------------------------------------
# criterion 4: additive noise imposes a stall floor
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def additive_floor_runs():
    cells = {}
    for algo in ("simple", "ma", "lmma"):
        cells[algo] = RunSpec(
            algorithm=algo, problem="sphere", d=200, budget=1_000_000,
            noise=NoiseModel.additive(1.0), runs=5, seed=1, log_every=100,
            stagnation_gens=10**9, sigma_floor=1e-250,
        )
    return run_cells(cells)


def test_criterion_4_additive_noise_floor(additive_floor_runs):
    budget = 1_000_000
    grid = np.linspace(0.9 * budget, budget, 21)
    details = []
    ok = True
    for algo in ("simple", "ma", "lmma"):
        per_run = curves(additive_floor_runs[algo])
        interp = np.array([np.interp(grid, e, v) for e, v in per_run.values()])
        med = np.median(interp, axis=0)
        rel = abs(med[-1] - med[0]) / med[0]
        ok = ok and med.min() > 1e-3 and rel < 0.10
        details.append(f"{algo} floor~{np.median(med):.3g} rel-change {rel:.3f}")
    report(
        4, "all three algorithms stall on the additive-noise sphere",
        ok,
        "; ".join(details) + " (required: positive floor, <10% drift over last 10% of budget)",
    )


# ---------------------------------------------------------------------------
# criterion 5: strong multiplicative noise causes divergence
# ---------------------------------------------------------------------------

@pytest.fixture(scope="module")
def multiplicative_runs():
    spec = RunSpec(
        algorithm="simple", problem="sphere", d=200, budget=300_000,
        noise=NoiseModel.multiplicative(4.0), runs=5, seed=1, log_every=50,
        stagnation_gens=10**9,
    )
    return run_cells({"mul": spec})


def test_criterion_5_multiplicative_divergence(multiplicative_runs):
    n_diverged = 0
    details = []
    for run_id, (evals, ref) in sorted(curves(multiplicative_runs["mul"]).items()):
        f10 = float(np.interp(0.1 * 300_000, evals, ref))
        fend = float(ref[-1])
        n_diverged += fend > f10
        details.append(f"run {run_id}: {f10:.3g}->{fend:.3g}")
    report(
        5, "strong multiplicative noise drives the simple ES away from the optimum",
        n_diverged >= 3,
        f"{n_diverged}/5 runs grew between 10% budget and the end "
        f"({'; '.join(details)}); required >= 3",
    )


# ---------------------------------------------------------------------------
# criterion 6: thresholded additive noise, re-evaluation rescue
# ---------------------------------------------------------------------------

C6_BUDGET = 2_000_000
C6_NOISE = NoiseModel.thresholded_additive(0.1, 3.5)


@pytest.fixture(scope="module")
def rescue_runs():
    common = dict(
        algorithm="lmma", problem="ellipsoid", k=100.0, d=2000,
        budget=C6_BUDGET, noise=C6_NOISE, runs=5, seed=1, log_every=200,
        stagnation_gens=10**9, sigma_floor=1e-250,
    )
    cells = {
        "plain": RunSpec(uh=False, **common),
        "uh": RunSpec(uh=True, target_fitness=1e-4, **common),
    }
    results = run_cells(cells)
    out = RESULTS_DIR / "criterion6"
    for label, rows in results.items():
        write_csv(rows, out / f"{label}_trace.csv")
        write_aggregate_csv(aggregate_runs(rows), out / f"{label}_agg.csv")
    return results


def test_criterion_6_uncertainty_handling_rescue(rescue_runs):
    plain_final = final_values(rescue_runs["plain"])
    uh_mins = np.array([ys.min() for _, ys in curves(rescue_runs["uh"]).values()])
    plain_med = float(np.median(plain_final))
    rescued = int((uh_mins < 1e-2).sum())
    report(
        6, "re-evaluation averaging crosses the noise threshold, plain stalls above it",
        plain_med > 3.5 and rescued >= 3,
        f"plain median final reference {plain_med:.3g} (required > 3.5); "
        f"best reached per re-evaluating run: {np.array2string(uh_mins, precision=2, formatter={'float_kind': lambda v: f'{v:.2g}'})}, "
        f"{rescued}/5 below 1e-2 (required >= 3)",
    )


# ---------------------------------------------------------------------------
# criterion 7: uncertainty handling stabilizes controller training
# ---------------------------------------------------------------------------

C7_BUDGET = 200_000


@pytest.fixture(scope="module")
def control_runs():
    common = dict(
        algorithm="lmma", problem="pointmass", d=1472, budget=C7_BUDGET,
        runs=6, seed=1, log_every=20, stagnation_gens=10**9,
    )
    return run_cells({
        "plain": RunSpec(uh=False, **common),
        "uh": RunSpec(uh=True, **common),
    })


def _monotone_envelope(values):
    return np.minimum.accumulate(values)


def test_criterion_7_uh_stabilizes_control(control_runs):
    plain_sigma = final_values(control_runs["plain"], "sigma")
    uh_sigma = final_values(control_runs["uh"], "sigma")
    plain_std = final_values(control_runs["plain"], "fitness_std")
    uh_std = final_values(control_runs["uh"], "fitness_std")
    sigma_ratio = float(np.median(uh_sigma) / np.median(plain_sigma))
    std_ratio = float(np.median(uh_std) / np.median(plain_std))

    plain_curves = curves(control_runs["plain"], "mean_fitness")
    uh_curves = curves(control_runs["uh"], "mean_fitness")
    quarter = 0.25 * C7_BUDGET
    faster = 0
    for run_id in range(6):
        ue, uv = uh_curves[run_id]
        pe, pv = plain_curves[run_id]
        level = float(np.interp(quarter, ue, _monotone_envelope(uv)))
        env = _monotone_envelope(pv)
        hit = pe[env <= level]
        if hit.size and hit[0] < quarter:
            faster += 1

    report(
        7, "re-evaluation keeps the step size up and the fitness spread down",
        sigma_ratio >= 2.0 and std_ratio <= 0.5 and faster >= 4,
        f"final step-size median ratio uh/plain {sigma_ratio:.2f} (required >= 2); "
        f"final fitness-spread median ratio {std_ratio:.2f} (required <= 0.5); "
        f"plain earlier at the re-evaluating run's 25%-budget level in {faster}/6 runs "
        f"(required >= 4)",
    )


def test_control_task_improves_over_zero_policy(control_runs):
    # zero-policy Monte Carlo baseline with a dedicated stream
    obj = PointMassObjective()
    rng = spawn_stream(999, 0)
    baseline = float(np.mean([obj.eval(np.zeros(obj.dim), rng) for _ in range(200)]))
    finals = final_values(control_runs["uh"], "mean_fitness")
    improvement = baseline / float(np.median(finals))
    report(
        "7b", "direct policy search improves on the zero controller",
        improvement >= 3.0,
        f"zero-policy baseline {baseline:.0f}, median trained fitness "
        f"{float(np.median(finals)):.1f}, improvement {improvement:.1f}x (required >= 3)",
    )


# ---------------------------------------------------------------------------
# criterion 8: always-runnable property suite (seconds)
# ---------------------------------------------------------------------------

def test_criterion_8_property_suite():
    import hidra
    from hidra import (
        Budget, ask, default_params, evaluate_counted, init_state,
        rank_change, tell,
    )
    from hidra.benchmarks import ellipsoid_eigs, eval_ellipsoid, make_ellipsoid, rosenbrock

    checks = []

    # monotone-transform invariance: exact state equality over 50 generations
    def trajectory(warp):
        p = default_params(8, "ma")
        st = init_state(p, spawn_stream(31, 0).uniform(-1, 1, 8), 0.4)
        rng = spawn_stream(31, 1)
        states = []
        for _ in range(50):
            x = ask(st, p, rng)
            f = [warp(float(np.linalg.norm(xi))) for xi in x]
            tell(st, p, np.asarray(f))
            states.append((st.m.copy(), st.sigma, st.matrix.copy()))
        return states

    plain = trajectory(lambda v: v)
    warped = trajectory(lambda v: 8.0 * v)
    checks.append((
        "monotone invariance",
        all(
            np.array_equal(m1, m2) and s1 == s2 and np.array_equal(t1, t2)
            for (m1, s1, t1), (m2, s2, t2) in zip(plain, warped)
        ),
    ))

    # rotation invariance within 1e-6 over 50 generations
    g = spawn_stream(77, 0).standard_normal((8, 8))
    q, r = np.linalg.qr(g)
    q *= np.sign(np.diag(r))
    eigs = np.power(100.0, np.arange(8) / 7.0)

    def run_rotated(rotation, fitness):
        p = default_params(8, "ma")
        m0 = spawn_stream(33, 0).uniform(-1, 1, 8)
        st = init_state(p, m0 if rotation is None else q.T @ m0, 0.4)
        rng = spawn_stream(33, 1)
        best = []
        for _ in range(50):
            z = rng.standard_normal((p.lam, 8))
            if rotation is not None:
                z = z @ rotation
            dirs = z @ st.matrix.T
            x = st.m[None, :] + st.sigma * dirs
            st.last_z, st.last_d, st.pending_tell = z, dirs, True
            f = np.asarray([fitness(xi) for xi in x])
            tell(st, p, f)
            best.append(f.min())
        return np.asarray(best)

    base = run_rotated(None, lambda x: math.sqrt(float(eigs @ (x * x))))
    rot = run_rotated(q, lambda x: math.sqrt(float(eigs @ ((q @ x) ** 2))))
    checks.append((
        "rotation invariance",
        bool(np.allclose(rot, base, rtol=1e-6)),
    ))

    # one-step full-matrix oracle at 1e-12
    p = default_params(3, "ma", lam=6)
    rng = spawn_stream(103, 0)
    st = init_state(p, rng.uniform(-1, 1, 3), 0.4)
    x = ask(st, p, rng)
    f = np.asarray([float(np.linalg.norm(xi)) for xi in x])
    z = st.last_z.copy()
    m_before = st.matrix.copy()
    p_before = st.p_sigma.copy()
    tell(st, p, f)
    order = sorted(range(6), key=lambda i: (f[i], i))
    zw = sum(w * z[i] for w, i in zip(p.weights, order[: p.mu]))
    cs = p.c_sigma
    p_new = (1 - cs) * p_before + math.sqrt(cs * (2 - cs) * p.mu_w) * zw
    rank_mu = sum(w * np.outer(z[i], z[i]) for w, i in zip(p.weights, order[: p.mu]))
    update = (
        np.eye(3)
        + 0.5 * p.c_1 * (np.outer(p_new, p_new) - np.eye(3))
        + 0.5 * p.c_mu * (rank_mu - np.eye(3))
    )
    expected = m_before @ update
    checks.append((
        "ma one-step oracle",
        bool(
            np.allclose(st.matrix @ st.matrix.T, expected @ expected.T,
                        rtol=0, atol=1e-12)
        ),
    ))

    # hand-enumerated rank-change cases
    checks.append((
        "rank-change hand cases",
        rank_change([1.0, 2.0, 3.0, 4.0], {0: 5.0}, 4) == 1.0
        and rank_change([1.0, 2.0, 3.0, 4.0], {1: 2.5}, 4) == 0.0,
    ))

    # budget-counting exactness
    obj = hidra.sphere_objective(3)
    budget = Budget(100)
    rng = spawn_stream(7, 0)
    for _ in range(5):
        evaluate_counted(obj, np.zeros(3), budget, rng)
    checks.append(("budget counting", budget.used == 5))

    # benchmark analytic values
    checks.append((
        "benchmark analytic values",
        abs(eval_ellipsoid(np.ones(2), make_ellipsoid(2, 100.0)) - math.sqrt(101)) < 1e-12
        and rosenbrock(np.ones(5)) == 0.0
        and np.array_equal(ellipsoid_eigs(2, 100.0), [1.0, 100.0]),
    ))

    # RNG stream statistics
    draws = spawn_stream(42, 7).standard_normal(100_000)
    checks.append((
        "rng statistics",
        abs(float(draws.mean())) < 0.02 and abs(float(draws.var()) - 1) < 0.05,
    ))

    failed = [name for name, ok in checks if not ok]
    report(
        8, "property suite",
        not failed,
        "all properties hold" if not failed else f"failed: {', '.join(failed)}",
    )
