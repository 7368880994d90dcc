import numpy as np
import pytest

from hidra import (
    StopCriteria,
    default_params,
    default_stop_criteria,
    init_state,
    restart_params,
    should_stop,
    spawn_stream,
)


def make_state(d=6, sigma=0.5):
    p = default_params(d, "simple")
    return p, init_state(p, np.zeros(d), sigma)


class TestShouldStop:
    def test_sigma_below_floor(self):
        p, st = make_state(sigma=1e-20)
        crit = StopCriteria(sigma_floor=1e-15)
        assert should_stop(st, [1.0], crit) == "sigma_below_floor"

    def test_hard_ceiling_flag_reported(self):
        p, st = make_state()
        st.sigma_bound_hit = "ceiling"
        assert should_stop(st, [1.0], StopCriteria()) == "sigma_above_ceiling"

    def test_improving_history_continues(self):
        p, st = make_state()
        history = [10.0 / (g + 1) for g in range(500)]
        crit = StopCriteria(stagnation_gens=100, max_gens=10_000)
        assert should_stop(st, history, crit) is None

    def test_stagnation_detected(self):
        p, st = make_state()
        history = [5.0] + [4.0] * 200
        crit = StopCriteria(stagnation_gens=100)
        assert should_stop(st, history, crit) == "stagnation"

    def test_max_generations(self):
        p, st = make_state()
        st.generation = 50
        crit = StopCriteria(max_gens=50)
        assert should_stop(st, [1.0], crit) == "max_generations"

    def test_target_reached(self):
        p, st = make_state()
        crit = StopCriteria(target_fitness=1e-8)
        assert should_stop(st, [1.0, 9e-9], crit) == "target_reached"

    def test_non_finite_state(self):
        p, st = make_state()
        st.m[0] = np.nan
        assert should_stop(st, [1.0], StopCriteria()) == "non_finite_state"

    def test_empty_history_rejected(self):
        from hidra import ContractViolationError

        p, st = make_state()
        with pytest.raises(ContractViolationError):
            should_stop(st, [], StopCriteria())

    def test_default_criteria_scale_with_dimension(self):
        crit = default_stop_criteria(d=1000, lam=20)
        assert crit.stagnation_gens == 100 + 30 * 1000 // 20


class TestRestartParams:
    def test_population_doubles(self, rng):
        prev = default_params(20, "lmma")
        assert prev.lam == 12
        params, m0, sigma0 = restart_params(prev, ((-1.0, 1.0), 0.3), rng)
        assert params.lam == 24
        assert params.mu == 12
        assert params.variant == "lmma"
        assert sigma0 == 0.3

    def test_rates_recomputed_for_doubled_population(self, rng):
        prev = default_params(20, "ma")
        params, _, _ = restart_params(prev, ((-1.0, 1.0), 0.3), rng)
        assert params.mu_w > prev.mu_w
        assert params.weights.shape == (params.mu,)
        assert abs(params.weights.sum() - 1.0) < 1e-12

    def test_fresh_state_is_reset(self, rng):
        prev = default_params(8, "ma")
        params, m0, sigma0 = restart_params(prev, ((-2.0, 2.0), 0.5), rng)
        st = init_state(params, m0, sigma0)
        assert np.array_equal(st.matrix, np.eye(8))
        assert np.array_equal(st.p_sigma, np.zeros(8))
        assert st.generation == 0
        assert np.all((m0 >= -2.0) & (m0 <= 2.0))

    def test_redraw_is_deterministic_per_stream(self):
        prev = default_params(8, "simple")
        draws = []
        for _ in range(2):
            rng = spawn_stream(77, 0)
            _, m_a, _ = restart_params(prev, ((-1.0, 1.0), 0.3), rng)
            _, m_b, _ = restart_params(prev, ((-1.0, 1.0), 0.3), rng)
            draws.append((m_a, m_b))
        assert np.array_equal(draws[0][0], draws[1][0])
        assert np.array_equal(draws[0][1], draws[1][1])
        assert not np.array_equal(draws[0][0], draws[0][1])
