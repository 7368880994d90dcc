import math

import numpy as np
import pytest

from hidra import (
    ContractViolationError,
    NoiseModel,
    apply_noise,
    ellipsoid_eigs,
    ellipsoid_objective,
    eval_ellipsoid,
    make_ellipsoid,
    rosenbrock,
    spawn_stream,
)
from hidra.benchmarks import _orthogonal_matrix


class TestEllipsoidEigs:
    def test_endpoints_d2(self):
        assert np.array_equal(ellipsoid_eigs(2, 100.0), [1.0, 100.0])

    def test_unit_condition_is_sphere(self):
        for d in (1, 2, 7, 50):
            assert np.array_equal(ellipsoid_eigs(d, 1.0), np.ones(d))

    def test_geometric_midpoint(self):
        eigs = ellipsoid_eigs(3, 1e6)
        assert eigs == pytest.approx([1.0, 1e3, 1e6], rel=1e-12)

    def test_condition_ratio_exact(self):
        for k in (1.0, 1e2, 1e6):
            eigs = ellipsoid_eigs(37, k)
            assert eigs.max() / eigs.min() == pytest.approx(k, rel=1e-10)
        assert np.all(np.diff(ellipsoid_eigs(37, 1e6)) > 0)

    def test_bad_condition_number(self):
        with pytest.raises(ContractViolationError):
            ellipsoid_eigs(5, 0.5)


class TestEvalEllipsoid:
    def test_optimum(self):
        spec = make_ellipsoid(4, 100.0)
        assert eval_ellipsoid(np.zeros(4), spec) == 0.0

    def test_known_value(self):
        spec = make_ellipsoid(2, 100.0)
        assert eval_ellipsoid(np.ones(2), spec) == pytest.approx(math.sqrt(101), rel=1e-14)

    def test_unit_vector_on_sphere(self):
        spec = make_ellipsoid(20, 1.0)
        e7 = np.zeros(20)
        e7[6] = 1.0
        assert eval_ellipsoid(e7, spec) == 1.0

    def test_absolute_homogeneity(self, rng):
        spec = make_ellipsoid(10, 1e4)
        x = rng.standard_normal(10)
        base = eval_ellipsoid(x, spec)
        for a in (-3.0, 0.5, 2.0, -0.125):
            assert eval_ellipsoid(a * x, spec) == pytest.approx(abs(a) * base, rel=1e-12)

    def test_tiny_values_do_not_underflow(self):
        spec = make_ellipsoid(10, 1.0)
        x = np.full(10, 1e-250)
        assert eval_ellipsoid(x, spec) == pytest.approx(1e-250 * math.sqrt(10), rel=1e-12)

    def test_huge_values_do_not_overflow(self):
        spec = make_ellipsoid(10, 1.0)
        x = np.full(10, 1e200)
        assert eval_ellipsoid(x, spec) == pytest.approx(1e200 * math.sqrt(10), rel=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ContractViolationError):
            eval_ellipsoid(np.zeros(3), make_ellipsoid(4, 10.0))


class TestRosenbrock:
    def test_global_optimum(self):
        for d in (2, 5, 30):
            assert rosenbrock(np.ones(d)) == 0.0

    def test_origin_2d(self):
        assert rosenbrock(np.zeros(2)) == 1.0

    def test_reflected_point(self):
        assert rosenbrock(np.array([-1.0, 1.0])) == 4.0

    def test_needs_two_dims(self):
        with pytest.raises(ContractViolationError):
            rosenbrock(np.array([1.0]))


class TestNoiseModels:
    def test_none_is_identity(self, rng):
        assert apply_noise(3.2, NoiseModel.none(), rng) == 3.2

    def test_zero_strength_normalizes_to_none(self):
        assert NoiseModel.multiplicative(0.0) == NoiseModel.none()
        assert NoiseModel.additive(0.0) == NoiseModel.none()
        assert NoiseModel.thresholded_additive(0.0, 3.5) == NoiseModel.none()

    def test_zero_strength_consumes_no_draws(self, rng):
        state_before = rng.bit_generator.state
        apply_noise(1.0, NoiseModel.multiplicative(0.0), rng)
        assert rng.bit_generator.state == state_before

    def test_threshold_region_noise_free(self, rng):
        model = NoiseModel.thresholded_additive(1.0, 3.5)
        for _ in range(100):
            assert apply_noise(3.4, model, rng) == 3.4

    def test_above_threshold_is_noisy(self, rng):
        model = NoiseModel.thresholded_additive(1.0, 3.5)
        values = {apply_noise(3.6, model, rng) for _ in range(16)}
        assert len(values) > 1

    def test_multiplicative_bounds_and_mean(self):
        rng = spawn_stream(5, 0)
        model = NoiseModel.multiplicative(0.5)
        samples = np.array([apply_noise(10.0, model, rng) for _ in range(100_000)])
        assert abs(samples.mean() - 10.0) < 0.1
        assert samples.min() >= 5.0
        assert samples.max() <= 15.0

    def test_additive_mean_and_scale(self):
        rng = spawn_stream(6, 0)
        model = NoiseModel.additive(2.0)
        samples = np.array([apply_noise(1.0, model, rng) for _ in range(100_000)])
        assert abs(samples.mean() - 1.0) < 0.05
        assert abs(samples.std() - 2.0) < 0.05

    def test_negative_strength_rejected(self):
        with pytest.raises(ContractViolationError):
            NoiseModel.additive(-1.0)


class TestRotation:
    def test_rotation_matrix_is_orthogonal(self):
        q = _orthogonal_matrix(12, seed=99)
        assert np.allclose(q @ q.T, np.eye(12), atol=1e-12)

    def test_rotated_objective_preserves_norm_at_sphere(self, rng):
        plain = ellipsoid_objective(8, 1.0)
        rotated = ellipsoid_objective(8, 1.0, rotation_seed=3)
        x = rng.standard_normal(8)
        # the sphere is rotation invariant, so both references agree
        assert rotated.reference(x) == pytest.approx(plain.reference(x), rel=1e-12)

    def test_rotated_ellipsoid_differs(self, rng):
        plain = ellipsoid_objective(8, 1e4)
        rotated = ellipsoid_objective(8, 1e4, rotation_seed=3)
        x = rng.standard_normal(8)
        assert rotated.reference(x) != pytest.approx(plain.reference(x), rel=1e-6)


class TestObjectiveContract:
    def test_noise_free_eval_equals_reference(self, rng):
        obj = ellipsoid_objective(6, 100.0)
        x = rng.standard_normal(6)
        assert obj.eval(x, rng) == obj.reference(x)

    def test_noisy_eval_differs_from_reference(self):
        obj = ellipsoid_objective(6, 100.0, NoiseModel.additive(1.0))
        rng = spawn_stream(1, 0)
        x = np.ones(6)
        values = {obj.eval(x, rng) for _ in range(8)}
        assert len(values) > 1
        assert obj.reference(x) == obj.reference(x)
