import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nullattack.core import (BoxLimit, FrozenIterateError, clip_offset,
                             limit_ranges, make_rng, project,
                             sample_hyperellipsoid, sample_unit_sphere,
                             scale_vector)


class TestBoxLimit:
    def test_from_center_clips_to_unit_box(self):
        limit = BoxLimit.from_center([0.05, 0.95], 0.1)
        np.testing.assert_allclose(limit.lo, [0.0, 0.85])
        np.testing.assert_allclose(limit.hi, [0.15, 1.0])

    def test_center_always_inside(self):
        rng = make_rng(0)
        for _ in range(50):
            x0 = rng.uniform(0, 1, 8)
            limit = BoxLimit.from_center(x0, 0.07)
            assert limit.contains(x0)

    def test_rejects_out_of_range_center(self):
        with pytest.raises(ValueError):
            BoxLimit.from_center([1.5, 0.5], 0.1)

    def test_rejects_nonpositive_eps(self):
        with pytest.raises(ValueError):
            BoxLimit.from_center([0.5], 0.0)

    def test_rejects_inverted_bounds(self):
        with pytest.raises(ValueError):
            BoxLimit(np.array([0.6]), np.array([0.4]))

    def test_violation_zero_inside_positive_outside(self):
        limit = BoxLimit.from_center([0.5, 0.5], 0.1)
        assert limit.violation([0.55, 0.45]) == 0.0
        assert limit.violation([0.75, 0.5]) == pytest.approx(0.15)


class TestProject:
    def test_clamps_at_epsilon_ball(self):
        limit = BoxLimit.from_center([0.5, 0.5], 0.1)
        np.testing.assert_allclose(project([0.65, 0.50], limit), [0.60, 0.50])

    def test_identity_on_feasible_points(self):
        limit = BoxLimit.from_center([0.5, 0.5], 0.1)
        x = np.array([0.55, 0.47])
        np.testing.assert_array_equal(project(x, limit), x)

    def test_unit_box_binds_before_ball(self):
        limit = BoxLimit.from_center([0.05, 0.95], 0.1)
        np.testing.assert_allclose(project([-0.2, 1.3], limit), [0.0, 1.0])

    def test_idempotent(self):
        rng = make_rng(3)
        limit = BoxLimit.from_center(rng.uniform(0, 1, 16), 0.1)
        x = rng.standard_normal(16)
        once = project(x, limit)
        np.testing.assert_array_equal(project(once, limit), once)

    def test_rejects_non_finite(self):
        limit = BoxLimit.from_center([0.5], 0.1)
        with pytest.raises(ValueError, match="non-finite"):
            project([np.nan], limit)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2 ** 32 - 1))
    def test_contraction_onto_box(self, seed):
        # per-coordinate clamping never moves a point farther from any
        # feasible point
        rng = make_rng(seed)
        limit = BoxLimit.from_center(rng.uniform(0, 1, 6), 0.2)
        x = rng.standard_normal(6) * 2
        y = project(rng.standard_normal(6), limit)  # arbitrary feasible point
        assert (np.linalg.norm(project(x, limit) - y)
                <= np.linalg.norm(x - y) + 1e-12)


class TestLimitRanges:
    def test_centered_iterate(self):
        limit = BoxLimit.from_center([0.5, 0.5], 0.1)
        op, om = limit_ranges([0.5, 0.5], limit)
        np.testing.assert_allclose(op, [0.1, 0.1])
        np.testing.assert_allclose(om, [0.1, 0.1])

    def test_boundary_coordinate_has_zero_room(self):
        limit = BoxLimit.from_center([0.5], 0.1)
        op, _ = limit_ranges([0.6], limit)
        assert op[0] == 0.0

    def test_asymmetric_arithmetic(self):
        limit = BoxLimit.from_center([0.02], 0.1)
        op, om = limit_ranges([0.05], limit)
        assert op[0] == pytest.approx(0.07)
        assert om[0] == pytest.approx(0.05)

    def test_escaped_iterate_rejected(self):
        limit = BoxLimit.from_center([0.5], 0.1)
        with pytest.raises(ValueError, match="escaped"):
            limit_ranges([0.75], limit)

    def test_ranges_sum_to_box_width(self):
        rng = make_rng(9)
        x0 = rng.uniform(0, 1, 24)
        limit = BoxLimit.from_center(x0, 0.1)
        x = project(x0 + rng.uniform(-0.2, 0.2, 24), limit)
        op, om = limit_ranges(x, limit)
        np.testing.assert_allclose(op + om, limit.hi - limit.lo)


class TestScaleVector:
    def test_symmetric_case_both_modes(self):
        op = np.full(4, 0.1)
        om = np.full(4, 0.1)
        np.testing.assert_allclose(scale_vector(op, om, "min"), 0.1)
        np.testing.assert_allclose(scale_vector(op, om, "mean"), 0.1)

    def test_boundary_coordinate(self):
        b_min = scale_vector([0.0], [0.2], "min")
        b_mean = scale_vector([0.0], [0.2], "mean")
        assert b_min[0] == 0.0
        assert b_mean[0] == pytest.approx(0.1)

    def test_interior_iterate_gives_epsilon(self):
        x0 = np.full(8, 0.5)
        limit = BoxLimit.from_center(x0, 0.1)
        op, om = limit_ranges(x0, limit)
        np.testing.assert_allclose(scale_vector(op, om, "min"), 0.1)

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            scale_vector([0.1], [0.1], "max")

    def test_negative_ranges_rejected(self):
        with pytest.raises(ValueError):
            scale_vector([-0.1], [0.1], "min")


class TestSampleUnitSphere:
    def test_dim_one_gives_signs(self):
        samples = sample_unit_sphere(1, 200, make_rng(0))
        assert set(np.unique(samples)) <= {-1.0, 1.0}

    def test_unit_norms(self):
        samples = sample_unit_sphere(32, 500, make_rng(1))
        np.testing.assert_allclose(np.linalg.norm(samples, axis=1), 1.0,
                                   atol=1e-12)

    def test_coordinate_means_vanish(self):
        # Monte Carlo symmetry: per-coordinate mean within 4 standard errors
        n = 100_000
        samples = sample_unit_sphere(8, n, make_rng(2))
        se = samples.std(axis=0, ddof=1) / np.sqrt(n)
        assert np.all(np.abs(samples.mean(axis=0)) < 4 * se)

    def test_seed_determinism(self):
        a = sample_unit_sphere(16, 32, make_rng(7))
        b = sample_unit_sphere(16, 32, make_rng(7))
        np.testing.assert_array_equal(a, b)

    def test_invalid_counts(self):
        with pytest.raises(ValueError):
            sample_unit_sphere(0, 1, make_rng(0))


class TestSampleHyperellipsoid:
    def test_unit_scales_match_sphere(self):
        b = np.ones(12)
        xi = sample_hyperellipsoid(b, 20, make_rng(5))
        u = sample_unit_sphere(12, 20, make_rng(5))
        np.testing.assert_array_equal(xi, u)

    def test_frozen_axis_stays_zero(self):
        b = np.array([0.1, 0.0, 0.2])
        xi = sample_hyperellipsoid(b, 100, make_rng(6))
        assert np.all(xi[:, 1] == 0.0)

    def test_on_ellipsoid_surface(self):
        b = np.array([0.1, 0.0, 0.2, 0.05])
        xi = sample_hyperellipsoid(b, 100, make_rng(6))
        free = b > 0
        r = np.sum(xi[:, free] ** 2 / b[free] ** 2, axis=1)
        np.testing.assert_allclose(r, 1.0, atol=1e-12)

    def test_coordinate_means_vanish(self):
        n = 100_000
        b = np.array([0.3, 0.05, 0.1, 0.2])
        xi = sample_hyperellipsoid(b, n, make_rng(8))
        se = xi.std(axis=0, ddof=1) / np.sqrt(n)
        assert np.all(np.abs(xi.mean(axis=0)) < 4 * se)

    def test_fully_frozen_raises(self):
        with pytest.raises(FrozenIterateError):
            sample_hyperellipsoid(np.zeros(4), 1, make_rng(0))

    def test_scaled_samples_stay_feasible(self):
        # with min-mode scales, x + delta*xi stays inside for any delta <= 1
        rng = make_rng(10)
        x0 = rng.uniform(0, 1, 16)
        limit = BoxLimit.from_center(x0, 0.1)
        x = project(x0 + rng.uniform(-0.15, 0.15, 16), limit)
        op, om = limit_ranges(x, limit)
        b = scale_vector(op, om, "min")
        for xi in sample_hyperellipsoid(b, 50, rng):
            assert limit.violation(x + xi) <= 1e-12
            assert limit.violation(x - xi) <= 1e-12
            assert limit.violation(x + 0.3 * xi) <= 1e-12


class TestClipOffset:
    def test_clips_into_asymmetric_ranges(self):
        d = np.array([0.5, -0.5, 0.02])
        out = clip_offset(d, np.array([0.1, 0.1, 0.1]), np.array([0.2, 0.2, 0.2]))
        np.testing.assert_allclose(out, [0.2, -0.1, 0.02])
