"""Ramps, power smoothing, and the glued final norm."""

import math
from fractions import Fraction

import numpy as np
import pytest

import renorm
from renorm.errors import DomainError, ParameterError
from renorm.glue import (
    ConvexRamp,
    GlueFamily,
    HingeRamp,
    PowerSmoothedNorm,
    choose_power,
)

F = Fraction


class TestRamp:
    def test_anchor_values(self):
        ramp = ConvexRamp(F(1, 10))
        assert ramp.value(0.0) == 0.0
        assert ramp.exact_value(F(1)) == 1
        assert ramp.exact_value(F(9, 10)) == 0
        assert ramp.deriv(0.9) == 0.0

    def test_flat_then_strictly_increasing(self):
        ramp = ConvexRamp(F(1, 5))
        ts = np.linspace(0.0, 2.0, 400)
        vals = [ramp.value(t) for t in ts]
        for t, a, b in zip(ts, vals, vals[1:]):
            if t < 0.8:
                assert a == 0.0
            if t > 0.8:
                assert b > a

    def test_convexity_and_curvature(self):
        ramp = ConvexRamp(F(1, 8))
        ts = np.linspace(0.8, 1.2, 300)
        for t in ts:
            assert ramp.second(t) >= 0.0
        # affine past the knee
        for t in (0.94, 1.0, 1.1, 3.0):
            assert ramp.second(t) == 0.0

    def test_derivative_consistent(self):
        ramp = ConvexRamp(F(1, 7))
        h = 1e-7
        for t in (0.87, 0.9, 0.93, 1.0, 1.5):
            fd = (ramp.value(t + h) - ramp.value(t - h)) / (2 * h)
            assert math.isclose(fd, ramp.deriv(t), rel_tol=1e-5,
                                abs_tol=1e-6)

    def test_doubling_above_one(self):
        # convexity forces at least 2 at 1 + delta; ours reaches 7/3
        ramp = ConvexRamp(F(1, 9))
        assert ramp.exact_value(1 + F(1, 9)) >= 2

    def test_hinge_matches_contract(self):
        ramp = HingeRamp(F(1, 10))
        assert ramp.exact_value(F(9, 10)) == 0
        assert ramp.exact_value(F(1)) == 1
        assert ramp.exact_value(F(11, 10)) == 2

    def test_width_range(self):
        with pytest.raises(ParameterError):
            ConvexRamp(F(2))


class TestPowerSmoothing:
    def test_power_choice_example(self):
        # two pairs at margin 1/10 need the eighth power
        assert choose_power(2, F(1, 10)) == 8

    def test_single_pair_is_identity(self):
        rows = np.array([[2.0, 1.0]])
        sm = PowerSmoothedNorm(rows, F(1, 10))
        x = np.array([0.3, -1.2])
        assert math.isclose(sm.value(x), abs(2 * 0.3 - 1.2), rel_tol=1e-15)

    def test_axis_value(self):
        rows = np.eye(2)
        sm = PowerSmoothedNorm(rows, F(1, 10))
        assert math.isclose(sm.value(np.array([1.0, 0.0])), 1.0,
                            rel_tol=1e-14)

    def test_corner_value(self):
        rows = np.eye(2)
        sm = PowerSmoothedNorm(rows, F(1, 10))
        got = sm.value(np.array([1.0, 1.0]))
        assert math.isclose(got, 2 ** (1 / 8), rel_tol=1e-12)
        assert got <= 1.1

    def test_sandwich_on_samples(self, default_pipeline):
        family = default_pipeline.family
        rng = np.random.default_rng(3)
        for lvl in family.levels:
            for _ in range(300):
                x = rng.standard_normal(2)
                g = family.level_gauge(lvl.index, x)
                s = lvl.smoothed.value(x)
                assert g * (1 - 1e-12) <= s <= (1 + float(lvl.delta)) * g

    def test_gradient_matches_fd(self):
        rows = np.array([[1.0, 0.2], [-0.3, 1.1], [0.5, -0.9]])
        sm = PowerSmoothedNorm(rows, F(1, 20))
        rng = np.random.default_rng(4)
        h = 1e-6
        for _ in range(20):
            x = rng.standard_normal(2)
            _, g = sm.value_and_grad(x)
            fd = np.array([
                (sm.value(x + h * e) - sm.value(x - h * e)) / (2 * h)
                for e in np.eye(2)])
            assert np.linalg.norm(fd - g) <= 1e-6 * np.linalg.norm(g) + 1e-9


class TestGlueSum:
    def test_zero_at_origin(self, default_pipeline):
        val, active = default_pipeline.family.glue_sum(np.zeros(2))
        assert val == 0.0 and active == []

    def test_zero_well_inside(self, default_pipeline):
        family = default_pipeline.family
        d0 = float(family.plan.delta[0])
        x = np.array([0.4, 0.3])
        x *= (1 - d0) / (1 + d0) / family.envelope(x) * (1 - 1e-9)
        val, active = family.glue_sum(x)
        assert val == 0.0 and active == []

    def test_single_active_level_near_boundary(self, default_pipeline):
        family = default_pipeline.family
        x = np.array([1.0, 0.03])
        rho, _ = family.final_gauge(x)
        val, active = family.glue_sum(x / rho)
        assert math.isclose(val, 1.0, rel_tol=1e-9)
        assert len(active) >= 1


class TestFinalGauge:
    def test_origin_convention(self, default_pipeline):
        rho, _ = default_pipeline.family.final_gauge(np.zeros(2))
        assert rho == 0.0

    def test_homogeneity(self, default_pipeline):
        family = default_pipeline.family
        rng = np.random.default_rng(5)
        for _ in range(50):
            x = rng.standard_normal(2)
            s = abs(rng.standard_normal()) + 0.2
            a = family.final_gauge_value(s * x)
            b = s * family.final_gauge_value(x)
            assert math.isclose(a, b, rel_tol=1e-12)

    def test_bracket_and_budget(self, default_pipeline):
        family = default_pipeline.family
        rng = np.random.default_rng(6)
        for _ in range(200):
            x = rng.standard_normal(2)
            rho, diag = family.final_gauge(x)
            lo, hi = diag.bracket
            assert lo * (1 - 1e-12) <= rho <= hi * (1 + 1e-12)
            assert diag.bisect_iterations + diag.newton_iterations <= 200
            assert diag.error_estimate <= 1e-12

    def test_tail_vector_within_target(self, default_pipeline):
        family = default_pipeline.family
        plan = default_pipeline.plan
        x = np.array([0.0, 1.0])
        rho = family.final_gauge_value(x)
        base = family.original_norm(x)
        assert abs(rho - base) <= float(plan.eps[1]) * base


class TestFinalGradient:
    def test_euler_identity(self, default_pipeline):
        family = default_pipeline.family
        rng = np.random.default_rng(7)
        for _ in range(60):
            x = rng.standard_normal(2)
            g = family.final_gradient(x)
            rho = family.final_gauge_value(x)
            assert abs(float(g @ x) - rho) <= 1e-9 * rho

    def test_scale_invariance(self, default_pipeline):
        family = default_pipeline.family
        rng = np.random.default_rng(8)
        for _ in range(30):
            x = rng.standard_normal(2)
            g1 = family.final_gradient(x)
            g2 = family.final_gradient(3.7 * x)
            assert np.linalg.norm(g1 - g2) <= 1e-9 * np.linalg.norm(g1)

    def test_matches_central_differences(self, cube3_pipeline):
        family = cube3_pipeline.family
        rng = np.random.default_rng(9)
        h = 1e-5
        for _ in range(40):
            x = rng.standard_normal(3)
            g = family.final_gradient(x)
            fd = np.array([
                (family.final_gauge_value(x + h * e)
                 - family.final_gauge_value(x - h * e)) / (2 * h)
                for e in np.eye(3)])
            assert np.linalg.norm(fd - g) <= 1e-6 * np.linalg.norm(g)

    def test_origin_rejected(self, default_pipeline):
        with pytest.raises(DomainError):
            default_pipeline.family.final_gradient(np.zeros(2))


class TestActiveSet:
    def test_near_origin_empty(self, default_pipeline):
        family = default_pipeline.family
        info = family.active_set(np.array([1e-3, 1e-3]))
        val, active = family.glue_sum(np.array([1e-3, 1e-3]))
        assert val == 0.0 and active == []
        assert info.radius > 0

    def test_first_axis_cutoff(self, cube3_pipeline):
        family = cube3_pipeline.family
        x = np.zeros(3)
        x[0] = 1.0
        rho = family.final_gauge_value(x)
        info = family.active_set(x / rho)
        assert info.cutoff == 1
        assert set(info.levels) <= set(range(0, 4))

    def test_cutoff_scale_invariant(self, cube3_pipeline):
        family = cube3_pipeline.family
        x = np.array([0.9, 0.1, 0.05])
        rho = family.final_gauge_value(x)
        a = family.active_set(x / rho)
        b = family.active_set(0.5 * x / rho)
        assert a.cutoff == b.cutoff

    def test_out_of_domain(self, default_pipeline):
        family = default_pipeline.family
        with pytest.raises(DomainError):
            family.active_set(np.array([50.0, 50.0]))

    def test_restricted_matches_full_nearby(self, cube3_pipeline):
        family = cube3_pipeline.family
        x = np.array([1.0, 0.02, 0.01])
        rho = family.final_gauge_value(x)
        info = family.active_set(x / rho)
        rng = np.random.default_rng(10)
        for _ in range(10):
            y = x / rho + rng.standard_normal(3) * info.radius * 0.5
            full = family.final_gauge_value(y)
            restricted = family.restricted_gauge(y, info.levels)
            assert math.isclose(full, restricted, rel_tol=1e-9)


class TestLfcWitness:
    def test_witness_covers_active_levels(self, cube3_pipeline):
        family = cube3_pipeline.family
        x = np.array([1.0, 0.02, 0.01])
        funcs, radius, levels = family.lfc_witness(x)
        expected = sum(len(family.levels[n].rows_exact) for n in levels)
        assert len(funcs) == expected
        assert radius > 0

    def test_witness_stable_inside_radius(self, cube3_pipeline):
        family = cube3_pipeline.family
        x = np.array([1.0, 0.02, 0.01])
        funcs, radius, levels = family.lfc_witness(x)
        rng = np.random.default_rng(11)
        for _ in range(5):
            y = x + rng.standard_normal(3) * radius * 0.4
            full = family.final_gauge_value(y)
            restricted = family.restricted_gauge(y, levels)
            assert math.isclose(full, restricted, rel_tol=1e-9)

    def test_origin_rejected(self, default_pipeline):
        with pytest.raises(DomainError):
            default_pipeline.family.lfc_witness(np.zeros(2))


class TestFamilyGuards:
    def test_requires_rescaled_tower(self, square):
        tower = renorm.build_tower(square, [F(1)], n_max=1)
        plan = renorm.plan_inflations([F(1, 2), F(1, 4)])
        with pytest.raises(ParameterError):
            GlueFamily(tower, plan)
