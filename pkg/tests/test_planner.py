"""Parameter planning: inflations, margins, and exact product targets."""

from fractions import Fraction

import pytest

from renorm.errors import InvariantError, ParameterError
from renorm.planner import (
    ParameterPlan,
    coupling_ratio,
    plan_inflations,
    plan_ramp_margins,
    shrink_ratio,
    tail_product,
    verify_margins,
    verify_products,
)

F = Fraction


class TestInflations:
    def test_targets_met_exactly(self):
        eps = [F(1, 10) / 2**n for n in range(5)]
        plan = plan_inflations(eps)
        for N in range(5):
            assert plan.tail_product(N) < 1 + eps[N]

    def test_products_nonincreasing(self):
        plan = plan_inflations([F(1, 10) / 2**n for n in range(5)])
        prods = [plan.tail_product(N) for N in range(5)]
        assert all(a >= b for a, b in zip(prods, prods[1:]))

    def test_constant_targets_rejected(self):
        with pytest.raises(ParameterError):
            plan_inflations([F(1, 4)] * 4)

    def test_nonmonotone_rejected(self):
        with pytest.raises(ParameterError):
            plan_inflations([F(1, 8), F(1, 4)])

    def test_positive_inflations(self):
        plan = plan_inflations([F(1, 2), F(1, 4), F(1, 8)])
        assert all(l > 0 for l in plan.lam)

    def test_doc_roundtrip(self):
        plan = plan_inflations([F(1, 2), F(1, 4), F(1, 8)])
        again = ParameterPlan.from_doc(plan.to_doc())
        assert again.lam == plan.lam and again.eps == plan.eps


class TestTailProduct:
    def test_no_inflation(self):
        assert tail_product([], 0) == 1

    def test_single(self):
        assert tail_product([F(1)], 0) == 2
        assert tail_product([F(1)], 1) == 1

    def test_geometric(self):
        lam = [F(1, 2**i) for i in range(1, 11)]
        p = tail_product(lam, 0)
        expected = F(1)
        for l in lam:
            expected *= 1 + l
        assert p == expected
        assert abs(float(p) - 2.3819041934248877) < 1e-12


class TestRampMargins:
    def test_fixture_bound(self):
        # unit inflation at gamma = 2/3 leaves margin slack 1/21
        lam, gamma = F(1), F(2, 3)
        r = coupling_ratio(lam, gamma)
        assert r == F(10, 11)
        assert (1 - r) / (1 + r) == F(1, 21)

    def test_margins_decreasing_and_coupled(self, cube3_pipeline):
        plan = cube3_pipeline.plan
        gammas = cube3_pipeline.tower.gammas
        d = plan.delta
        assert all(x > 0 for x in d)
        assert all(a >= b for a, b in zip(d, d[1:]))
        verify_margins(plan, gammas)

    def test_shrink_variant_dominates(self, cube3_pipeline):
        # the head-step ratio always exceeds the coupling ratio, and the
        # halved margins still satisfy the stronger inequality
        plan = cube3_pipeline.plan
        tower = cube3_pipeline.tower
        for n in range(tower.depth):
            lam, gamma = tower.lam(n + 1), tower.gamma(n + 1)
            assert shrink_ratio(lam, gamma) >= coupling_ratio(lam, gamma)
            assert (1 + plan.delta[n]) * shrink_ratio(lam, gamma) \
                <= 1 - plan.delta[n]

    def test_headroom_constraint(self, cube3_pipeline):
        plan = cube3_pipeline.plan
        for N in range(len(plan.delta)):
            lhs = (1 + plan.delta[N]) * plan.tail_product(N)
            assert lhs <= (1 - plan.delta[N]) * (1 + plan.eps[N])

    def test_bad_gamma_rejected(self):
        plan = plan_inflations([F(1, 2), F(1, 4), F(1, 8)])
        with pytest.raises(InvariantError):
            plan_ramp_margins(plan, [F(1), F(1)])


class TestVerifiers:
    def test_product_verifier_catches_misses(self):
        bad = ParameterPlan(eps=(F(1, 100), F(1, 200)), lam=(F(1),))
        with pytest.raises(InvariantError):
            verify_products(bad)

    def test_margin_verifier_catches_zero(self):
        plan = plan_inflations([F(1, 2), F(1, 4), F(1, 8)])
        broken = ParameterPlan(eps=plan.eps, lam=plan.lam,
                               delta=(F(1, 2), F(1, 4), F(1, 8)))
        with pytest.raises(InvariantError):
            verify_margins(broken, [F(2, 3), F(2, 3)])
