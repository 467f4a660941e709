"""All-polyhedral gluing: hinge ramps, exact level sets, exact final body.

With the identity smoother (each level norm kept polyhedral) and hinge
ramps, the glued sublevel set is itself a polytope.  It is assembled
exactly by an outer cutting loop: start from the intersection of all level
balls, and repeatedly cut off vertices whose glued sum exceeds one using
the affine minorant active at that vertex.  Each cut is a valid inequality
for the sublevel set and removes at least one vertex, and there are only
finitely many distinct cuts, so the loop terminates with the exact body.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .body import ConvexBody, embed_tail, intersect_halfspaces, section
from .errors import DomainError, InvariantError, ParameterError
from .glue import HingeRamp
from .norms import PolytopeNorm, tail_projection_constant
from .planner import ParameterPlan, shrink_ratio, verify_margins
from .rationals import RatVec, is_zero, smul, tail_part, vec
from .tower import RenormTower, uniform_tail_threshold


@dataclass
class PolyLevel:
    index: int
    norm: PolytopeNorm
    delta: Fraction
    ramp: HingeRamp


class PolyhedralFamily:
    """Exact hinge-glued family over a rescaled tower."""

    def __init__(self, tower: RenormTower, plan: ParameterPlan,
                 n_levels: int | None = None):
        if tower.scaled_norms is None:
            raise ParameterError("tower must be rescaled first")
        if plan.delta is None:
            raise ParameterError("plan must carry ramp margins")
        top = tower.depth if n_levels is None else n_levels
        if top > tower.depth:
            raise ParameterError("more levels requested than stored")
        if top == tower.depth:
            verify_margins(plan, tower.gammas)
        self.tower = tower
        self.plan = plan
        self.levels = [
            PolyLevel(index=n, norm=tower.scaled_norm(n),
                      delta=plan.delta[n], ramp=HingeRamp(plan.delta[n]))
            for n in range(top + 1)
        ]
        self.dim = tower.dim
        self._final: ConvexBody | None = None

    # -- exact evaluation -------------------------------------------------------

    def glue_sum_exact(self, x: Sequence) -> Fraction:
        x = vec(x)
        total = Fraction(0)
        for lvl in self.levels:
            total += lvl.ramp.exact_value(lvl.norm(x))
        return total

    def active_levels(self, x: Sequence) -> list[int]:
        x = vec(x)
        out = []
        for lvl in self.levels:
            if lvl.norm(x) > 1 - lvl.delta:
                out.append(lvl.index)
        return out

    # -- the exact final body ----------------------------------------------------

    def _cut_at(self, v: RatVec) -> RatVec:
        """Affine minorant of the glued sum that is tight at v, as a row.

        The minorant sum_n (<a_n, x> - (1 - delta_n)) / delta_n over the
        levels active at v never exceeds the glued sum, so its one-sublevel
        halfspace contains the final body while excluding v.
        """
        acc = [Fraction(0)] * self.dim
        rhs = Fraction(1)
        for lvl in self.levels:
            g = lvl.norm(v)
            if g <= 1 - lvl.delta:
                continue
            best = None
            for row in lvl.norm.functionals():
                val = sum(a * b for a, b in zip(row, v))
                if val < 0:
                    val, row = -val, tuple(-c for c in row)
                if val == g:
                    best = row
                    break
            if best is None:
                raise InvariantError("no facet attains the level gauge")
            for i, c in enumerate(best):
                acc[i] += c / lvl.delta
            rhs += (1 - lvl.delta) / lvl.delta
        return tuple(c / rhs for c in acc)

    def final_polytope(self, max_rounds: int = 10000) -> ConvexBody:
        """The exact glued sublevel body; cached."""
        if self._final is not None:
            return self._final
        rows: list[RatVec] = []
        for lvl in self.levels:
            rows.extend(lvl.norm.functionals())
        body = ConvexBody(self.dim, hrep=rows, validate=False)
        body = intersect_halfspaces(body, ())  # minimize both reps
        for _ in range(max_rounds):
            cuts = []
            for v in body.vrep:
                if self.glue_sum_exact(v) > 1:
                    cuts.append(self._cut_at(v))
            if not cuts:
                break
            body = intersect_halfspaces(body, cuts)
        else:
            raise InvariantError("cutting loop failed to terminate")
        self._final = body
        return body

    def final_norm(self) -> PolytopeNorm:
        return PolytopeNorm(self.final_polytope())

    def final_gauge_exact(self, x: Sequence) -> Fraction:
        return self.final_polytope().gauge(x)

    # -- certificates --------------------------------------------------------------

    def tail_bound_certificate(self, N: int) -> Fraction:
        """Exact distortion check on every tail-section vertex.

        Every vertex of the tail section of the final body has final gauge
        one, so the distortion target reads |orig - 1| <= eps_N * orig
        there; returns the worst slack (nonnegative when all pass).
        """
        if not 0 <= N < self.dim:
            raise DomainError("tail index out of range")
        body = self.final_polytope()
        eps = self.plan.eps[N]
        orig = self.tower.norms[0]
        sec = section(body, N) if N > 0 else body
        if sec is None:
            raise DomainError("degenerate tail section")
        worst = None
        for w in sec.vrep:
            x = embed_tail(w, N, self.dim) if N > 0 else w
            if body.gauge(x) != 1:
                raise InvariantError("section vertex off the final boundary")
            g = orig(x)
            slack = eps * g - abs(g - 1)
            if slack < 0:
                raise InvariantError(
                    f"distortion target fails on a tail vertex at N={N}")
            if worst is None or slack < worst:
                worst = slack
        if worst is None:
            raise InvariantError("empty tail section")
        return worst

    def lfc_witness(self, x: Sequence
                    ) -> tuple[tuple[RatVec, ...], float, tuple[int, ...]]:
        """Functionals the final norm factors through near x; exact cutoff.

        Same localization as the smooth family, but every threshold test
        and product inequality is exact rational arithmetic.
        """
        x = vec(x)
        if is_zero(x):
            raise DomainError("witness undefined at the origin")
        rho = self.final_gauge_exact(x)
        xhat = tuple(c / rho for c in x)
        tower = self.tower
        depth = len(self.levels) - 1
        norm0 = tower.norms[0]
        c = uniform_tail_threshold(tower)
        base = c * norm0(xhat) / 2
        n0 = 1
        for n in range(1, depth + 1):
            if norm0(tail_part(xhat, n)) > base:
                n0 = n + 1
        d_n0 = self.plan.delta[min(n0, depth)]
        tail_const = tail_projection_constant(norm0)
        eps = min(c / (2 * (tail_const + c)), d_n0 / (1 - d_n0)) / 2
        prod = Fraction(1)
        for n in range(n0 + 1, depth + 1):
            prod *= shrink_ratio(tower.lam(n), tower.gamma(n))
            if n >= n0 + 2:
                d_n = self.plan.delta[n]
                if not (1 + d_n) * prod * (1 + eps) * (1 + d_n0) <= 1 - d_n:
                    raise InvariantError(
                        f"vanishing certificate fails at level {n}")
        top = min(n0 + 2, depth)
        funcs: list[RatVec] = []
        for n in range(top + 1):
            funcs.extend(self.levels[n].norm.functionals())
        rows0 = norm0.float_rows()
        row_l2 = float(np.max(np.linalg.norm(rows0, axis=1)))
        radius = 0.5 * float(eps) * float(norm0(xhat)) / row_l2 * float(rho)
        return tuple(funcs), radius, tuple(range(top + 1))

    def restricted_gauge_exact(self, x: Sequence, levels: Sequence[int]
                               ) -> Fraction:
        """Final gauge recomputed from a subset of levels; for LFC checks."""
        keep = set(levels)
        sub = PolyhedralFamily.__new__(PolyhedralFamily)
        sub.tower = self.tower
        sub.plan = self.plan
        sub.levels = [lvl for lvl in self.levels if lvl.index in keep]
        sub.dim = self.dim
        sub._final = None
        return sub.final_polytope().gauge(x)


def build_polyhedral_family(tower: RenormTower, plan: ParameterPlan,
                            n_levels: int | None = None) -> PolyhedralFamily:
    return PolyhedralFamily(tower, plan, n_levels=n_levels)
