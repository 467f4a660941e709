"""Smoothing and gluing: ramps, power-smoothed norms, and the final norm.

Each rescaled level norm is replaced by an even-power sum of its facet
functionals, which squeezes between the norm and (1 + delta) times it.
A convex ramp per level switches the norm on near value one; the final
norm is the Minkowski functional of the sublevel set of the summed ramps,
evaluated through its defining implicit equation, with the gradient from
the same equation.

Everything here runs in binary64; the exact rational parameters are kept
alongside for certificates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DomainError, InvariantError, ParameterError
from .norms import PolytopeNorm, tail_projection_constant
from .planner import ParameterPlan, shrink_ratio, verify_margins
from .rationals import RatVec
from .tower import RenormTower, uniform_tail_threshold


# ---------------------------------------------------------------------------
# ramps


class ConvexRamp:
    """C^3 convex ramp: zero up to 1 - delta, value one at one, affine tail.

    Built as the second antiderivative of the polynomial bump
    u^2 (1 - u)^2 supported on [1 - delta, 1 - delta/2], normalized so the
    value at one is exactly one.  The curvature is nonnegative everywhere
    and the derivative is strictly positive past 1 - delta.
    """

    def __init__(self, delta: Fraction):
        delta = Fraction(delta)
        if not 0 < delta < 1:
            raise ParameterError("ramp width must lie in (0, 1)")
        self.delta = delta
        self.a = float(1 - delta)
        self.L = float(delta) / 2.0
        self.slope = 4.0 / (3.0 * float(delta))
        self.knee = float(1 - delta / 2)

    def value(self, t: float) -> float:
        if t <= self.a:
            return 0.0
        if t >= self.knee:
            return (t - self.a - self.L / 2.0) * self.slope
        s = (t - self.a) / self.L
        return s**4 * (5.0 / 3.0 - 2.0 * s + (2.0 / 3.0) * s * s)

    def deriv(self, t: float) -> float:
        if t <= self.a:
            return 0.0
        if t >= self.knee:
            return self.slope
        s = (t - self.a) / self.L
        return (2.0 / (3.0 * self.L)) * s**3 * (10.0 - 15.0 * s + 6.0 * s * s)

    def second(self, t: float) -> float:
        if t <= self.a or t >= self.knee:
            return 0.0
        s = (t - self.a) / self.L
        return (20.0 / self.L**2) * (s * (1.0 - s)) ** 2

    def exact_value(self, t: Fraction) -> Fraction:
        """Rational evaluation; the ramp's coefficients are rational."""
        t = Fraction(t)
        d = self.delta
        a = 1 - d
        if t <= a:
            return Fraction(0)
        if t >= 1 - d / 2:
            return (t - a - d / 4) * Fraction(4, 3) / d
        s = (t - a) / (d / 2)
        return s**4 * (Fraction(5, 3) - 2 * s + Fraction(2, 3) * s * s)


class HingeRamp:
    """Piecewise-linear ramp: (t - (1 - delta))+ / delta.

    Same support, normalization, and convexity as the smooth ramp; used on
    the all-polyhedral path.
    """

    def __init__(self, delta: Fraction):
        delta = Fraction(delta)
        if not 0 < delta < 1:
            raise ParameterError("ramp width must lie in (0, 1)")
        self.delta = delta
        self.a = float(1 - delta)
        self.slope = 1.0 / float(delta)

    def value(self, t: float) -> float:
        return max(0.0, (t - self.a) * self.slope)

    def deriv(self, t: float) -> float:
        return self.slope if t > self.a else 0.0

    def exact_value(self, t: Fraction) -> Fraction:
        t = Fraction(t)
        excess = t - (1 - self.delta)
        if excess <= 0:
            return Fraction(0)
        return excess / self.delta


def make_ramp(delta: Fraction, piecewise_linear: bool = False):
    return HingeRamp(delta) if piecewise_linear else ConvexRamp(delta)


# ---------------------------------------------------------------------------
# power smoothing


def choose_power(n_pairs: int, delta: Fraction) -> int:
    """Smallest even p with n_pairs^(1/p) <= 1 + delta.

    Verified in exact integer arithmetic when the numbers stay small;
    otherwise by float logs with a one-sided safety margin (which can only
    round the exponent up, never below the valid range).
    """
    if n_pairs < 1:
        raise ParameterError("need at least one functional pair")
    if n_pairs == 1:
        return 2
    delta = Fraction(delta)
    if delta <= 0:
        raise ParameterError("smoothing margin must be positive")
    target = math.log(n_pairs)
    step = math.log1p(float(delta))
    p = max(2, 2 * math.ceil(target / step / 2))
    A, B = delta.numerator, delta.denominator
    if p * (A + B).bit_length() <= 2_000_000:
        def ok(q: int) -> bool:
            return (B + A) ** q >= n_pairs * B**q
        while not ok(p):
            p += 2
        while p > 2 and ok(p - 2):
            p -= 2
    else:
        while p * step < target * (1 + 1e-9):
            p += 2
    return p


class PowerSmoothedNorm:
    """(sum_j <a_j, x>^p)^(1/p) over the facet pairs of a polyhedral norm.

    With p even and chosen by :func:`choose_power`, the value is squeezed
    between the polyhedral norm and (1 + delta) times it.
    """

    def __init__(self, rows: np.ndarray, delta: Fraction):
        if rows.ndim != 2 or rows.shape[0] < 1:
            raise ParameterError("need a J x M functional matrix")
        self.rows = rows
        self.delta = Fraction(delta)
        self.p = choose_power(rows.shape[0], self.delta)

    def value(self, x: np.ndarray) -> float:
        v = self.rows @ x
        m = float(np.max(np.abs(v)))
        if m == 0.0:
            return 0.0
        t = v / m
        return m * float(np.sum(t**self.p)) ** (1.0 / self.p)

    def value_and_grad(self, x: np.ndarray) -> tuple[float, np.ndarray]:
        v = self.rows @ x
        m = float(np.max(np.abs(v)))
        if m == 0.0:
            return 0.0, np.zeros_like(x)
        t = v / m
        tp = t**self.p
        s = float(np.sum(tp))
        value = m * s ** (1.0 / self.p)
        grad = s ** (1.0 / self.p - 1.0) * (t ** (self.p - 1) @ self.rows)
        return value, grad

    def grad(self, x: np.ndarray) -> np.ndarray:
        return self.value_and_grad(x)[1]


# ---------------------------------------------------------------------------
# the glued family


@dataclass
class GlueLevel:
    index: int
    scale: Fraction
    rows_exact: tuple[RatVec, ...]
    rows: np.ndarray
    delta: Fraction
    ramp: ConvexRamp
    smoothed: PowerSmoothedNorm


@dataclass
class GaugeDiagnostics:
    bracket: tuple[float, float]
    bisect_iterations: int
    newton_iterations: int
    residual: float
    error_estimate: float = 0.0   # |residual / derivative| relative to root


@dataclass
class ActiveSetInfo:
    """Certificate data for the locally finite sum around a point."""

    cutoff: int                  # levels past cutoff + 2 vanish nearby
    levels: tuple[int, ...]      # indices that may contribute
    radius: float                # Euclidean radius of the certified ball
    eps: Fraction                # relative size of the certified region


class GlueFamily:
    """Per-level smoothed norms and ramps plus the glued final norm."""

    def __init__(self, tower: RenormTower, plan: ParameterPlan):
        if tower.scaled_norms is None:
            raise ParameterError("tower must be rescaled first")
        if plan.delta is None:
            raise ParameterError("plan must carry ramp margins")
        if len(plan.delta) < tower.depth + 1:
            raise ParameterError("need a margin per stored level")
        verify_margins(plan, tower.gammas)
        self.tower = tower
        self.plan = plan
        self.levels: list[GlueLevel] = []
        for n in range(tower.depth + 1):
            norm = tower.scaled_norm(n)
            rows_exact = norm.functionals()
            rows = norm.float_rows()
            delta = plan.delta[n]
            self.levels.append(GlueLevel(
                index=n, scale=tower.scales[n], rows_exact=rows_exact,
                rows=rows, delta=delta, ramp=ConvexRamp(delta),
                smoothed=PowerSmoothedNorm(rows, delta)))
        self.dim = tower.dim
        self.tail_cutoff = uniform_tail_threshold(tower)
        self.tail_const = tail_projection_constant(tower.norms[0])
        d0 = float(plan.delta[0])
        self.bracket_factor = (1.0 + d0) / (1.0 - d0)
        self._norm0_rows = tower.norms[0].float_rows()

    # -- level evaluations ----------------------------------------------------

    def level_gauge(self, n: int, x: np.ndarray) -> float:
        """Rescaled polyhedral norm of level n (float path)."""
        return float(np.max(np.abs(self.levels[n].rows @ x)))

    def level_smooth(self, n: int, x: np.ndarray) -> float:
        return self.levels[n].smoothed.value(x)

    def envelope(self, x: np.ndarray) -> float:
        """Largest rescaled level norm; the finite sup of the family."""
        return max(self.level_gauge(n, x) for n in range(len(self.levels)))

    def original_norm(self, x: np.ndarray) -> float:
        return float(np.max(np.abs(self._norm0_rows @ x)))

    def glue_sum(self, x: np.ndarray) -> tuple[float, list[int]]:
        """Sum of ramped smoothed norms and the contributing levels."""
        total = 0.0
        active = []
        for lvl in self.levels:
            v = lvl.ramp.value(lvl.smoothed.value(x))
            if v > 0.0:
                active.append(lvl.index)
            total += v
        return total, active

    # -- the final norm --------------------------------------------------------

    def _smooth_values(self, x: np.ndarray) -> np.ndarray:
        return np.array([lvl.smoothed.value(x) for lvl in self.levels])

    def final_gauge(self, x, tol: float = 1e-12, max_iter: int = 200
                    ) -> tuple[float, GaugeDiagnostics]:
        """The unique rho with the glued sum equal to one at x / rho.

        Bisection on the certified bracket down to 1e-10 relative, then
        safeguarded Newton with the implicit-equation derivative.  x = 0
        returns 0 by convention.
        """
        x = np.asarray(x, dtype=float)
        if not np.any(x):
            return 0.0, GaugeDiagnostics((0.0, 0.0), 0, 0, 0.0)
        env = self.envelope(x)
        if env <= 0.0:
            raise InvariantError("envelope vanished on a nonzero vector")
        svals = self._smooth_values(x)
        ramps = [lvl.ramp for lvl in self.levels]

        def value(rho: float) -> float:
            return sum(r.value(s / rho) for r, s in zip(ramps, svals))

        def dvalue(rho: float) -> float:
            return -sum(r.deriv(s / rho) * s for r, s in zip(ramps, svals)
                        ) / (rho * rho)

        lo = env
        hi = env * self.bracket_factor
        f_lo = value(lo)
        f_hi = value(hi)
        if f_lo < 1.0 - 1e-9:
            raise InvariantError("bracket lower end misses the level set")
        if f_hi >= 1.0:
            raise InvariantError("bracket upper end misses the level set")
        bracket = (lo, hi)

        bis = 0
        while hi - lo > 1e-10 * hi and bis < max_iter:
            mid = 0.5 * (lo + hi)
            if value(mid) >= 1.0:
                lo = mid
            else:
                hi = mid
            bis += 1

        rho = 0.5 * (lo + hi)
        newt = 0
        f = value(rho) - 1.0
        d = dvalue(rho)
        while newt < max_iter - bis:
            if d == 0.0:
                raise InvariantError("implicit derivative vanished at root")
            if abs(f) <= tol * abs(d) * rho:
                break
            if f >= 0.0:
                lo = max(lo, rho)
            else:
                hi = min(hi, rho)
            new = rho - f / d
            if not lo <= new <= hi:
                new = 0.5 * (lo + hi)
            rho = new
            newt += 1
            f = value(rho) - 1.0
            d = dvalue(rho)
        est = abs(f / d) / rho if d != 0.0 else math.inf
        return rho, GaugeDiagnostics(bracket, bis, newt, f, est)

    def final_gauge_value(self, x) -> float:
        return self.final_gauge(x)[0]

    def final_gradient(self, x) -> np.ndarray:
        """Gradient of the final norm via the implicit equation.

        grad rho = rho * grad(sum)(x / rho) / <grad(sum)(x / rho), x>; the
        denominator is the (sign-flipped, rho-scaled) implicit derivative
        and cannot vanish at the root.
        """
        x = np.asarray(x, dtype=float)
        if not np.any(x):
            raise DomainError("gradient undefined at the origin")
        rho, _ = self.final_gauge(x)
        num = np.zeros_like(x)
        denom = 0.0
        for lvl in self.levels:
            s, g = lvl.smoothed.value_and_grad(x)
            w = lvl.ramp.deriv(s / rho)
            if w != 0.0:
                num += w * g
                denom += w * s
        if denom == 0.0:
            raise InvariantError("implicit derivative vanished at root")
        return rho * num / denom

    # -- localization -----------------------------------------------------------

    def active_set(self, x) -> ActiveSetInfo:
        """Levels that can contribute near x, with a certified radius.

        Requires the glued sum at x below two.  The cutoff index comes from
        the tail-threshold scan; the vanishing of every level past
        cutoff + 2 on the returned ball is certified by exact rational
        product inequalities.
        """
        x = np.asarray(x, dtype=float)
        if not np.any(x):
            return ActiveSetInfo(0, (), math.inf, Fraction(0))
        total, _ = self.glue_sum(x)
        if total >= 2.0:
            raise DomainError("localization needs glued sum below two")
        depth = self.tower.depth
        nx = self.original_norm(x)
        c = float(self.tail_cutoff)
        n0 = 1
        for n in range(1, depth + 1):
            t = x.copy()
            t[:n] = 0.0
            if self.original_norm(t) > 0.5 * c * nx:
                n0 = n + 1

        d_n0 = self.plan.delta[min(n0, depth)]
        eps = min(self.tail_cutoff / (2 * (self.tail_const
                                           + self.tail_cutoff)),
                  d_n0 / (1 - d_n0)) / 2

        # exact certificate: every level past n0 + 2 stays strictly below
        # its ramp threshold on the certified neighborhood
        if (1 + eps) * (1 - d_n0) > 1:
            raise InvariantError("localization margin inconsistent")
        prod = Fraction(1)
        for n in range(n0 + 1, depth + 1):
            prod *= shrink_ratio(self.tower.lam(n), self.tower.gamma(n))
            if n >= n0 + 2:
                d_n = self.plan.delta[n]
                lhs = (1 + d_n) * prod * (1 + eps) * (1 + d_n0)
                if not lhs <= 1 - d_n:
                    raise InvariantError(
                        f"vanishing certificate fails at level {n}")

        cutoff = n0
        top = min(n0 + 2, depth)
        # Euclidean radius fitting inside both defining conditions
        row_l2_0 = float(np.max(np.linalg.norm(self._norm0_rows, axis=1)))
        lvl = self.levels[min(n0, depth)]
        row_l2_n = float(np.max(np.linalg.norm(lvl.rows, axis=1)))
        vn = self.level_gauge(min(n0, depth), x)
        radius = 0.5 * float(eps) * min(nx / row_l2_0,
                                        vn / row_l2_n if vn > 0 else math.inf)
        return ActiveSetInfo(cutoff=cutoff, levels=tuple(range(top + 1)),
                             radius=radius, eps=eps)

    def restricted_gauge(self, x, levels: Sequence[int]) -> float:
        """Final gauge using only the given levels; for locality checks."""
        x = np.asarray(x, dtype=float)
        keep = set(levels)
        svals = [(lvl.ramp, lvl.smoothed.value(x))
                 for lvl in self.levels if lvl.index in keep]
        env = max(self.level_gauge(n, x) for n in keep)
        lo, hi = env, env * self.bracket_factor

        def value(rho):
            return sum(r.value(s / rho) for r, s in svals)

        if value(lo) < 1.0 - 1e-9:
            raise InvariantError("restricted bracket misses the level set")
        for _ in range(60):
            if value(hi) < 1.0:
                break
            hi *= 2.0
        for _ in range(100):
            mid = 0.5 * (lo + hi)
            if value(mid) >= 1.0:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    def lfc_witness(self, x) -> tuple[tuple[RatVec, ...], float, tuple[int, ...]]:
        """Functionals the final norm factors through near x, plus radius.

        The norm on the returned ball is a function of the returned
        functionals only (union over the possibly-active levels).
        """
        x = np.asarray(x, dtype=float)
        if not np.any(x):
            raise DomainError("witness undefined at the origin")
        rho, _ = self.final_gauge(x)
        xhat = x / rho
        info = self.active_set(xhat)
        funcs: list[RatVec] = []
        for n in info.levels:
            funcs.extend(self.levels[n].rows_exact)
        return tuple(funcs), info.radius * rho, info.levels
