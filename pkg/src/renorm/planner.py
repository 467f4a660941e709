"""Parameter planning: inflations and ramp margins from a target sequence.

Given decreasing targets eps_N, the planner picks per-level inflations so
that every tail product of (1 + lam_i) stays strictly below 1 + eps_N, and
then (after the tower is built, because the coupling needs the per-level
gamma constants) picks ramp margins delta_n satisfying the coupling
inequality and the distortion headroom.  All invariants are re-verified in
exact arithmetic on the finished plan.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InvariantError, ParameterError
from .rationals import rat, rat_str, sqrt_floor


@dataclass
class ParameterPlan:
    """Inflations, ramp margins, and certified tail products."""

    eps: tuple[Fraction, ...]
    lam: tuple[Fraction, ...]            # lam[i-1] is the level-i inflation
    delta: tuple[Fraction, ...] | None = None
    scheme: str = "sqrt-split"

    @property
    def depth(self) -> int:
        return len(self.lam)

    def lam_of(self, i: int) -> Fraction:
        if i < 1:
            raise ParameterError("levels are 1-based")
        return self.lam[i - 1] if i <= len(self.lam) else Fraction(0)

    def tail_product(self, N: int) -> Fraction:
        return tail_product(self.lam, N)

    def to_doc(self) -> dict:
        doc = {
            "scheme": self.scheme,
            "eps": [rat_str(e) for e in self.eps],
            "lam": [rat_str(l) for l in self.lam],
            "tail_products": [rat_str(self.tail_product(N))
                              for N in range(len(self.eps))],
        }
        if self.delta is not None:
            doc["delta"] = [rat_str(d) for d in self.delta]
        return doc

    @classmethod
    def from_doc(cls, doc: dict) -> "ParameterPlan":
        plan = cls(
            eps=tuple(rat(e) for e in doc["eps"]),
            lam=tuple(rat(l) for l in doc["lam"]),
            delta=tuple(rat(d) for d in doc["delta"]) if "delta" in doc
            else None,
            scheme=doc.get("scheme", "sqrt-split"),
        )
        verify_products(plan)
        return plan


def tail_product(lam: Sequence[Fraction], N: int) -> Fraction:
    """prod_{i > N} (1 + lam_i); exact for finitely supported inflations."""
    p = Fraction(1)
    for i in range(N + 1, len(lam) + 1):
        p *= 1 + lam[i - 1]
    return p


def plan_inflations(eps: Sequence, max_den: int = 1000) -> ParameterPlan:
    """Positive inflations with every tail product below its target.

    Uses the square-root split: 1 + lam_i is a bounded-denominator rational
    just under sqrt((1 + eps_{i-1}) / (1 + eps_i)), so the product from
    N + 1 to the end telescopes below sqrt((1 + eps_N) / (1 + eps_last)),
    leaving strict headroom under 1 + eps_N.  One valid choice among many;
    recorded in the plan for reproducibility.
    """
    eps = [rat(e) for e in eps]
    if len(eps) < 2:
        raise ParameterError("need at least two targets")
    if any(e <= 0 for e in eps):
        raise ParameterError("targets must be positive")
    if any(b > a for a, b in zip(eps, eps[1:])):
        raise ParameterError("targets must be nonincreasing")
    if eps[-1] == eps[0]:
        raise ParameterError("targets must decrease somewhere")

    lam = []
    for i in range(1, len(eps)):
        ratio = (1 + eps[i - 1]) / (1 + eps[i])
        root = sqrt_floor(ratio, max_den)
        while root * root > ratio:
            root -= Fraction(1, max_den)
        if root <= 1:
            raise ParameterError(
                "targets too flat for the denominator bound; raise max_den")
        lam.append(root - 1)
    plan = ParameterPlan(eps=tuple(eps), lam=tuple(lam))
    verify_products(plan)
    return plan


def verify_products(plan: ParameterPlan):
    """Exact re-verification of the tail-product targets."""
    last = len(plan.lam)
    for N in range(len(plan.eps)):
        p = plan.tail_product(N)
        if not p < 1 + plan.eps[N]:
            raise InvariantError(f"tail product at {N} misses its target")
    # headroom of the square-root split: squared products telescope
    for N in range(last):
        p = plan.tail_product(N)
        if p * p > (1 + plan.eps[N]) / (1 + plan.eps[last]):
            raise InvariantError("square-root headroom lost")


def coupling_ratio(lam: Fraction, gamma: Fraction) -> Fraction:
    """(1 + lam*gamma) / (1 + lam*(1+gamma)/2); < 1 whenever lam > 0."""
    return (1 + lam * gamma) / (1 + lam * (1 + gamma) / 2)


def shrink_ratio(lam: Fraction, gamma: Fraction) -> Fraction:
    """(1 + lam*(1+gamma)/2) / (1 + lam); the head-step decay factor."""
    return (1 + lam * (1 + gamma) / 2) / (1 + lam)


def plan_ramp_margins(plan: ParameterPlan, gammas: Sequence[Fraction]
                      ) -> ParameterPlan:
    """Decreasing positive margins delta_n, n = 0 .. depth.

    delta_n is half the least of: the previous margin, the slack the
    coupling inequality leaves at level n + 1, and the distortion headroom
    (1 + eps_n) / tail_product(n).  All constraints are re-verified exactly
    after selection, including the stronger head-step variant that the
    locally-finite-sum certificate relies on (covered automatically since
    every gamma is at least 1/5).
    """
    gammas = [Fraction(g) for g in gammas]
    depth = plan.depth
    if len(gammas) < depth:
        raise ParameterError("need a gamma for every built level")
    for g in gammas:
        if not 0 < g < 1:
            raise InvariantError("level constant escaped (0, 1)")

    deltas: list[Fraction] = []
    for n in range(depth + 1):
        terms = []
        if n > 0:
            terms.append(deltas[n - 1])
        if n < depth:
            r = coupling_ratio(plan.lam_of(n + 1), gammas[n])
            terms.append((1 - r) / (1 + r))
        q = (1 + plan.eps[n]) / plan.tail_product(n)
        terms.append((q - 1) / (q + 1))
        d = min(terms) / 2
        if d <= 0:
            raise InvariantError("margin selection collapsed to zero")
        deltas.append(d)

    out = ParameterPlan(eps=plan.eps, lam=plan.lam, delta=tuple(deltas),
                        scheme=plan.scheme)
    verify_margins(out, gammas)
    return out


def verify_margins(plan: ParameterPlan, gammas: Sequence[Fraction]):
    """Exact checks of every margin constraint on a finished plan."""
    if plan.delta is None:
        raise ParameterError("plan has no margins")
    d = plan.delta
    if any(b > a for a, b in zip(d, d[1:])) or any(x <= 0 for x in d):
        raise InvariantError("margins not positive decreasing")
    for n in range(plan.depth):
        lam, gamma = plan.lam_of(n + 1), Fraction(gammas[n])
        if not (1 + d[n]) * coupling_ratio(lam, gamma) <= 1 - d[n]:
            raise InvariantError(f"coupling inequality fails at level {n}")
        # stronger variant used by the finite-sum localization
        if not (1 + d[n]) * shrink_ratio(lam, gamma) <= 1 - d[n]:
            raise InvariantError(
                f"head-step coupling variant fails at level {n}")
    for N in range(min(len(d), len(plan.eps))):
        lhs = (1 + d[N]) * plan.tail_product(N)
        if not lhs <= (1 - d[N]) * (1 + plan.eps[N]):
            raise InvariantError(f"distortion headroom fails at level {N}")


def theorem_margins(plan: ParameterPlan) -> list[tuple[str, str]]:
    """Human-readable slack of each distortion target; for reports."""
    out = []
    for N in range(len(plan.eps)):
        p = plan.tail_product(N)
        slack = (1 + plan.eps[N]) - p
        out.append((f"N={N}", rat_str(slack)))
    return out
