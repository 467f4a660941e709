"""Exact rational scalars and small vector helpers.

Scalars are ``fractions.Fraction`` throughout the exact modules; vectors are
plain tuples of Fractions.  The "p/q" string form used in serialized
documents round-trips bit-exactly.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

Rat = Fraction
RatVec = tuple[Fraction, ...]


def rat(value) -> Fraction:
    """Coerce ints, "p/q" strings, and Fractions to a Fraction.

    Floats are rejected: exact inputs must be stated exactly.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational scalar")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def rat_str(q: Fraction) -> str:
    """Canonical "p/q" form (plain integer when the denominator is 1)."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def vec(values: Iterable) -> RatVec:
    return tuple(rat(v) for v in values)


def vec_str(v: Sequence[Fraction]) -> list[str]:
    return [rat_str(c) for c in v]


def add(u: RatVec, v: RatVec) -> RatVec:
    return tuple(a + b for a, b in zip(u, v, strict=True))


def sub(u: RatVec, v: RatVec) -> RatVec:
    return tuple(a - b for a, b in zip(u, v, strict=True))


def smul(s: Fraction, v: RatVec) -> RatVec:
    return tuple(s * a for a in v)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    acc = Fraction(0)
    for a, b in zip(u, v, strict=True):
        acc += a * b
    return acc


def neg(v: RatVec) -> RatVec:
    return tuple(-a for a in v)


def is_zero(v: Sequence[Fraction]) -> bool:
    return all(a == 0 for a in v)


def canonical_sign(v: RatVec) -> RatVec:
    """One representative per {v, -v} pair: first nonzero coordinate > 0."""
    for a in v:
        if a > 0:
            return v
        if a < 0:
            return neg(v)
    return v


def head_part(v: RatVec, k: int) -> RatVec:
    """Zero out coordinates past index k (the first k coordinates survive)."""
    return tuple(a if i < k else Fraction(0) for i, a in enumerate(v))


def tail_part(v: RatVec, k: int) -> RatVec:
    """Zero out the first k coordinates."""
    return tuple(Fraction(0) if i < k else a for i, a in enumerate(v))


def int_form(v: Sequence[Fraction]) -> tuple[tuple[int, ...], int]:
    """Clear denominators: returns (z, q) with v = z / q and q > 0.

    Keeps exact comparisons in plain integer arithmetic, which is
    considerably faster than Fraction arithmetic in hot loops.
    """
    q = 1
    for a in v:
        q = q * a.denominator // math.gcd(q, a.denominator)
    return tuple(int(a.numerator * (q // a.denominator)) for a in v), q


def from_int_form(z: Sequence[int], q: int) -> RatVec:
    return tuple(Fraction(n, q) for n in z)


def sqrt_floor(r: Fraction, max_den: int = 10**6) -> Fraction:
    """A rational q with q**2 <= r, within 1/max_den of the true root."""
    if r < 0:
        raise ValueError("negative radicand")
    t = math.isqrt(r.numerator * max_den * max_den // r.denominator)
    return Fraction(t, max_den)


def rationalize(x: float, max_den: int = 10**6) -> Fraction:
    """Nearest bounded-denominator rational to a float sample point."""
    return Fraction(x).limit_denominator(max_den)


class IntRows:
    """H-rep rows in cleared-denominator form for fast exact gauges.

    Row j stores integers (g_j, d_j) representing the functional g_j / d_j,
    i.e. the constraint pair ``|<g_j, x>| <= d_j`` after scaling.
    """

    __slots__ = ("rows", "dens")

    def __init__(self, functionals: Sequence[RatVec]):
        rows = []
        dens = []
        for f in functionals:
            z, q = int_form(f)
            rows.append(z)
            dens.append(q)
        self.rows = rows
        self.dens = dens

    def gauge(self, z: Sequence[int], q: int) -> Fraction:
        """max_j |<g_j, z>| / (d_j * q) for the point z / q."""
        best_n = 0
        best_d = 1
        for g, d in zip(self.rows, self.dens):
            n = 0
            for gi, zi in zip(g, z):
                n += gi * zi
            if n < 0:
                n = -n
            # compare n/d vs best_n/best_d
            if n * best_d > best_n * d:
                best_n, best_d = n, d
        return Fraction(best_n, best_d * q)

    def feasible(self, z: Sequence[int], q: int) -> bool:
        """Whether z / q satisfies every |<g_j, x>| <= 1."""
        for g, d in zip(self.rows, self.dens):
            n = 0
            for gi, zi in zip(g, z):
                n += gi * zi
            if n < 0:
                n = -n
            if n > d * q:
                return False
        return True
