"""Norm handles: gauge evaluation contracts over exact polytope balls.

A handle evaluates x -> gauge value.  The polytope-backed handle carries an
exact rational scale, so rescaled norms stay exact; the float path exposes
the scaled facet matrix for the smoothing and root-finding code.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

from .body import ConvexBody, scale_body
from .errors import DomainError, RepresentationError
from .rationals import RatVec, head_part, vec


class PolytopeNorm:
    """Norm x -> scale * gauge_body(x); exact on rational inputs."""

    def __init__(self, body: ConvexBody, scale: Fraction = Fraction(1)):
        scale = Fraction(scale)
        if scale <= 0:
            raise DomainError("norm scale must be positive")
        self.body = body
        self.scale = scale
        self._float_rows: np.ndarray | None = None

    def __call__(self, x: Sequence) -> Fraction:
        return self.scale * self.body.gauge(x)

    def value_lp(self, x: Sequence) -> Fraction:
        """Same value through the vertex LP; an independent exact route."""
        return self.scale * self.body.gauge_lp(x)

    @property
    def dim(self) -> int:
        return self.body.dim

    def functionals(self) -> tuple[RatVec, ...]:
        """Scaled facet rows a with norm(x) = max_a |<a, x>|."""
        s = self.scale
        return tuple(tuple(s * c for c in row) for row in self.body.hrep)

    def ball_vertices(self) -> tuple[RatVec, ...]:
        """Vertices of the unit ball of this norm."""
        s = self.scale
        return tuple(tuple(c / s for c in v) for v in self.body.vrep)

    def unit_ball(self) -> ConvexBody:
        if self.scale == 1:
            return self.body
        return scale_body(self.body, Fraction(1) / self.scale)

    def float_rows(self) -> np.ndarray:
        if self._float_rows is None:
            self._float_rows = np.array(
                [[float(c) for c in row] for row in self.functionals()],
                dtype=float)
        return self._float_rows

    def value_float(self, x: np.ndarray) -> float:
        return float(np.max(np.abs(self.float_rows() @ x)))

    def rescaled(self, s: Fraction) -> "PolytopeNorm":
        return PolytopeNorm(self.body, self.scale * Fraction(s))


def basis_constant(norm: PolytopeNorm) -> Fraction:
    """Largest head-projection operator norm over k = 1 .. M-1; exact.

    Computed by maximizing the norm of projected unit-ball vertices, which
    is where the maximum of a convex function over the ball is attained.
    Triggers facet/vertex conversion when a representation is missing.
    """
    dim = norm.dim
    if dim < 2:
        return Fraction(1)
    verts = norm.ball_vertices()
    if not verts:
        raise RepresentationError("norm ball has no vertices")
    best = Fraction(0)
    for k in range(1, dim):
        for v in verts:
            val = norm(head_part(vec(v), k))
            if val > best:
                best = val
    return best


def tail_projection_constant(norm: PolytopeNorm) -> Fraction:
    """Largest tail-projection operator norm over k = 1 .. M-1; exact."""
    dim = norm.dim
    if dim < 2:
        return Fraction(1)
    best = Fraction(0)
    for k in range(1, dim):
        for v in norm.ball_vertices():
            tail = tuple(Fraction(0) if i < k else c for i, c in enumerate(v))
            val = norm(tail)
            if val > best:
                best = val
    return best
