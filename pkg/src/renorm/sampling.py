"""Deterministic test-point generation for the verification suites."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import ParameterError
from .rationals import RatVec


def sample_tail_vectors(dim: int, N: int, count: int, seed: int
                        ) -> np.ndarray:
    """Uniform-on-sphere directions supported on coordinates past N.

    Head coordinates are exactly zero; deterministic per seed.
    """
    if N >= dim:
        raise ParameterError("tail index must stay below the dimension")
    rng = np.random.default_rng(seed)
    out = np.zeros((count, dim))
    d = dim - N
    g = rng.standard_normal((count, d))
    norms = np.linalg.norm(g, axis=1)
    # resample the (measure-zero) degenerate rows
    while np.any(norms == 0.0):
        bad = norms == 0.0
        g[bad] = rng.standard_normal((int(bad.sum()), d))
        norms = np.linalg.norm(g, axis=1)
    out[:, N:] = g / norms[:, None]
    return out


def random_rational_vectors(dim: int, count: int, seed: int,
                            denominator: int = 64, tail_from: int = 0
                            ) -> list[RatVec]:
    """Nonzero rational vectors on a grid; exact and fast to evaluate."""
    rng = np.random.default_rng(seed)
    out: list[RatVec] = []
    while len(out) < count:
        z = rng.integers(-denominator, denominator + 1, size=dim)
        z[:tail_from] = 0
        if not np.any(z):
            continue
        out.append(tuple(Fraction(int(c), denominator) for c in z))
    return out


def random_rational_scalar(rng: np.random.Generator, lo: Fraction,
                           hi: Fraction, denominator: int = 1000) -> Fraction:
    """A rational in (lo, hi] on a fixed grid."""
    lo, hi = Fraction(lo), Fraction(hi)
    steps = int(rng.integers(1, denominator + 1))
    return lo + (hi - lo) * Fraction(steps, denominator)
