"""Dense exact-rational linear programming (two-phase simplex, Bland's rule).

Only meant for the small systems this package produces (a handful of rows,
up to a few hundred columns); everything is Fraction arithmetic, so results
are exact and the gauge values derived from them admit equality tests.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import RepresentationError
from .rationals import RatVec


class LPInfeasible(RepresentationError):
    pass


class LPUnbounded(RepresentationError):
    pass


def _pivot(T, basis, row, col):
    piv = T[row][col]
    T[row] = [v / piv for v in T[row]]
    for r in range(len(T)):
        if r != row and T[r][col] != 0:
            f = T[r][col]
            T[r] = [a - f * b for a, b in zip(T[r], T[row])]
    basis[row] = col


def _simplex(T, basis, ncols):
    """Minimize the objective in the last tableau row; Bland's rule."""
    m = len(T) - 1
    while True:
        col = -1
        for j in range(ncols):
            if T[m][j] < 0:
                col = j
                break
        if col < 0:
            return
        row = -1
        best = None
        for i in range(m):
            if T[i][col] > 0:
                ratio = T[i][-1] / T[i][col]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[row]):
                    best = ratio
                    row = i
        if row < 0:
            raise LPUnbounded("objective unbounded below")
        _pivot(T, basis, row, col)


def solve_min(c: Sequence[Fraction], A: Sequence[RatVec], b: RatVec):
    """min c.x subject to A x = b, x >= 0; exact.

    Returns (value, x).  Raises LPInfeasible / LPUnbounded.
    """
    m = len(A)
    n = len(c)
    rows = [list(r) for r in A]
    rhs = list(b)
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]

    # phase 1: artificial variables, minimize their sum
    T = []
    for i in range(m):
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        T.append(rows[i] + art + [rhs[i]])
    obj = [Fraction(0)] * (n + m) + [Fraction(0)]
    for j in range(n, n + m):
        obj[j] = Fraction(1)
    T.append(obj)
    basis = list(range(n, n + m))
    # price out artificials
    for i in range(m):
        T[m] = [a - b2 for a, b2 in zip(T[m], T[i])]
    _simplex(T, basis, n + m)
    if T[m][-1] != 0:
        raise LPInfeasible("no feasible point")
    # drive remaining artificials out of the basis where possible
    for i in range(m):
        if basis[i] >= n:
            for j in range(n):
                if T[i][j] != 0:
                    _pivot(T, basis, i, j)
                    break

    # phase 2 on the original objective
    keep = [r for r, bi in enumerate(basis) if bi < n]
    T2 = [[T[r][j] for j in range(n)] + [T[r][-1]] for r in keep]
    basis2 = [basis[r] for r in keep]
    obj2 = list(c) + [Fraction(0)]
    T2.append(obj2)
    mm = len(basis2)
    for i in range(mm):
        f = T2[mm][basis2[i]]
        if f != 0:
            T2[mm] = [a - f * b2 for a, b2 in zip(T2[mm], T2[i])]
    _simplex(T2, basis2, n)
    x = [Fraction(0)] * n
    for i, bi in enumerate(basis2):
        x[bi] = T2[i][-1]
    value = -T2[mm][-1]
    return value, tuple(x)


def gauge_from_vertices(vertices: Sequence[RatVec], x: RatVec) -> Fraction:
    """Gauge of the symmetric hull of +-vertices at x, via the exact LP.

    min sum t_i  s.t.  sum t_i w_i = x, t_i >= 0, where w_i runs over the
    vertices and their negatives.
    """
    if all(c == 0 for c in x):
        return Fraction(0)
    cols = []
    for v in vertices:
        cols.append(v)
        cols.append(tuple(-a for a in v))
    dim = len(x)
    A = [tuple(col[i] for col in cols) for i in range(dim)]
    c = [Fraction(1)] * len(cols)
    try:
        value, _ = solve_min(c, A, x)
    except LPInfeasible as exc:
        raise RepresentationError(
            "point outside the span of the vertex set") from exc
    return value
