"""Exact symmetric convex polytopes and their geometric primitives.

A body is a bounded, symmetric convex polytope in R^M with the origin in
its interior, described by facets (H-rep), vertices (V-rep), or both.
Symmetry is stored implicitly: one representative per {w, -w} pair, with
every facet row a meaning the constraint pair ``|<a, x>| <= 1``.

All arithmetic in this module is exact rational.  Conversions between the
two representations go through a single incremental halfspace-clipping
enumerator; facet enumeration is vertex enumeration of the polar body,
which for symmetric bodies with 0 in the interior is again of this class.
"""

from __future__ import annotations

import itertools
import json
import math
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    DomainError,
    InvariantError,
    LowerDimensionalBodyError,
    RepresentationError,
    UnboundedBodyError,
)
from .exactlp import gauge_from_vertices
from .rationals import (
    IntRows,
    RatVec,
    canonical_sign,
    dot,
    from_int_form,
    int_form,
    is_zero,
    neg,
    rat_str,
    smul,
    sub,
    vec,
)

# Double-description cost grows quickly with dimension; this guards against
# accidentally huge inputs.  Callers may override per body.
DEFAULT_MAX_DIM = 6


# ---------------------------------------------------------------------------
# integer linear algebra helpers


def _int_rank(rows: Sequence[Sequence[int]], dim: int) -> int:
    """Rank of an integer matrix via division-free elimination."""
    m = [list(r) for r in rows]
    nrows = len(m)
    rank = 0
    r = 0
    for c in range(dim):
        piv = -1
        for i in range(r, nrows):
            if m[i][c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, nrows):
            if m[i][c] != 0:
                f1, f2 = m[r][c], m[i][c]
                m[i] = [f1 * a - f2 * b for a, b in zip(m[i], m[r])]
        r += 1
        rank += 1
        if r == nrows:
            break
    return rank


def _independent_subset(rows: Sequence[RatVec], dim: int) -> list[int] | None:
    """Indices of dim linearly independent rows, or None."""
    chosen: list[int] = []
    basis: list[list[Fraction]] = []
    for idx, row in enumerate(rows):
        cand = list(row)
        for b in basis:
            # eliminate with pivot of b
            p = next(i for i, v in enumerate(b) if v != 0)
            if cand[p] != 0:
                f = cand[p] / b[p]
                cand = [a - f * c for a, c in zip(cand, b)]
        if any(v != 0 for v in cand):
            basis.append(cand)
            chosen.append(idx)
            if len(chosen) == dim:
                return chosen
    return None


def _invert(matrix: Sequence[RatVec]) -> list[list[Fraction]]:
    """Inverse of a square rational matrix (Gauss-Jordan)."""
    n = len(matrix)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(matrix)]
    for col in range(n):
        piv = next(i for i in range(col, n) if aug[i][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for i in range(n):
            if i != col and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [a - f * b for a, b in zip(aug[i], aug[col])]
    return [row[n:] for row in aug]


# ---------------------------------------------------------------------------
# vertex enumeration by incremental clipping


class _Pt:
    """A vertex in cleared-denominator form: the point is z / q."""

    __slots__ = ("z", "q", "tight")

    def __init__(self, z: tuple[int, ...], q: int):
        self.z = z
        self.q = q
        self.tight: set[int] = set()

    @property
    def key(self) -> tuple:
        # integer key: Fraction hashing is far too slow for hot dicts
        return (self.z, self.q)

    def to_vec(self) -> RatVec:
        return tuple(Fraction(c, self.q) for c in self.z)


def _reduce_int_vec(z: list[int], q: int) -> tuple[tuple[int, ...], int]:
    g = q
    for c in z:
        g = math.gcd(g, c)
        if g == 1:
            break
    if g > 1:
        z = [c // g for c in z]
        q //= g
    return tuple(z), q


def _classify(pt: _Pt, funcs: list[tuple[RatVec, tuple[int, ...], int]],
              dim: int) -> bool:
    """Fill the signed tight set; False when infeasible or not a vertex.

    Tight keys encode the facet side: 2 * index for the +1 face and
    2 * index + 1 for the -1 face, so antipodal vertices do not alias.
    """
    tight_idx = []
    for idx, (_, g, d) in enumerate(funcs):
        n = 0
        for gi, zi in zip(g, pt.z):
            n += gi * zi
        bound = d * pt.q
        if n > bound or -n > bound:
            return False
        if n == bound:
            tight_idx.append(2 * idx)
        elif -n == bound:
            tight_idx.append(2 * idx + 1)
    if len(tight_idx) < dim:
        return False
    if _int_rank([funcs[i // 2][1] for i in tight_idx], dim) < dim:
        return False
    pt.tight = set(tight_idx)
    return True


def _enumerate_vertices(functionals: Sequence[RatVec], dim: int) -> list[RatVec]:
    """All vertices of {x : |<a_j, x>| <= 1 for every j}; exact.

    Incremental halfspace clipping.  Candidate vertices are generated only
    on crossing edges (pairs whose common tight constraints have rank
    dim - 1) and interpolated in pure integer arithmetic.  Raises
    UnboundedBodyError when the normals do not span R^dim.
    """
    funcs: list[RatVec] = []
    seen = set()
    for f in functionals:
        if is_zero(f):
            raise RepresentationError("zero functional in H-rep")
        c = canonical_sign(f)
        key = int_form(c)
        if key not in seen:
            seen.add(key)
            funcs.append(c)
    base = _independent_subset(funcs, dim)
    if base is None:
        raise UnboundedBodyError(
            f"facet normals span a proper subspace of R^{dim}")

    ainv = _invert([funcs[i] for i in base])
    pts: dict[tuple, _Pt] = {}
    for signs in itertools.product((Fraction(1), Fraction(-1)), repeat=dim):
        v = tuple(dot(row, signs) for row in ainv)
        z, q = int_form(v)
        pt = _Pt(z, q)
        pt.tight = {2 * i + (0 if s > 0 else 1)
                    for i, s in enumerate(signs)}
        pts[pt.key] = pt

    processed: list[tuple[RatVec, tuple[int, ...], int]] = []
    int_rows: list[tuple[int, ...]] = []
    for i in base:
        g, d = int_form(funcs[i])
        processed.append((funcs[i], g, d))
        int_rows.append(g)

    base_set = set(base)
    for j, f in enumerate(funcs):
        if j in base_set:
            continue
        g, d = int_form(f)
        cut_idx = len(processed)
        processed.append((f, g, d))
        int_rows.append(g)
        for sign in (1, -1):
            out = []
            ins = []
            raw: dict[tuple, int] = {}
            for key, pt in pts.items():
                n = 0
                for gi, zi in zip(g, pt.z):
                    n += gi * zi
                n *= sign
                bound = d * pt.q
                if n > bound:
                    out.append(key)
                    raw[key] = n
                elif n < bound:
                    ins.append(key)
                    raw[key] = n
                else:
                    pt.tight.add(2 * cut_idx + (0 if sign > 0 else 1))
            if not out:
                continue
            cands: dict[tuple, _Pt] = {}
            for ki in ins:
                pi = pts[ki]
                ni = raw[ki]
                alpha = d * pi.q - ni
                for ko in out:
                    po = pts[ko]
                    # new vertices lie on crossing edges: the endpoints
                    # share dim - 1 independent tight constraints
                    common = pi.tight & po.tight
                    if len(common) < dim - 1:
                        continue
                    if _int_rank([int_rows[i // 2] for i in common],
                                 dim) < dim - 1:
                        continue
                    no = raw[ko]
                    beta = no * pi.q - ni * po.q
                    t1 = beta - alpha * po.q
                    t2 = alpha * pi.q
                    z = [zi * t1 + zo * t2
                         for zi, zo in zip(pi.z, po.z)]
                    zq = _reduce_int_vec(z, beta * pi.q)
                    if zq not in cands:
                        cands[zq] = _Pt(*zq)
            for ko in out:
                del pts[ko]
            for key, pt in cands.items():
                if key not in pts and _classify(pt, processed, dim):
                    pts[key] = pt
    return [pt.to_vec() for pt in pts.values()]


def _extreme_filter(points: Sequence[RatVec], facets: Sequence[RatVec],
                    dim: int) -> list[RatVec]:
    """Points of the generating set that are vertices of the hull.

    A generating point is a vertex iff the facets tight at it have rank dim
    (signs are irrelevant to the rank).
    """
    fint = [int_form(f) for f in facets]
    keep = []
    for p in points:
        z, q = int_form(p)
        tight = []
        for g, d in fint:
            n = 0
            for gi, zi in zip(g, z):
                n += gi * zi
            if n < 0:
                n = -n
            if n == d * q:
                tight.append(g)
        if len(tight) >= dim and _int_rank(tight, dim) == dim:
            keep.append(p)
    return keep


def _canonical_rows(rows: Iterable[RatVec]) -> tuple[RatVec, ...]:
    seen: dict[tuple, RatVec] = {}
    for r in rows:
        c = canonical_sign(tuple(r))
        seen[int_form(c)] = c
    return tuple(sorted(seen.values()))


# ---------------------------------------------------------------------------
# the body type


class ConvexBody:
    """Bounded symmetric convex polytope with the origin interior.

    Immutable after construction; missing representations are computed
    lazily and cached, so sharing across threads is read-safe.
    """

    __slots__ = ("dim", "_hrep", "_vrep", "_int_h", "_int_v")

    def __init__(self, dim: int, hrep: Sequence[RatVec] | None = None,
                 vrep: Sequence[RatVec] | None = None, validate: bool = True,
                 max_dim: int = DEFAULT_MAX_DIM):
        if dim < 1:
            raise RepresentationError("dimension must be >= 1")
        if dim > max_dim:
            raise RepresentationError(
                f"dimension {dim} above the cap {max_dim}; raise max_dim to "
                "override")
        if hrep is None and vrep is None:
            raise RepresentationError("need at least one representation")
        self.dim = dim
        self._hrep = None if hrep is None else _canonical_rows(hrep)
        self._vrep = None if vrep is None else _canonical_rows(vrep)
        self._int_h = None
        self._int_v = None
        for rep, name in ((self._hrep, "facet"), (self._vrep, "vertex")):
            if rep is not None:
                if not rep:
                    raise RepresentationError(f"empty {name} list")
                for row in rep:
                    if len(row) != dim:
                        raise RepresentationError(f"{name} of wrong length")
                    if is_zero(row):
                        raise RepresentationError(f"zero {name} row")
        if validate:
            self._validate()

    # -- construction helpers ------------------------------------------------

    @classmethod
    def from_hrep(cls, rows: Sequence, max_dim: int = DEFAULT_MAX_DIM
                  ) -> "ConvexBody":
        rows = [vec(r) for r in rows]
        if not rows:
            raise RepresentationError("empty H-rep")
        return cls(len(rows[0]), hrep=rows, max_dim=max_dim)

    @classmethod
    def from_vrep(cls, rows: Sequence, max_dim: int = DEFAULT_MAX_DIM
                  ) -> "ConvexBody":
        rows = [vec(r) for r in rows]
        if not rows:
            raise RepresentationError("empty V-rep")
        return cls(len(rows[0]), vrep=rows, max_dim=max_dim)

    def _validate(self):
        if self._hrep is not None:
            if _independent_subset(self._hrep, self.dim) is None:
                raise UnboundedBodyError("facet normals do not span")
        if self._vrep is not None:
            if _independent_subset(self._vrep, self.dim) is None:
                raise LowerDimensionalBodyError(
                    "vertices span a proper subspace; take a section instead")
        if self._hrep is not None and self._vrep is not None:
            self.check_mutual_agreement()

    def check_mutual_agreement(self):
        """Both representations must describe the same set.

        Every vertex lies on the H-rep boundary and every facet is tight at
        some vertex; exact comparisons.
        """
        for v in self.vrep:
            if self.gauge(v) != 1:
                raise InvariantError("vertex off the facet boundary")
        ints = self._int_vrep()
        for a in self.hrep:
            g, d = int_form(a)
            touched = False
            for z, q in ints:
                n = 0
                for gi, zi in zip(g, z):
                    n += gi * zi
                if abs(n) == d * q:
                    touched = True
                    break
            if not touched:
                raise InvariantError("facet not supported by any vertex")

    # -- representations ----------------------------------------------------

    @property
    def hrep(self) -> tuple[RatVec, ...]:
        if self._hrep is None:
            polar_verts = _enumerate_vertices(self._vrep, self.dim)
            self._hrep = _canonical_rows(polar_verts)
        return self._hrep

    @property
    def vrep(self) -> tuple[RatVec, ...]:
        if self._vrep is None:
            verts = _enumerate_vertices(self._hrep, self.dim)
            self._vrep = _canonical_rows(verts)
        return self._vrep

    def _int_hrep(self) -> IntRows:
        if self._int_h is None:
            self._int_h = IntRows(self.hrep)
        return self._int_h

    def _int_vrep(self) -> list[tuple[tuple[int, ...], int]]:
        if self._int_v is None:
            self._int_v = [int_form(v) for v in self.vrep]
        return self._int_v

    # -- evaluation ----------------------------------------------------------

    def gauge(self, x: Sequence) -> Fraction:
        """Minkowski functional via the facet maximum; exact."""
        x = vec(x)
        if len(x) != self.dim:
            raise DomainError("dimension mismatch")
        if is_zero(x):
            return Fraction(0)
        z, q = int_form(x)
        return self._int_hrep().gauge(z, q)

    def gauge_lp(self, x: Sequence) -> Fraction:
        """Minkowski functional via the exact vertex LP; exact.

        Independent of the facet route; the two must agree.
        """
        x = vec(x)
        if len(x) != self.dim:
            raise DomainError("dimension mismatch")
        return gauge_from_vertices(self.vrep, x)

    def contains(self, x: Sequence) -> bool:
        x = vec(x)
        z, q = int_form(x)
        return self._int_hrep().feasible(z, q)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConvexBody):
            return NotImplemented
        if self.dim != other.dim:
            return False
        return (all(other.gauge(v) <= 1 for v in self.vrep)
                and all(self.gauge(v) <= 1 for v in other.vrep))

    def __hash__(self):
        return hash((self.dim, self.vrep))

    def __repr__(self):
        h = len(self._hrep) if self._hrep is not None else "?"
        v = len(self._vrep) if self._vrep is not None else "?"
        return f"ConvexBody(dim={self.dim}, facets={h}, vertices={v})"


# ---------------------------------------------------------------------------
# operations


def vertex_enumerate(hrep: Sequence[RatVec], dim: int | None = None
                     ) -> tuple[RatVec, ...]:
    """Minimal V-rep of {|<a_j, x>| <= 1}; exact double description."""
    rows = [vec(r) for r in hrep]
    if not rows:
        raise RepresentationError("empty H-rep")
    dim = dim or len(rows[0])
    return _canonical_rows(_enumerate_vertices(rows, dim))


def facet_enumerate(vrep: Sequence[RatVec], dim: int | None = None
                    ) -> tuple[RatVec, ...]:
    """Minimal H-rep of the symmetric hull of the vertices; exact.

    Facets of the body are vertices of its polar, so this is vertex
    enumeration applied to the vertex rows read as functionals.
    """
    rows = [vec(r) for r in vrep]
    if not rows:
        raise RepresentationError("empty V-rep")
    dim = dim or len(rows[0])
    if _independent_subset(rows, dim) is None:
        raise LowerDimensionalBodyError(
            "vertices span a proper subspace; handle as a section")
    return _canonical_rows(_enumerate_vertices(rows, dim))


def hull_of_points(points: Sequence[RatVec], dim: int) -> ConvexBody:
    """Symmetric convex hull of +-points as a body with both reps."""
    pts = _canonical_rows(points)
    facets = facet_enumerate(pts, dim)
    verts = _extreme_filter(pts, facets, dim)
    return ConvexBody(dim, hrep=facets, vrep=verts, validate=False)


def hull_union(a: ConvexBody, b: ConvexBody) -> ConvexBody:
    """Closed convex hull of the union of two bodies."""
    if a.dim != b.dim:
        raise RepresentationError("dimension mismatch")
    return hull_of_points(tuple(a.vrep) + tuple(b.vrep), a.dim)


def scale_body(body: ConvexBody, s: Fraction) -> ConvexBody:
    """s * body; gauges scale by 1/s."""
    s = Fraction(s)
    if s <= 0:
        raise DomainError("scale must be positive")
    hrep = None if body._hrep is None else [smul(1 / s, a) for a in body._hrep]
    vrep = None if body._vrep is None else [smul(s, v) for v in body._vrep]
    return ConvexBody(body.dim, hrep=hrep, vrep=vrep, validate=False)


def _dedupe_directions(rows: Iterable[RatVec]) -> list[RatVec]:
    """Keep, per direction, only the tightest constraint (largest scale)."""
    best: dict[tuple, RatVec] = {}
    for r in rows:
        c = canonical_sign(r)
        # normalize the direction by the first nonzero coordinate
        lead = next(v for v in c if v != 0)
        key = int_form(tuple(v / lead for v in c))
        cur = best.get(key)
        if cur is None or lead > next(v for v in cur if v != 0):
            best[key] = c
    return list(best.values())


def intersect_halfspaces(body: ConvexBody, rows: Sequence[RatVec]
                         ) -> ConvexBody:
    """body intersected with {|<a, x>| <= 1} for each extra row; minimal."""
    all_rows = _dedupe_directions(list(body.hrep) + list(rows))
    verts = _canonical_rows(_enumerate_vertices(all_rows, body.dim))
    # minimal facet rows of the intersection are the polar's vertices
    facets = facet_enumerate(verts, body.dim)
    return ConvexBody(body.dim, hrep=facets, vrep=verts, validate=False)


def intersect_slab(body: ConvexBody, norm_rows: Sequence[RatVec], k: int,
                   bound: Fraction) -> ConvexBody:
    """body intersected with {x : tail-norm(x) <= bound}.

    ``norm_rows`` are the functionals of the norm measuring the tail; the
    slab contributes the rows (a o P^k) / bound with the head coordinates
    of each functional zeroed.
    """
    bound = Fraction(bound)
    if bound <= 0:
        raise DomainError("slab bound must be positive")
    extra = []
    for a in norm_rows:
        masked = tuple(Fraction(0) if i < k else c for i, c in enumerate(a))
        if not is_zero(masked):
            extra.append(smul(Fraction(1) / bound, masked))
    if not extra:
        return body
    return intersect_halfspaces(body, extra)


def section(body: ConvexBody, k: int) -> ConvexBody | None:
    """Exact trace of the body on the tail coordinates past index k.

    Returned as a body in R^(M-k); ``None`` flags the degenerate {0}
    section at k = M.  Embed results back with :func:`embed_tail`.
    """
    if k < 0 or k > body.dim:
        raise DomainError("section index out of range")
    if k == 0:
        return body
    if k == body.dim:
        return None
    rows = []
    for a in body.hrep:
        tail = tuple(a[k:])
        if not is_zero(tail):
            rows.append(tail)
    rows = _dedupe_directions(rows)
    sub_dim = body.dim - k
    verts = _enumerate_vertices(rows, sub_dim)
    facets = facet_enumerate(_canonical_rows(verts), sub_dim)
    return ConvexBody(sub_dim, hrep=facets, vrep=_canonical_rows(verts),
                      validate=False)


def embed_tail(v: RatVec, k: int, dim: int) -> RatVec:
    """Zero-pad a tail-coordinates vector back into R^dim."""
    return tuple(Fraction(0) for _ in range(k)) + tuple(v)


# ---------------------------------------------------------------------------
# coordinate splits


class CoordinateSplit:
    """Head/tail coordinate projections at index k."""

    def __init__(self, k: int, dim: int):
        if not 0 <= k <= dim:
            raise DomainError("split index out of range")
        self.k = k
        self.dim = dim

    def head(self, x: RatVec) -> RatVec:
        return tuple(a if i < self.k else Fraction(0)
                     for i, a in enumerate(x))

    def tail(self, x: RatVec) -> RatVec:
        return tuple(Fraction(0) if i < self.k else a
                     for i, a in enumerate(x))


# ---------------------------------------------------------------------------
# serialization


def body_to_doc(body: ConvexBody) -> dict:
    doc: dict = {"dimension": body.dim}
    kinds = []
    if body._hrep is not None:
        kinds.append("hrep")
        doc["hrep"] = [[rat_str(c) for c in row] for row in body._hrep]
    if body._vrep is not None:
        kinds.append("vrep")
        doc["vrep"] = [[rat_str(c) for c in row] for row in body._vrep]
    doc["kind"] = "+".join(kinds)
    return doc


def body_from_doc(doc: dict, max_dim: int = DEFAULT_MAX_DIM) -> ConvexBody:
    dim = int(doc["dimension"])
    hrep = [vec(row) for row in doc["hrep"]] if "hrep" in doc else None
    vrep = [vec(row) for row in doc["vrep"]] if "vrep" in doc else None
    return ConvexBody(dim, hrep=hrep, vrep=vrep, max_dim=max_dim)


def body_to_text(body: ConvexBody) -> str:
    return json.dumps(body_to_doc(body), indent=1, sort_keys=True)


def body_from_text(text: str, max_dim: int = DEFAULT_MAX_DIM) -> ConvexBody:
    return body_from_doc(json.loads(text), max_dim=max_dim)


# ---------------------------------------------------------------------------
# stock bodies


def ellinf_ball(dim: int) -> ConvexBody:
    """Unit cube: |x_i| <= 1."""
    rows = []
    for i in range(dim):
        row = [Fraction(0)] * dim
        row[i] = Fraction(1)
        rows.append(tuple(row))
    verts = [tuple(Fraction(s) for s in signs)
             for signs in itertools.product((1, -1), repeat=dim)]
    return ConvexBody(dim, hrep=rows, vrep=verts, validate=False)


def ell1_ball(dim: int) -> ConvexBody:
    """Cross-polytope: sum |x_i| <= 1."""
    verts = []
    for i in range(dim):
        row = [Fraction(0)] * dim
        row[i] = Fraction(1)
        verts.append(tuple(row))
    rows = [tuple(Fraction(s) for s in signs)
            for signs in itertools.product((1, -1), repeat=dim)]
    return ConvexBody(dim, hrep=_canonical_rows(rows), vrep=verts,
                      validate=False)
