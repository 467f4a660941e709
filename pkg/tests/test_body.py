"""Exact body calculus: gauges, enumeration, hulls, slabs, sections.

The independent oracle for the enumeration routines is a brute-force
combinatorial enumerator (solve every dim-subset of signed constraints and
keep feasible solutions), which shares no code with the incremental
clipping path.
"""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import renorm
from renorm.body import (
    ConvexBody,
    _independent_subset,
    _invert,
    body_from_text,
    body_to_text,
    ell1_ball,
    ellinf_ball,
    facet_enumerate,
    hull_of_points,
    hull_union,
    intersect_slab,
    scale_body,
    section,
    vertex_enumerate,
)
from renorm.errors import (
    LowerDimensionalBodyError,
    RepresentationError,
    UnboundedBodyError,
)
from renorm.norms import PolytopeNorm, basis_constant
from renorm.rationals import dot, vec


def brute_force_vertices(functionals, dim):
    """Oracle: solve every dim-subset of signed constraints; keep feasible."""
    signed = []
    for f in functionals:
        signed.append(tuple(f))
        signed.append(tuple(-c for c in f))
    verts = set()
    for subset in itertools.combinations(range(len(signed)), dim):
        rows = [signed[i] for i in subset]
        if _independent_subset(rows, dim) is None:
            continue
        inv = _invert(rows)
        ones = tuple(Fraction(1) for _ in range(dim))
        x = tuple(dot(row, ones) for row in inv)
        if all(abs(dot(a, x)) <= 1 for a in functionals):
            verts.add(x)
    return verts


F = Fraction


class TestGauge:
    def test_cube_facet_arithmetic(self):
        cube = ellinf_ball(2)
        assert cube.gauge((F(2), F(0))) == 2

    def test_origin(self):
        assert ell1_ball(3).gauge((F(0), F(0), F(0))) == 0

    def test_fixture_hull_point(self, plane_step):
        _, cert = plane_step
        assert cert.merged.gauge((F(0), F(1))) == 1
        assert cert.merged.gauge_lp((F(0), F(1))) == 1

    def test_routes_agree_on_random_points(self, plane_step):
        leveled, cert = plane_step
        pts = renorm.random_rational_vectors(2, 40, seed=5)
        for body in (leveled, cert.merged, cert.slab_piece):
            for x in pts:
                assert body.gauge(x) == body.gauge_lp(x)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.integers(-40, 40), min_size=2, max_size=2),
           st.integers(-12, 12))
    def test_homogeneity(self, coords, scale):
        body = ellinf_ball(2)
        x = vec([F(c, 8) for c in coords])
        s = F(scale, 4)
        assert body.gauge([s * c for c in x]) == abs(s) * body.gauge(x)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.integers(-40, 40), min_size=2, max_size=2),
           st.lists(st.integers(-40, 40), min_size=2, max_size=2))
    def test_triangle(self, a, b):
        body = hull_of_points(
            [(F(2), F(1)), (F(1), F(-2)), (F(1, 2), F(3))], 2)
        x = vec([F(c, 8) for c in a])
        y = vec([F(c, 8) for c in b])
        s = body.gauge([p + q for p, q in zip(x, y)])
        assert s <= body.gauge(x) + body.gauge(y)

    def test_scaling_identity(self):
        body = ell1_ball(3)
        x = (F(1, 3), F(2, 5), F(-1))
        assert scale_body(body, F(5, 2)).gauge(x) == body.gauge(x) / F(5, 2)

    def test_containment_reverses_gauges(self, plane_step):
        leveled, _ = plane_step
        cube = ellinf_ball(2)
        # cube inside leveled hull: gauges reverse pointwise
        for x in renorm.random_rational_vectors(2, 30, seed=6):
            assert leveled.gauge(x) <= cube.gauge(x)


class TestEnumeration:
    def test_square_roundtrip(self):
        verts = vertex_enumerate([(F(1), F(0)), (F(0), F(1))])
        assert set(verts) == {(F(1), F(1)), (F(1), F(-1))}

    def test_cross_polytope_facets(self):
        facets = facet_enumerate([(F(1), F(0)), (F(0), F(1))])
        assert set(facets) == {(F(1), F(1)), (F(1), F(-1))}

    def test_fixture_merged_vertices(self, plane_step):
        _, cert = plane_step
        assert set(cert.merged.vrep) == {
            (F(2), F(1, 2)), (F(2), F(-1, 2)), (F(1), F(1)), (F(1), F(-1))}

    def test_fixture_leveled_vertices(self, plane_step):
        leveled, _ = plane_step
        assert set(leveled.vrep) == {
            (F(2), F(1, 2)), (F(2), F(-1, 2)), (F(0), F(5, 3))}

    @pytest.mark.parametrize("dim", [2, 3])
    def test_against_brute_force(self, dim):
        import numpy as np
        rng = np.random.default_rng(17)
        for _ in range(6):
            rows = []
            for i in range(dim):
                e = [F(0)] * dim
                e[i] = F(1)
                rows.append(tuple(e))
            for _ in range(3):
                r = tuple(F(int(c), 4) for c in rng.integers(-8, 9, size=dim))
                if any(c != 0 for c in r):
                    rows.append(r)
            got = set()
            for v in vertex_enumerate(rows, dim):
                got.add(v)
                got.add(tuple(-c for c in v))
            assert got == brute_force_vertices(rows, dim)

    def test_unbounded_rejected(self):
        with pytest.raises(UnboundedBodyError):
            vertex_enumerate([(F(1), F(0))], 2)

    def test_lower_dimensional_flagged(self):
        with pytest.raises(LowerDimensionalBodyError):
            facet_enumerate([(F(1), F(0)), (F(2), F(0))], 2)

    def test_zero_functional_rejected(self):
        with pytest.raises(RepresentationError):
            vertex_enumerate([(F(0), F(0)), (F(1), F(1))], 2)

    def test_roundtrip_same_body(self):
        body = hull_of_points(
            [(F(3), F(1)), (F(1), F(2)), (F(-1), F(3, 2)), (F(2), F(-2))], 2)
        again = ConvexBody(2, hrep=body.hrep, validate=False)
        assert sorted(again.vrep) == sorted(body.vrep)
        back = ConvexBody(2, vrep=body.vrep, validate=False)
        assert sorted(back.hrep) == sorted(body.hrep)


class TestHulls:
    def test_idempotence(self, square):
        assert hull_union(square, square) == square

    def test_nesting(self, square):
        big = scale_body(square, F(2))
        assert hull_union(square, big) == big

    def test_fixture(self, square, plane_step):
        _, cert = plane_step
        merged = hull_union(cert.slab_piece, square)
        assert merged == cert.merged


class TestSlabs:
    def test_square_cut(self, square):
        rows = PolytopeNorm(square).functionals()
        out = intersect_slab(square, rows, 1, F(1, 2))
        assert set(out.vrep) == {(F(1), F(1, 2)), (F(1), F(-1, 2))}

    def test_wide_slab_no_change(self, square):
        rows = PolytopeNorm(square).functionals()
        out = intersect_slab(square, rows, 1, F(5))
        assert out == square

    def test_fixture_piece(self, square):
        rows = PolytopeNorm(square).functionals()
        big = scale_body(square, F(2))
        piece = intersect_slab(big, rows, 1, F(1, 2))
        assert set(piece.vrep) == {(F(2), F(1, 2)), (F(2), F(-1, 2))}


class TestSections:
    def test_cube_section_is_cube(self):
        cube = ellinf_ball(3)
        sec = section(cube, 1)
        assert sec == ellinf_ball(2)

    def test_fixture_leveled_section(self, plane_step):
        leveled, _ = plane_step
        sec = section(leveled, 1)
        assert set(sec.vrep) == {(F(5, 3),)}

    def test_degenerate_flag(self, square):
        assert section(square, 2) is None


class TestBasisConstant:
    def test_cube_and_cross(self):
        for dim in (2, 3, 4):
            assert basis_constant(PolytopeNorm(ellinf_ball(dim))) == 1
            assert basis_constant(PolytopeNorm(ell1_ball(dim))) == 1

    def test_fixture_level(self, plane_step):
        leveled, _ = plane_step
        assert basis_constant(PolytopeNorm(leveled)) == 1

    def test_skewed_body_exceeds_one(self):
        body = hull_of_points([(F(1), F(1)), (F(0), F(1, 2))], 2)
        # the head projection of the vertex (1, 1) leaves the body
        assert basis_constant(PolytopeNorm(body)) == 3


class TestSerialization:
    def test_text_roundtrip(self, plane_step):
        leveled, cert = plane_step
        for body in (leveled, cert.merged):
            again = body_from_text(body_to_text(body))
            assert again.hrep == body.hrep
            assert again.vrep == body.vrep

    def test_mutual_agreement_guard(self):
        with pytest.raises(renorm.InvariantError):
            ConvexBody(2,
                       hrep=[(F(1), F(0)), (F(0), F(1))],
                       vrep=[(F(2), F(2)), (F(2), F(-2))])
