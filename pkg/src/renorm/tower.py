"""The renorming tower: one certified surgery step, iterated and rescaled.

One step takes a unit ball B, a split index k, an inflation lam and a slab
radius R, and produces a new ball whose norm agrees with the old one up to
the factor (1 + lam) everywhere, equals (1 + lam*gamma)^(-1) times it on
tail vectors, and equals (1 + lam)^(-1) times it on vectors whose tail is
relatively small.  Every claimed identity is verified exactly during
construction; failures raise InvariantError since they can only come from
bugs, not data.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .body import (
    ConvexBody,
    embed_tail,
    hull_of_points,
    hull_union,
    intersect_slab,
    scale_body,
    section,
)
from .errors import DomainError, InvariantError, ParameterError
from .norms import PolytopeNorm, basis_constant
from .rationals import RatVec, head_part, is_zero, tail_part, vec


def build_slab_piece(ball: ConvexBody, k: int, R: Fraction, lam: Fraction
                     ) -> ConvexBody:
    """(1 + lam) * ball cut down to {x : tail-norm(x) <= R}.

    lam = 0 is permitted as the degenerate boundary case.
    """
    R = Fraction(R)
    lam = Fraction(lam)
    if not 0 < R < 1:
        raise ParameterError("slab radius must lie in (0, 1)")
    if lam < 0:
        raise ParameterError("inflation must be nonnegative")
    rows = PolytopeNorm(ball).functionals()
    return intersect_slab(scale_body(ball, 1 + lam), rows, k, R)


def merge_with_ball(piece: ConvexBody, ball: ConvexBody, *, k: int,
                    lam: Fraction, R: Fraction,
                    K: Fraction | None = None) -> ConvexBody:
    """Convex hull of the slab piece with the ball.

    Asserts exactly that the tail section of the hull stays inside
    (1 + lam * K / (K + 1 - R)) * ball, the quantitative heart of the
    whole construction.
    """
    merged = hull_union(piece, ball)
    if K is None:
        K = basis_constant(PolytopeNorm(ball))
    bound = 1 + Fraction(lam) * K / (K + 1 - Fraction(R))
    sec = section(merged, k)
    if sec is not None:
        ball_norm = PolytopeNorm(ball)
        for v in sec.vrep:
            g = ball_norm(embed_tail(v, k, ball.dim))
            if g > bound:
                raise InvariantError(
                    f"tail section escapes the certified bound: {g} > {bound}")
    return merged


def tail_leveled_hull(merged: ConvexBody, ball: ConvexBody, *, k: int,
                      lam: Fraction, gamma: Fraction, R: Fraction
                      ) -> ConvexBody:
    """Hull of the merged body with the tail slice (1+lam*gamma)*ball.

    The result agrees with (1 + lam) * ball inside the slab and its tail
    section is exactly the tail section of (1 + lam*gamma) * ball; both
    identities plus the two-sided inclusion are verified exactly.
    """
    lam = Fraction(lam)
    gamma = Fraction(gamma)
    pts = list(merged.vrep)
    sec = section(ball, k)
    if sec is not None:
        for v in sec.vrep:
            pts.append(embed_tail(tuple((1 + lam * gamma) * c for c in v),
                                  k, ball.dim))
    leveled = hull_of_points(pts, ball.dim)

    # two-sided inclusion: ball <= leveled <= (1+lam) * ball
    for v in ball.vrep:
        if leveled.gauge(v) > 1:
            raise InvariantError("leveled hull does not contain the ball")
    for v in leveled.vrep:
        if ball.gauge(v) > 1 + lam:
            raise InvariantError("leveled hull escapes the inflated ball")

    # slab identity: slab cut of leveled equals slab cut of the inflation
    rows = PolytopeNorm(ball).functionals()
    lhs = intersect_slab(leveled, rows, k, R)
    rhs = intersect_slab(scale_body(ball, 1 + lam), rows, k, R)
    if lhs != rhs:
        raise InvariantError("slab identity failed")

    # tail identity: sections agree as bodies of the tail coordinates
    sec_lev = section(leveled, k)
    if sec_lev is not None:
        sec_ref = scale_body(sec, 1 + lam * gamma)
        if sec_lev != sec_ref:
            raise InvariantError("tail section identity failed")
    return leveled


@dataclass
class StepCertificate:
    """Exactly verified facts about one surgery step."""

    k: int
    lam: Fraction
    R: Fraction
    K_prev: Fraction
    gamma: Fraction
    slab_piece: ConvexBody
    merged: ConvexBody
    result: ConvexBody
    # the small-tail hypothesis measures the projection in the pre-step
    # norm, matching the subscripted form of the level identities
    tail_norm_reading: str = "pre-step"
    checks: dict = field(default_factory=dict)


def small_tail_witness(norm: PolytopeNorm, k: int, lam: Fraction,
                       R: Fraction, head: RatVec, tail: RatVec
                       ) -> RatVec | None:
    """Combine head + tail into a vector satisfying the small-tail test.

    Scales both parts so that tail-norm(x) <= R/(1+lam) * norm(x) holds
    exactly; returns None when the inputs cannot produce a witness.
    """
    lam = Fraction(lam)
    R = Fraction(R)
    h = head_part(vec(head), k)
    t = tail_part(vec(tail), k)
    if is_zero(h):
        return None
    nh = norm(h)
    h = tuple(c / nh for c in h)
    if is_zero(t):
        return h
    # tail mass s = R / (2 (1 + lam + R)) guarantees the strict inequality
    s = R / (2 * (1 + lam + R))
    nt = norm(t)
    t = tuple(s * c / nt for c in t)
    x = tuple(a + b for a, b in zip(h, t))
    if norm(tail_part(x, k)) * (1 + lam) <= R * norm(x):
        return x
    return None


def renorm_step(ball: ConvexBody, k: int, lam: Fraction, R: Fraction,
                sample_vectors: Sequence[RatVec] = (),
                witness_pairs: Sequence[tuple[RatVec, RatVec]] = ()
                ) -> tuple[ConvexBody, StepCertificate]:
    """One certified surgery step on the given unit ball.

    Returns the new ball along with a certificate recording the exact
    verification of the sandwich, the tail equality, and the small-tail
    equality on constructed witnesses.
    """
    lam = Fraction(lam)
    R = Fraction(R)
    if not 0 < R < 1:
        raise ParameterError("slab radius must lie in (0, 1)")
    if lam < 0:
        raise ParameterError("inflation must be nonnegative")
    if not 1 <= k <= ball.dim:
        raise ParameterError("split index out of range")

    norm_prev = PolytopeNorm(ball)
    K = basis_constant(norm_prev)
    gamma = K / (K + 1 - R)
    piece = build_slab_piece(ball, k, R, lam)
    merged = merge_with_ball(piece, ball, k=k, lam=lam, R=R, K=K)
    leveled = tail_leveled_hull(merged, ball, k=k, lam=lam, gamma=gamma, R=R)
    norm_new = PolytopeNorm(leveled)

    checks: dict = {}

    # (a) sandwich on every vertex of both bodies and on the samples
    def check_sandwich(x):
        a = norm_new(x)
        b = norm_prev(x)
        if not (a <= b <= (1 + lam) * a):
            raise InvariantError(f"sandwich failed at {x}")

    for v in ball.vrep:
        check_sandwich(v)
    for v in leveled.vrep:
        check_sandwich(v)
    for x in sample_vectors:
        check_sandwich(vec(x))
    checks["sandwich"] = True

    # (b) exact tail equality on section vertices and tail samples
    sec = section(leveled, k)
    if sec is not None:
        for v in sec.vrep:
            x = embed_tail(v, k, ball.dim)
            if norm_prev(x) != (1 + lam * gamma) * norm_new(x):
                raise InvariantError("tail equality failed at a vertex")
        for x in sample_vectors:
            t = tail_part(vec(x), k)
            if is_zero(t):
                continue
            if norm_prev(t) != (1 + lam * gamma) * norm_new(t):
                raise InvariantError("tail equality failed at a sample")
    checks["tail_equality"] = True

    # (c) small-tail equality on constructed witnesses
    used = 0
    for head, tail in witness_pairs:
        x = small_tail_witness(norm_prev, k, lam, R, head, tail)
        if x is None:
            continue
        if norm_prev(x) != (1 + lam) * norm_new(x):
            raise InvariantError("small-tail equality failed at a witness")
        used += 1
    checks["small_tail_witnesses"] = used

    cert = StepCertificate(k=k, lam=lam, R=R, K_prev=K, gamma=gamma,
                           slab_piece=piece, merged=merged, result=leveled,
                           checks=checks)
    return leveled, cert


@dataclass
class RenormTower:
    """Levels of equivalent norms produced by iterated surgery steps."""

    dim: int
    bodies: list[ConvexBody]
    norms: list[PolytopeNorm]
    lams: list[Fraction]
    gammas: list[Fraction]
    Ks: list[Fraction]
    certificates: list[StepCertificate]
    R: Fraction
    rescale_constant: Fraction | None = None
    scales: list[Fraction] | None = None
    scaled_norms: list[PolytopeNorm] | None = None

    @property
    def depth(self) -> int:
        return len(self.bodies) - 1

    def lam(self, i: int) -> Fraction:
        """Inflation used at level i (1-based); zero past the depth."""
        if i < 1:
            raise DomainError("levels are 1-based")
        if i > self.depth:
            return Fraction(0)
        return self.lams[i - 1]

    def gamma(self, i: int) -> Fraction:
        if i < 1:
            raise DomainError("levels are 1-based")
        if i > self.depth:
            return self.gammas[-1]
        return self.gammas[i - 1]

    def norm(self, n: int) -> PolytopeNorm:
        return self.norms[n]

    def scaled_norm(self, n: int) -> PolytopeNorm:
        if self.scaled_norms is None:
            raise DomainError("tower not rescaled yet")
        return self.scaled_norms[n]

    def envelope_norm(self, x) -> Fraction:
        """Largest scaled level norm at x (finite truncation of the sup)."""
        if self.scaled_norms is None:
            raise DomainError("tower not rescaled yet")
        return max(nrm(x) for nrm in self.scaled_norms)

    def head_step_ratio(self, n: int) -> Fraction:
        """Scaled-norm ratio across level n on small-tail vectors."""
        lam, gamma = self.lam(n), self.gamma(n)
        return (1 + lam * (1 + gamma) / 2) / (1 + lam)

    def tail_step_ratio(self, n: int) -> Fraction:
        """Scaled-norm ratio across level n on tail vectors."""
        lam, gamma = self.lam(n), self.gamma(n)
        return (1 + lam * (1 + gamma) / 2) / (1 + lam * gamma)


def build_tower(ball: ConvexBody, lam_seq: Sequence[Fraction],
                n_max: int | None = None, R: Fraction = Fraction(1, 2),
                sample_vectors: Sequence[RatVec] = (),
                witness_pairs: Sequence[tuple[RatVec, RatVec]] = ()
                ) -> RenormTower:
    """Iterate the surgery step with split index k = n at level n.

    Level n uses inflation lam_seq[n-1] and the fixed slab radius R; the
    per-level certificates carry the exact checks.
    """
    dim = ball.dim
    lam_seq = [Fraction(l) for l in lam_seq]
    if n_max is None:
        n_max = min(len(lam_seq), dim)
    if n_max > dim:
        raise ParameterError("tower depth cannot exceed the dimension")
    if len(lam_seq) < n_max:
        raise ParameterError("not enough inflation parameters")
    if any(l <= 0 for l in lam_seq[:n_max]):
        raise ParameterError("inflations must be positive")

    bodies = [ball]
    norms = [PolytopeNorm(ball)]
    gammas: list[Fraction] = []
    Ks: list[Fraction] = [basis_constant(norms[0])]
    certs: list[StepCertificate] = []
    for n in range(1, n_max + 1):
        new_ball, cert = renorm_step(
            bodies[-1], n, lam_seq[n - 1], R,
            sample_vectors=sample_vectors,
            witness_pairs=witness_pairs)
        bodies.append(new_ball)
        norms.append(PolytopeNorm(new_ball))
        gammas.append(cert.gamma)
        Ks.append(basis_constant(norms[-1]))
        certs.append(cert)
    return RenormTower(dim=dim, bodies=bodies, norms=norms,
                       lams=lam_seq[:n_max], gammas=gammas, Ks=Ks,
                       certificates=certs, R=Fraction(R))


def rescale_tower(tower: RenormTower) -> RenormTower:
    """Attach the rescaled level norms and their envelope.

    The inflation sequence is finitely supported inside the truncation, so
    the infinite products collapse to exact rational values.
    """
    c = Fraction(1)
    for i in range(1, tower.depth + 1):
        lam, gamma = tower.lam(i), tower.gamma(i)
        c *= (1 + lam * gamma) / (1 + lam * (1 + gamma) / 2)
    if not 0 < c <= 1:
        raise InvariantError("rescale constant escaped (0, 1]")
    scales = []
    running = c
    for n in range(tower.depth + 1):
        if n >= 1:
            lam, gamma = tower.lam(n), tower.gamma(n)
            running *= 1 + lam * (1 + gamma) / 2
        scales.append(running)
    tower.rescale_constant = c
    tower.scales = scales
    tower.scaled_norms = [tower.norms[n].rescaled(scales[n])
                          for n in range(tower.depth + 1)]
    return tower


def uniform_tail_threshold(tower: RenormTower) -> Fraction:
    """(1/2) * prod (1 + lam_i)^(-1); the level-free small-tail cutoff."""
    p = Fraction(1)
    for lam in tower.lams:
        p *= 1 + lam
    return Fraction(1, 2) / p


def active_index(tower: RenormTower, x: Sequence) -> int:
    """Smallest level past which x behaves like a pure head vector.

    Beyond the returned level the scaled norms shrink by the exact factor
    head_step_ratio(n); this is asserted for every stored level.
    """
    x = vec(x)
    if is_zero(x):
        raise DomainError("active index undefined at the origin")
    if tower.scaled_norms is None:
        raise DomainError("tower not rescaled yet")
    norm0 = tower.norms[0]
    c = uniform_tail_threshold(tower)
    base = c * norm0(x)
    n0 = 1
    for n in range(1, tower.depth + 1):
        t = tail_part(x, n)
        if norm0(t) > base:
            n0 = n + 1
    for n in range(n0, tower.depth + 1):
        if tower.norms[n - 1](x) != (1 + tower.lam(n)) * tower.norms[n](x):
            raise InvariantError("head-step equality failed past the cutoff")
        lhs = tower.scaled_norm(n)(x)
        rhs = tower.head_step_ratio(n) * tower.scaled_norm(n - 1)(x)
        if lhs != rhs:
            raise InvariantError("scaled head-step ratio failed")
    return n0
