"""Run configuration, pipeline assembly, and the verification suite.

The suite exercises every certified identity the library claims: the
surgery-step bounds and identities, the level equations of the tower, the
planned parameter constraints, the smoothing sandwich and the final-norm
chain, the gradient and second-order smoothness proxies, the oracle
algebra, and the exact polyhedral mode.  Reports are line-delimited JSON
plus a human summary, byte-identical for a fixed config and seed.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .body import (
    ConvexBody,
    body_from_doc,
    body_to_doc,
    ell1_ball,
    ellinf_ball,
    embed_tail,
    section,
)
from .errors import DomainError, ParameterError, RenormError
from .glue import GlueFamily
from .norms import PolytopeNorm
from .oracle import (
    ell2_oracle,
    infconv_gauge,
    max_gauge,
    numeric_tower,
    oracle_from_norm,
    restrict_oracle,
    scale_oracle,
    slab_oracle,
)
from .planner import (
    ParameterPlan,
    coupling_ratio,
    plan_inflations,
    plan_ramp_margins,
    shrink_ratio,
)
from .polyhedral import PolyhedralFamily
from .rationals import RatVec, is_zero, rat, rat_str, tail_part, vec
from .sampling import random_rational_vectors, sample_tail_vectors
from .tower import (
    RenormTower,
    active_index,
    build_tower,
    rescale_tower,
    small_tail_witness,
    uniform_tail_threshold,
)

DEFAULT_SAMPLES = {
    "vertex_checks": 200,
    "tail": 200,
    "pairs": 400,
    "rays": 40,
    "gradient": 60,
    "bracket": 200,
    "oracle_points": 60,
    "witnesses": 40,
}

DEFAULT_TOLERANCES = {
    "rel_gauge": 1e-10,
    "sandwich": 1e-12,
    "gradient_fd": 1e-6,
    "euler": 1e-9,
    "convexity": 1e-12,
    "oracle_agree": 1e-8,
    "oracle_tower": 1e-7,
    "hessian_sym": 1e-4,
}


@dataclass
class RunConfig:
    """Everything a run needs; serializes to a JSON document."""

    dimension: int = 2
    seed_norm: str | dict = "ellinf"
    oracle_seed: str = "ell2"
    eps: tuple[Fraction, ...] = (Fraction(1, 4), Fraction(1, 8),
                                 Fraction(1, 16))
    mode: str = "smooth"
    samples: dict = field(default_factory=lambda: dict(DEFAULT_SAMPLES))
    seed: int = 20240
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    out_dir: str = "out"
    checks: tuple[str, ...] | None = None
    poly_levels: int | None = None

    def __post_init__(self):
        if self.dimension < 2:
            raise ParameterError("dimension must be at least 2")
        self.eps = tuple(rat(e) for e in self.eps)
        if len(self.eps) < self.dimension + 1:
            raise ParameterError(
                "need a target for every level: len(eps) >= dimension + 1")
        if any(e <= 0 for e in self.eps):
            raise ParameterError("targets must be positive")
        if any(b > a for a, b in zip(self.eps, self.eps[1:])):
            raise ParameterError("targets must be nonincreasing")
        if self.mode not in ("smooth", "polyhedral", "oracle"):
            raise ParameterError(f"unknown mode {self.mode!r}")
        merged = dict(DEFAULT_SAMPLES)
        merged.update(self.samples)
        self.samples = merged
        tols = dict(DEFAULT_TOLERANCES)
        tols.update(self.tolerances)
        self.tolerances = tols

    def to_doc(self) -> dict:
        return {
            "dimension": self.dimension,
            "seed_norm": self.seed_norm,
            "oracle_seed": self.oracle_seed,
            "eps": [rat_str(e) for e in self.eps],
            "mode": self.mode,
            "samples": self.samples,
            "seed": self.seed,
            "tolerances": self.tolerances,
            "out_dir": self.out_dir,
            "checks": list(self.checks) if self.checks else None,
            "poly_levels": self.poly_levels,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "RunConfig":
        kwargs = {}
        for key in ("dimension", "seed_norm", "oracle_seed", "mode", "seed",
                    "out_dir", "poly_levels"):
            if key in doc and doc[key] is not None:
                kwargs[key] = doc[key]
        if "eps" in doc:
            kwargs["eps"] = tuple(rat(e) for e in doc["eps"])
        for key in ("samples", "tolerances"):
            if key in doc and doc[key]:
                kwargs[key] = dict(doc[key])
        if doc.get("checks"):
            kwargs["checks"] = tuple(doc["checks"])
        return cls(**kwargs)


def make_seed_body(config: RunConfig) -> ConvexBody:
    if isinstance(config.seed_norm, dict):
        return body_from_doc(config.seed_norm["custom"],
                             max_dim=max(config.dimension, 6))
    if config.seed_norm == "ellinf":
        return ellinf_ball(config.dimension)
    if config.seed_norm == "ell1":
        return ell1_ball(config.dimension)
    raise ParameterError(f"unknown seed norm {config.seed_norm!r}")


@dataclass
class Pipeline:
    config: RunConfig
    seed_body: ConvexBody
    plan: ParameterPlan
    tower: RenormTower
    family: GlueFamily | None = None
    poly_family: PolyhedralFamily | None = None


def build_pipeline(config: RunConfig, with_family: bool = True) -> Pipeline:
    """Plan the parameters, build and rescale the tower, glue the family."""
    seed_body = make_seed_body(config)
    dim = config.dimension
    plan = plan_inflations(config.eps[:dim + 1])
    samples = random_rational_vectors(
        dim, config.samples["vertex_checks"] // 4 + 8, config.seed)
    rng = np.random.default_rng(config.seed + 1)
    pairs = _witness_pairs(dim, config.samples["witnesses"], rng)
    tower = build_tower(seed_body, plan.lam, n_max=dim,
                        sample_vectors=samples, witness_pairs=pairs)
    tower = rescale_tower(tower)
    plan = plan_ramp_margins(plan, tower.gammas)
    family = None
    poly = None
    if with_family:
        if config.mode == "polyhedral":
            poly = PolyhedralFamily(tower, plan, n_levels=config.poly_levels)
        else:
            family = GlueFamily(tower, plan)
    return Pipeline(config=config, seed_body=seed_body, plan=plan,
                    tower=tower, family=family, poly_family=poly)


def _witness_pairs(dim: int, count: int, rng: np.random.Generator
                   ) -> list[tuple[RatVec, RatVec]]:
    pairs = []
    for _ in range(count):
        h = tuple(Fraction(int(c), 32)
                  for c in rng.integers(-32, 33, size=dim))
        t = tuple(Fraction(int(c), 32)
                  for c in rng.integers(-32, 33, size=dim))
        pairs.append((h, t))
    return pairs


# ---------------------------------------------------------------------------
# the verification suite


@dataclass
class CheckRecord:
    check: str
    claim: str
    status: str
    margin: str
    witness: str | None = None


@dataclass
class VerificationReport:
    config_doc: dict
    plan_doc: dict
    records: list[CheckRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.status == "pass" for r in self.records)

    def to_jsonl(self) -> str:
        lines = [json.dumps({"type": "run", "config": self.config_doc,
                             "plan": self.plan_doc}, sort_keys=True)]
        for r in self.records:
            lines.append(json.dumps(
                {"type": "check", "check": r.check, "claim": r.claim,
                 "status": r.status, "margin": r.margin,
                 "witness": r.witness}, sort_keys=True))
        counts = {"pass": sum(r.status == "pass" for r in self.records),
                  "fail": sum(r.status == "fail" for r in self.records)}
        lines.append(json.dumps({"type": "summary", **counts},
                                sort_keys=True))
        return "\n".join(lines) + "\n"

    def human_summary(self) -> str:
        lines = []
        for r in self.records:
            mark = "ok  " if r.status == "pass" else "FAIL"
            lines.append(f"[{mark}] {r.check:<28} margin={r.margin}")
        npass = sum(r.status == "pass" for r in self.records)
        lines.append(f"{npass}/{len(self.records)} checks passed")
        return "\n".join(lines) + "\n"


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return rat_str(x)
    return repr(float(x))


class _Suite:
    """Collects check callables and runs them in a fixed order."""

    def __init__(self, pipeline: Pipeline):
        self.p = pipeline
        self.checks: list[tuple[str, str, Callable[[], tuple[bool, str]]]] = []

    def add(self, check_id: str, claim: str,
            fn: Callable[[], tuple[bool, str]]):
        self.checks.append((check_id, claim, fn))

    def run(self, enabled: tuple[str, ...] | None) -> list[CheckRecord]:
        records = []
        for check_id, claim, fn in self.checks:
            if enabled is not None and check_id not in enabled:
                continue
            try:
                ok, margin = fn()
                records.append(CheckRecord(check_id, claim,
                                           "pass" if ok else "fail", margin))
            except RenormError as exc:
                records.append(CheckRecord(check_id, claim, "fail",
                                           "error", witness=str(exc)))
        return records


def run_verification(config: RunConfig) -> VerificationReport:
    pipeline = build_pipeline(config, with_family=True)
    if pipeline.family is None:
        # polyhedral configs still verify the smooth group on the side
        pipeline.family = GlueFamily(pipeline.tower, pipeline.plan)
    if pipeline.poly_family is None:
        levels = config.poly_levels
        if levels is None:
            levels = min(pipeline.tower.depth, 2)
        pipeline.poly_family = PolyhedralFamily(pipeline.tower, pipeline.plan,
                                                n_levels=levels)
    suite = _Suite(pipeline)
    register_all_checks(suite)
    records = suite.run(config.checks)
    return VerificationReport(config_doc=config.to_doc(),
                              plan_doc=pipeline.plan.to_doc(),
                              records=records)


def register_all_checks(suite: _Suite):
    p = suite.p
    cfg = p.config
    tol = cfg.tolerances
    ns = cfg.samples
    dim = cfg.dimension
    plan, tower, family = p.plan, p.tower, p.family

    # ---- planner group ----
    def plan_products():
        worst = None
        for N in range(len(plan.eps)):
            slack = (1 + plan.eps[N]) - plan.tail_product(N)
            worst = slack if worst is None else min(worst, slack)
            if slack <= 0:
                return False, rat_str(slack)
        return True, rat_str(worst)

    suite.add("plan.tail_products",
              "remaining distortion budget stays below every target",
              plan_products)

    def plan_headroom():
        worst = None
        for N in range(len(plan.delta)):
            if N >= len(plan.eps):
                break
            lhs = (1 + plan.delta[N]) * plan.tail_product(N)
            rhs = (1 - plan.delta[N]) * (1 + plan.eps[N])
            slack = rhs - lhs
            worst = slack if worst is None else min(worst, slack)
            if slack < 0:
                return False, rat_str(slack)
        return True, rat_str(worst)

    suite.add("plan.headroom",
              "margin-inflated tail products keep the distortion headroom",
              plan_headroom)

    def plan_coupling():
        worst = None
        for n in range(tower.depth):
            r = coupling_ratio(tower.lam(n + 1), tower.gamma(n + 1))
            s = shrink_ratio(tower.lam(n + 1), tower.gamma(n + 1))
            for ratio in (r, s):
                slack = (1 - plan.delta[n]) - (1 + plan.delta[n]) * ratio
                worst = slack if worst is None else min(worst, slack)
                if slack < 0:
                    return False, rat_str(slack)
        return True, rat_str(worst if worst is not None else Fraction(0))

    suite.add("plan.coupling",
              "ramp margins couple to both per-level decay ratios",
              plan_coupling)

    # ---- body group ----
    def body_roundtrip():
        for body in (p.seed_body, tower.bodies[min(1, tower.depth)]):
            again = ConvexBody(body.dim, vrep=body.vrep, validate=False)
            if sorted(again.hrep) != sorted(body.hrep):
                return False, "0"
            from_h = ConvexBody(body.dim, hrep=body.hrep, validate=False)
            if sorted(from_h.vrep) != sorted(body.vrep):
                return False, "0"
            if body != again:
                return False, "0"
        return True, "exact"

    suite.add("body.roundtrip",
              "facet and vertex enumerations invert each other",
              body_roundtrip)

    def gauge_routes():
        pts = random_rational_vectors(dim, 24, cfg.seed + 2)
        for body in (p.seed_body, tower.bodies[-1]):
            for x in pts:
                if body.gauge(x) != body.gauge_lp(x):
                    return False, "0"
        return True, "exact"

    suite.add("body.gauge_routes",
              "facet-maximum and vertex-LP gauges agree exactly",
              gauge_routes)

    # ---- tower group ----
    def lemma_bound():
        worst = None
        for n, cert in enumerate(tower.certificates, start=1):
            K, lam, R = cert.K_prev, cert.lam, cert.R
            bound = 1 + lam * K / (K + 1 - R)
            sec = section(cert.merged, cert.k)
            if sec is None:
                continue
            prev = tower.norms[n - 1]
            for v in sec.vrep:
                g = prev(embed_tail(v, cert.k, dim))
                slack = bound - g
                worst = slack if worst is None else min(worst, slack)
                if slack < 0:
                    return False, rat_str(slack)
        return True, rat_str(worst if worst is not None else Fraction(0))

    suite.add("tower.lemma_bound",
              "merged-hull tail sections obey the exact leakage bound",
              lemma_bound)

    def corollary_identities():
        for n, cert in enumerate(tower.certificates, start=1):
            ball = tower.bodies[n - 1]
            lvl = tower.bodies[n]
            for v in ball.vrep:
                if lvl.gauge(v) > 1:
                    return False, "0"
            for v in lvl.vrep:
                if ball.gauge(v) > 1 + cert.lam:
                    return False, "0"
            sec_new = section(lvl, cert.k)
            sec_old = section(ball, cert.k)
            if sec_new is not None:
                scaled = [tuple((1 + cert.lam * cert.gamma) * c for c in w)
                          for w in sec_old.vrep]
                ref = ConvexBody(sec_old.dim, vrep=scaled, validate=False)
                if sec_new != ref:
                    return False, "0"
        return True, "exact"

    suite.add("tower.corollary",
              "two-sided inclusion and exact tail-section identity per level",
              corollary_identities)

    def eq1_monotone():
        pts = random_rational_vectors(dim, ns["tail"], cfg.seed + 3)
        for n in range(1, tower.depth + 1):
            lam = tower.lam(n)
            for x in pts:
                a, b = tower.norms[n](x), tower.norms[n - 1](x)
                if not a <= b <= (1 + lam) * a:
                    return False, "0"
            for v in tower.bodies[n].vrep:
                a, b = tower.norms[n](v), tower.norms[n - 1](v)
                if not a <= b <= (1 + lam) * a:
                    return False, "0"
        return True, "exact"

    suite.add("tower.monotone_levels",
              "levels decrease and stay within the inflation factor",
              eq1_monotone)

    def eq2_tail():
        for n in range(1, tower.depth + 1):
            lam, gamma = tower.lam(n), tower.gamma(n)
            pts = random_rational_vectors(dim, ns["tail"] // 2,
                                          cfg.seed + 4 + n, tail_from=n)
            sec = section(tower.bodies[n], n)
            if sec is not None:
                pts += [embed_tail(v, n, dim) for v in sec.vrep]
            for x in pts:
                if is_zero(x):
                    continue
                if tower.norms[n - 1](x) != \
                        (1 + lam * gamma) * tower.norms[n](x):
                    return False, "0"
        return True, "exact"

    suite.add("tower.tail_equality",
              "exact tail-vector equality with the leaked inflation factor",
              eq2_tail)

    def eq3_head():
        rng = np.random.default_rng(cfg.seed + 5)
        count = 0
        for n in range(1, tower.depth + 1):
            prev = tower.norms[n - 1]
            for h, t in _witness_pairs(dim, ns["witnesses"], rng):
                x = small_tail_witness(prev, n, tower.lam(n), tower.R, h, t)
                if x is None:
                    continue
                if prev(x) != (1 + tower.lam(n)) * tower.norms[n](x):
                    return False, "0"
                count += 1
        return count > 0, f"witnesses={count}"

    suite.add("tower.head_equality",
              "exact small-tail equality with the full inflation factor",
              eq3_head)

    def eq4_uniform():
        rng = np.random.default_rng(cfg.seed + 6)
        c = uniform_tail_threshold(tower)
        norm0 = tower.norms[0]
        count = 0
        for n in range(1, tower.depth + 1):
            for h, t in _witness_pairs(dim, ns["witnesses"] // 2, rng):
                x = _uniform_witness(norm0, n, c, h, t)
                if x is None:
                    continue
                # exact chain from the uniform hypothesis to the level one
                prev = tower.norms[n - 1]
                tail = tail_part(vec(x), n)
                lhs = prev(tail)
                if not lhs <= norm0(tail):
                    return False, "0"
                if not norm0(tail) <= c * norm0(x):
                    return False, "0"
                prod_head = Fraction(1)
                for i in range(1, n):
                    prod_head *= 1 + tower.lam(i)
                if not norm0(x) <= prod_head * prev(x):
                    return False, "0"
                bound = Fraction(1, 2) / (1 + tower.lam(n))
                if not lhs <= bound * prev(x):
                    return False, "0"
                if prev(x) != (1 + tower.lam(n)) * tower.norms[n](x):
                    return False, "0"
                count += 1
        return count > 0, f"witnesses={count}"

    suite.add("tower.uniform_condition",
              "level-free small-tail hypothesis implies the level equality",
              eq4_uniform)

    def fact_head_ratio():
        pts = random_rational_vectors(dim, ns["tail"], cfg.seed + 7)
        for x in pts:
            active_index(tower, x)  # raises on any broken ratio
        return True, f"points={len(pts)}"

    suite.add("fact.head_ratio",
              "scaled norms shrink by the exact head-step ratio past the "
              "active index", fact_head_ratio)

    def fact_tail_ratio():
        for N in range(1, tower.depth + 1):
            pts = random_rational_vectors(dim, ns["tail"] // 2,
                                          cfg.seed + 8 + N, tail_from=N)
            for x in pts:
                if is_zero(x):
                    continue
                for n in range(1, N + 1):
                    lhs = tower.scaled_norm(n)(x)
                    rhs = tower.tail_step_ratio(n) * \
                        tower.scaled_norm(n - 1)(x)
                    if lhs != rhs:
                        return False, "0"
        return True, "exact"

    suite.add("fact.tail_ratio",
              "scaled norms grow by the exact tail-step ratio on tails",
              fact_tail_ratio)

    # ---- glue group ----
    def glue_sandwich():
        rng = np.random.default_rng(cfg.seed + 9)
        worst = 0.0
        for lvl in family.levels:
            xs = rng.standard_normal((ns["pairs"], dim))
            for x in xs:
                g = family.level_gauge(lvl.index, x)
                s = lvl.smoothed.value(x)
                hi = (1 + float(lvl.delta)) * g
                if not (g - tol["sandwich"] * g <= s <= hi + tol["sandwich"] * g):
                    return False, repr((s - g) / g)
                worst = max(worst, max(0.0, (g - s) / g))
        return True, repr(worst)

    suite.add("glue.sandwich",
              "smoothed level norms squeeze between the norm and its margin "
              "inflation", glue_sandwich)

    def glue_inclusions():
        for N in range(dim):
            xs = sample_tail_vectors(dim, N, ns["rays"], cfg.seed + 10 + N)
            dN = float(plan.delta[N])
            for x in xs:
                env = family.envelope(x)
                inner = x * ((1 - dN) / (1 + dN) / env) * (1 - 1e-12)
                val, _ = family.glue_sum(inner)
                if val != 0.0:
                    return False, repr(val)
                rho, _ = family.final_gauge(x)
                if family.envelope(x / rho) > 1 + 1e-9:
                    return False, repr(family.envelope(x / rho) - 1)
        return True, "ok"

    suite.add("glue.inclusions",
              "glued sublevel set nests between the scaled envelope balls",
              glue_inclusions)

    def glue_star_chain():
        worst = 0.0
        for N in range(dim):
            xs = sample_tail_vectors(dim, N, ns["rays"], cfg.seed + 20 + N)
            qN = (1 + float(plan.delta[N])) / (1 - float(plan.delta[N]))
            piN = float(plan.tail_product(N))
            for x in xs:
                env = family.envelope(x)
                rho, _ = family.final_gauge(x)
                nN = family.level_gauge(N, x)
                n0 = family.original_norm(x)
                chains = (
                    (env, rho, qN * env),
                    (nN, env, piN * nN),
                    (nN, n0, piN * nN),
                )
                for lo, mid, hi in chains:
                    fuzz = 1e-10 * (abs(hi) + abs(mid))
                    if not (lo - fuzz <= mid <= hi + fuzz):
                        return False, repr((lo, mid, hi))
                    worst = max(worst, (mid - hi) / (abs(hi) + 1e-30))
        return True, repr(worst)

    suite.add("glue.star_chain",
              "the three tail-space comparison chains hold within float "
              "tolerance", glue_star_chain)

    def glue_ray_monotone():
        rng = np.random.default_rng(cfg.seed + 11)
        for _ in range(ns["rays"]):
            x = rng.standard_normal(dim)
            env = family.envelope(x)
            ts = np.linspace(0.5 / env, 1.6 / env, 40)
            vals = [family.glue_sum(t * x)[0] for t in ts]
            for a, b in zip(vals, vals[1:]):
                if b < a - 1e-12:
                    return False, repr(a - b)
                if a > 0 and not b > a - 1e-15:
                    return False, repr((a, b))
        return True, "ok"

    suite.add("glue.ray_monotone",
              "the glued sum is nondecreasing and strictly increasing where "
              "positive along rays", glue_ray_monotone)

    def glue_convexity():
        rng = np.random.default_rng(cfg.seed + 12)
        worst = 0.0
        for _ in range(ns["pairs"]):
            x = rng.standard_normal(dim)
            y = rng.standard_normal(dim)
            fx = family.final_gauge_value(x)
            fy = family.final_gauge_value(y)
            fm = family.final_gauge_value(0.5 * (x + y))
            viol = fm - 0.5 * (fx + fy)
            worst = max(worst, viol / max(fx + fy, 1e-30))
            if viol > tol["convexity"] * (fx + fy):
                return False, repr(viol)
        return True, repr(worst)

    suite.add("glue.convexity",
              "midpoint convexity of the final norm on random pairs",
              glue_convexity)

    def glue_bracket():
        rng = np.random.default_rng(cfg.seed + 13)
        worst_res = 0.0
        for _ in range(ns["bracket"]):
            x = rng.standard_normal(dim)
            rho, diag = family.final_gauge(x)
            lo, hi = diag.bracket
            if not lo * (1 - 1e-12) <= rho <= hi * (1 + 1e-12):
                return False, repr((lo, rho, hi))
            if diag.bisect_iterations + diag.newton_iterations > 200:
                return False, "iterations"
            worst_res = max(worst_res, abs(diag.residual))
        return True, repr(worst_res)

    suite.add("glue.bracket",
              "the implicit root always lies in the certified bracket and "
              "converges", glue_bracket)

    def glue_gradient():
        rng = np.random.default_rng(cfg.seed + 14)
        worst = 0.0
        worst_euler = 0.0
        h = 1e-5
        for _ in range(ns["gradient"]):
            x = rng.standard_normal(dim)
            g = family.final_gradient(x)
            rho = family.final_gauge_value(x)
            worst_euler = max(worst_euler,
                              abs(float(g @ x) - rho) / rho)
            fd = np.zeros(dim)
            for i in range(dim):
                e = np.zeros(dim)
                e[i] = h
                fd[i] = (family.final_gauge_value(x + e)
                         - family.final_gauge_value(x - e)) / (2 * h)
            rel = float(np.linalg.norm(fd - g) / np.linalg.norm(g))
            worst = max(worst, rel)
            if rel > tol["gradient_fd"]:
                return False, repr(rel)
            if worst_euler > tol["euler"]:
                return False, repr(worst_euler)
        return True, repr(worst)

    suite.add("glue.gradient",
              "implicit gradient matches central differences and the degree-"
              "one identity", glue_gradient)

    def glue_hessian():
        rng = np.random.default_rng(cfg.seed + 15)
        h = 1e-4
        worst = 0.0
        for _ in range(8):
            x = rng.standard_normal(dim)
            x /= np.linalg.norm(x)
            H = np.zeros((dim, dim))
            for i in range(dim):
                e = np.zeros(dim)
                e[i] = h
                H[:, i] = (family.final_gradient(x + e)
                           - family.final_gradient(x - e)) / (2 * h)
            scale = float(np.max(np.abs(H))) + 1e-30
            asym = float(np.max(np.abs(H - H.T))) / scale
            worst = max(worst, asym)
            if asym > tol["hessian_sym"]:
                return False, repr(asym)
        # gradient continuity along an arc crossing former ridges
        thetas = np.linspace(0.0, math.pi / 2, 400)
        grads = [family.final_gradient(
            np.concatenate(([math.cos(t), math.sin(t)], np.zeros(dim - 2))))
            for t in thetas]
        jumps = [float(np.linalg.norm(a - b))
                 for a, b in zip(grads, grads[1:])]
        gmax = max(float(np.linalg.norm(g)) for g in grads)
        if max(jumps) > 0.25 * gmax:
            return False, repr(max(jumps))
        return True, repr(worst)

    suite.add("glue.hessian",
              "finite-difference curvature is symmetric and the gradient "
              "varies continuously across former ridges", glue_hessian)

    def theorem_bound():
        worst = math.inf
        for N in range(dim):
            epsN = float(plan.eps[N])
            xs = sample_tail_vectors(dim, N, ns["tail"], cfg.seed + 16 + N)
            for x in xs:
                rho = family.final_gauge_value(x)
                base = family.original_norm(x)
                margin = epsN * base - abs(rho - base)
                worst = min(worst, margin / base)
                if margin < -tol["rel_gauge"] * base:
                    return False, repr(margin / base)
        return True, repr(worst)

    suite.add("theorem.tail_bound",
              "the glued norm approximates the seed norm within the per-"
              "tail targets", theorem_bound)

    # ---- oracle group ----
    def oracle_checks():
        fix = _fixture_step_bodies()
        seed_norm = PolytopeNorm(fix["ball"])
        base = oracle_from_norm(seed_norm, name="seed")
        lam = 1.0
        slab = slab_oracle(base, 1, 0.5)
        piece = max_gauge(slab, scale_oracle(base, 1 + lam))
        exact_piece = fix["piece"]
        rng = np.random.default_rng(cfg.seed + 17)
        worst = 0.0
        for _ in range(ns["oracle_points"]):
            x = rng.standard_normal(2)
            ref = float(exact_piece.gauge(
                tuple(Fraction(v).limit_denominator(10**6) for v in x)))
            got = piece(np.array([float(Fraction(v).limit_denominator(10**6))
                                  for v in x]))
            rel = abs(got - ref) / max(ref, 1e-30)
            worst = max(worst, rel)
            if rel > 1e-10:
                return False, repr(rel)
        # hull gauges with certified gaps
        exact_merged = fix["merged"]
        for _ in range(ns["oracle_points"]):
            x = rng.standard_normal(2)
            xq = tuple(Fraction(v).limit_denominator(10**6) for v in x)
            ref = float(exact_merged.gauge(xq))
            res = infconv_gauge(piece, base,
                                np.array([float(q) for q in xq]),
                                tol=tol["oracle_agree"] * max(ref, 1e-6))
            err = abs(res.value - ref)
            if err > tol["oracle_agree"] * max(ref, 1.0):
                return False, repr(err)
            if err > res.gap + 1e-12:
                return False, f"gap {res.gap!r} below error {err!r}"
            worst = max(worst, err / max(ref, 1e-30))
        return True, repr(worst)

    suite.add("oracle.algebra",
              "max and hull gauges agree with the exact bodies and the gap "
              "dominates the error", oracle_checks)

    def oracle_tower_check():
        fix = _fixture_step_bodies()
        seed_norm = PolytopeNorm(fix["ball"])
        base = oracle_from_norm(seed_norm, name="seed")
        levels = numeric_tower(base, [1.0], 1, K_values=[1.0])
        exact_b1 = fix["leveled"]
        rng = np.random.default_rng(cfg.seed + 18)
        worst = 0.0
        for _ in range(max(8, ns["oracle_points"] // 4)):
            x = rng.standard_normal(2)
            ref = float(exact_b1.gauge(
                tuple(Fraction(v).limit_denominator(10**4) for v in x)))
            got = levels[1].norm(np.array(
                [float(Fraction(v).limit_denominator(10**4)) for v in x]))
            rel = abs(got - ref) / max(ref, 1e-30)
            worst = max(worst, rel)
            if rel > tol["oracle_tower"]:
                return False, repr(rel)
        # euclidean seed: exact tail ratio with unit projection constant
        e2 = ell2_oracle(2)
        lev2 = numeric_tower(e2, [1.0], 1, K_values=[1.0])
        x = np.array([0.0, 1.0])
        ratio = e2(x) / lev2[1].norm(x)
        target = 1 + 1.0 * (1.0 / 1.5)
        if abs(ratio - target) > 1e-6 * target:
            return False, repr(ratio - target)
        return True, repr(worst)

    suite.add("oracle.tower",
              "oracle-built levels match the exact ones and the euclidean "
              "tail ratio is exact", oracle_tower_check)

    # ---- polyhedral group ----
    def poly_final():
        poly = suite.p.poly_family
        body = poly.final_polytope()
        nverts = len(body.vrep)
        if nverts < 1:
            return False, "0"
        return True, f"vertices={nverts}"

    suite.add("poly.final_polytope",
              "the hinge-glued sublevel set is a finite exact polytope",
              poly_final)

    def poly_tail():
        poly = suite.p.poly_family
        worst = None
        for N in range(min(len(poly.levels), poly.dim)):
            slack = poly.tail_bound_certificate(N)
            worst = slack if worst is None else min(worst, slack)
        return True, rat_str(worst if worst is not None else Fraction(0))

    suite.add("poly.tail_bound",
              "exact distortion targets on every tail-section vertex of the "
              "polyhedral norm", poly_tail)


def _uniform_witness(norm0, k: int, c: Fraction, head, tail) -> RatVec | None:
    """Head + tail with the level-free tail threshold satisfied exactly."""
    h = vec(head)
    h = tuple(a if i < k else Fraction(0) for i, a in enumerate(h))
    t = vec(tail)
    t = tuple(Fraction(0) if i < k else a for i, a in enumerate(t))
    if is_zero(h):
        return None
    nh = norm0(h)
    h = tuple(a / nh for a in h)
    if is_zero(t):
        return h
    s = c / (2 * (1 + c))
    nt = norm0(t)
    t = tuple(s * a / nt for a in t)
    x = tuple(a + b for a, b in zip(h, t))
    if norm0(t) <= c * norm0(x):
        return x
    return None


_FIXTURE_CACHE: dict = {}


def _fixture_step_bodies() -> dict:
    """The plane fixture: cube seed, one surgery step with unit inflation."""
    if not _FIXTURE_CACHE:
        from .tower import build_slab_piece, merge_with_ball, renorm_step
        ball = ellinf_ball(2)
        piece = build_slab_piece(ball, 1, Fraction(1, 2), Fraction(1))
        merged = merge_with_ball(piece, ball, k=1, lam=Fraction(1),
                                 R=Fraction(1, 2))
        leveled, cert = renorm_step(ball, 1, Fraction(1), Fraction(1, 2))
        _FIXTURE_CACHE.update(ball=ball, piece=piece, merged=merged,
                              leveled=leveled, certificate=cert)
    return _FIXTURE_CACHE


def write_report(report: VerificationReport, jsonl_path, summary_path=None):
    data = report.to_jsonl()
    with open(jsonl_path, "w") as fh:
        fh.write(data)
    if summary_path is not None:
        with open(summary_path, "w") as fh:
            fh.write(report.human_summary())


def timed(fn, *args, **kwargs):
    t0 = time.monotonic()
    out = fn(*args, **kwargs)
    return out, time.monotonic() - t0
