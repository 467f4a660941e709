"""Command-line front end: plan | build | verify | eval | slice.

Exit codes: 0 on success, 1 on verification failure, 2 on configuration
errors.  The RENORM_WORKSPACE environment variable rebases all output
paths.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .body import body_to_doc, section
from .errors import RenormError
from .harness import (
    RunConfig,
    build_pipeline,
    run_verification,
    write_report,
)
from .rationals import rat_str


def _load_config(args) -> RunConfig:
    if args.config:
        with open(args.config) as fh:
            doc = json.load(fh)
        config = RunConfig.from_doc(doc)
    else:
        config = RunConfig()
    if args.seed is not None:
        config.seed = args.seed
    if args.mode is not None:
        config.mode = args.mode
    return config


def _out_dir(config: RunConfig, args) -> Path:
    base = os.environ.get("RENORM_WORKSPACE", ".")
    out = Path(args.out) if args.out else Path(config.out_dir)
    if not out.is_absolute():
        out = Path(base) / out
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_plan(args) -> int:
    config = _load_config(args)
    pipeline = build_pipeline(config, with_family=False)
    plan = pipeline.plan
    out = _out_dir(config, args)
    path = out / "plan.json"
    with open(path, "w") as fh:
        json.dump(plan.to_doc(), fh, indent=1, sort_keys=True)
        fh.write("\n")
    print(f"plan written to {path}")
    return 0


def cmd_build(args) -> int:
    config = _load_config(args)
    pipeline = build_pipeline(config, with_family=True)
    out = _out_dir(config, args)
    doc = {
        "plan": pipeline.plan.to_doc(),
        "levels": [body_to_doc(b) for b in pipeline.tower.bodies],
        "constants": {
            "lam": [rat_str(v) for v in pipeline.tower.lams],
            "gamma": [rat_str(v) for v in pipeline.tower.gammas],
            "basis_constants": [rat_str(v) for v in pipeline.tower.Ks],
            "rescale": rat_str(pipeline.tower.rescale_constant),
            "level_scales": [rat_str(v) for v in pipeline.tower.scales],
        },
    }
    if pipeline.poly_family is not None:
        doc["final_polytope"] = body_to_doc(
            pipeline.poly_family.final_polytope())
    path = out / "tower.json"
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")
    print(f"tower written to {path}")
    return 0


def cmd_verify(args) -> int:
    config = _load_config(args)
    report = run_verification(config)
    out = _out_dir(config, args)
    write_report(report, out / "report.jsonl", out / "report.txt")
    sys.stdout.write(report.human_summary())
    return 0 if report.passed else 1


def _parse_vectors(spec: str, dim: int) -> list[np.ndarray]:
    if spec.startswith("@"):
        with open(spec[1:]) as fh:
            rows = json.load(fh)
        return [np.asarray([float(Fraction(str(c))) for c in row])
                for row in rows]
    out = []
    for chunk in spec.split(";"):
        row = [float(Fraction(c.strip())) for c in chunk.split(",")]
        if len(row) != dim:
            raise RenormError(f"vector of length {len(row)}, need {dim}")
        out.append(np.asarray(row))
    return out


def cmd_eval(args) -> int:
    config = _load_config(args)
    pipeline = build_pipeline(config, with_family=True)
    vectors = _parse_vectors(args.vectors, config.dimension)
    rows = ["index,value,gradient,note"]
    for i, x in enumerate(vectors):
        if not np.any(x):
            rows.append(f"{i},0.0,,undefined-gradient")
            continue
        if pipeline.family is not None:
            rho, _ = pipeline.family.final_gauge(x)
            grad = pipeline.family.final_gradient(x)
            gtxt = " ".join(repr(float(g)) for g in grad)
            rows.append(f"{i},{rho!r},{gtxt},")
        else:
            g = pipeline.poly_family.final_gauge_exact(
                [Fraction(v).limit_denominator(10**9) for v in x])
            rows.append(f"{i},{rat_str(g)},,polyhedral-exact")
    text = "\n".join(rows) + "\n"
    if args.out:
        out = _out_dir(config, args)
        with open(out / "eval.csv", "w") as fh:
            fh.write(text)
        print(f"table written to {out / 'eval.csv'}")
    else:
        sys.stdout.write(text)
    return 0


def _slice_target(pipeline, name: str):
    tower = pipeline.tower
    if name == "seed":
        return ("body", tower.bodies[0])
    if name.startswith("level:"):
        return ("body", tower.bodies[int(name.split(":", 1)[1])])
    if name == "final":
        if pipeline.poly_family is not None:
            return ("body", pipeline.poly_family.final_polytope())
        return ("smooth", pipeline.family)
    if name == "envelope":
        return ("envelope", pipeline.family)
    raise RenormError(f"unknown slice target {name!r}")


def cmd_slice(args) -> int:
    config = _load_config(args)
    pipeline = build_pipeline(config, with_family=True)
    dim = config.dimension
    i, j = (int(t) - 1 for t in args.plane.split(","))
    if not (0 <= i < dim and 0 <= j < dim and i != j):
        raise RenormError("plane indices out of range")
    kind, target = _slice_target(pipeline, args.target)
    pts: list[tuple[float, float, float]] = []
    if kind == "body":
        plane_rows = []
        for a in target.hrep:
            plane_rows.append((a[i], a[j]))
        from .body import ConvexBody
        rows = [r for r in plane_rows if any(c != 0 for c in r)]
        body2 = ConvexBody(2, hrep=rows, validate=False)
        for v in body2.vrep:
            for sgn in (1, -1):
                x, y = float(v[0]) * sgn, float(v[1]) * sgn
                pts.append((math.atan2(y, x), x, y))
    else:
        fam = pipeline.family
        count = args.points
        for t in range(count):
            ang = 2 * math.pi * t / count
            d = np.zeros(dim)
            d[i], d[j] = math.cos(ang), math.sin(ang)
            if kind == "smooth":
                r = 1.0 / fam.final_gauge_value(d)
            else:
                r = 1.0 / fam.envelope(d)
            pts.append((ang, r * d[i], r * d[j]))
    pts.sort()
    rows = ["angle,u,v"] + [f"{a!r},{x!r},{y!r}" for a, x, y in pts]
    text = "\n".join(rows) + "\n"
    if args.out:
        out = _out_dir(config, args)
        with open(out / "slice.csv", "w") as fh:
            fh.write(text)
        print(f"slice written to {out / 'slice.csv'}")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="renorm",
        description="Certified convex-body surgery and norm gluing")
    parser.add_argument("--config", help="JSON run configuration")
    parser.add_argument("--seed", type=int, help="override the random seed")
    parser.add_argument("--mode", choices=("smooth", "polyhedral", "oracle"),
                        help="override the pipeline mode")
    parser.add_argument("--out", help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("plan", help="emit the parameter plan")
    sub.add_parser("build", help="build and serialize the tower")
    sub.add_parser("verify", help="run the verification suite")
    p_eval = sub.add_parser("eval", help="evaluate the final norm")
    p_eval.add_argument("--vectors", required=True,
                        help="semicolon-separated vectors, or @file.json")
    p_slice = sub.add_parser("slice", help="export a 2-plane boundary slice")
    p_slice.add_argument("--target", default="final",
                         help="seed | level:N | final | envelope")
    p_slice.add_argument("--plane", default="1,2",
                         help="two 1-based coordinate indices, e.g. 1,2")
    p_slice.add_argument("--points", type=int, default=256,
                         help="samples for smooth boundaries")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"plan": cmd_plan, "build": cmd_build, "verify": cmd_verify,
                "eval": cmd_eval, "slice": cmd_slice}
    try:
        return handlers[args.command](args)
    except (RenormError, OSError, json.JSONDecodeError, KeyError,
            ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
