"""Command-line entry point.

Exit codes: 0 all requested checks pass, 1 some check failed, 2 malformed
input or unwritable output, 3 inconsistent certificates.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from . import billiards as bl
from . import capacities as cp
from . import convex as cv
from . import cotangent as ct
from . import products as pr
from . import rearrangements as ra
from .errors import ConsistencyError, DomainError, InvalidArgument, NotFound, PreconditionError
from .symplectic import verify_map

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CONSISTENCY = 0, 1, 2, 3


class InputError(Exception):
    pass


# --------------------------------------------------------------------------
# output


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isfinite(v):
            return v
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return obj


def emit_report(record: dict, path: str | None = None) -> str:
    body = {"lagbarrier_version": __version__, **record}
    text = json.dumps(_clean(body), indent=2) + "\n"
    if path:
        try:
            with open(path, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {path}: {exc}") from None
    else:
        sys.stdout.write(text)
    return text


def write_csv(trajs, path: str | None):
    if not path:
        return
    try:
        with open(path, "w") as fh:
            fh.write(bl.trajectory_csv(trajs))
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from None


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("WORKBENCH_THREADS", "1")))
    except ValueError:
        return 1


# --------------------------------------------------------------------------
# commands


def _interval_record(iv: cp.CapacityInterval) -> dict:
    return {"lower": iv.lower, "upper": iv.upper, "width": iv.width, "a_min": iv.a_min,
            "binding": iv.extras.get("binding"),
            "certificates": [c.to_dict() for c in iv.certificates]}


def cmd_capacity(args) -> tuple[dict, bool]:
    if args.domain_file:
        dom = pr.domain_from_dict(_load_json(args.domain_file))
        label = args.domain_file
    else:
        if not args.domain:
            raise InputError("capacity needs --domain or --domain-file")
        dom = pr.standard_domain(args.domain, n=args.n, delta=args.delta, r=args.r, a=args.a, b=args.b)
        label = args.domain
    if args.scale != 1.0:
        dom = pr.scale_domain(dom, args.scale)
    iv = cp.capacity_of(dom, args.eps, args.samples or 10_000, args.seed, args.tol, not args.no_a_min)
    rec = {"command": "capacity", "domain": label, "params": {**dom.params, "scale": dom.scale},
           **_interval_record(iv)}
    return rec, all(c.passed for c in iv.certificates)


def cmd_billiard(args) -> tuple[dict, bool]:
    if args.table == "annulus":
        value, tr = bl.annulus_min_action(args.delta, args.k_max, n=args.n)
        rec = {"table": "annulus", "delta": args.delta}
    else:
        outer = cv.body_from_dict(_load_json(args.outer_file)) if args.outer_file else cv.cube(1, n=args.n)
        T = cv.body_from_dict(_load_json(args.geometry_file)) if args.geometry_file else cv.polar_dual(outer)
        try:
            pts = json.loads(args.points) if args.points else [[0.0] * outer.dim]
        except json.JSONDecodeError as exc:
            raise InputError(f"--points is not valid JSON: {exc}") from None
        value, tr = bl.scatterer_min_action(pts, outer, T, args.k_max)
        rec = {"table": "scatterers", "points": pts}
    write_csv([tr], args.csv)
    rec.update({"command": "billiard", "k_max": args.k_max, "a_min": value, "trajectory": tr.to_dict()})
    return rec, math.isfinite(value)


def _verify_record(rep) -> dict:
    return rep.to_dict() if hasattr(rep, "to_dict") else rep


def cmd_verify_map(args) -> tuple[dict, bool]:
    n, samples, seed, tol = args.n, args.samples or 10_000, args.seed, args.tol
    name = args.map
    if name == "sigma":
        eps = args.eps if args.eps is not None else 0.2
        rep = ra.verify_sigma(ra.SigmaMap(n, eps), samples, tol, seed)
        ok = (rep["item1_restricted_failures"] == 0 and rep["item1_upper_failures"] == 0
              and rep["item2_failures"] == 0 and rep["item3_coverage"] == 1.0
              and rep["cell_area_max_rel_error"] <= 1e-3)
    elif name == "phi_lambda":
        lam = args.lam if args.lam is not None else 0.9
        eps = args.eps if args.eps is not None else 0.05
        rng = np.random.Generator(np.random.Philox(seed))
        out = ra.phi_lambda_batch(n, lam, eps, ra.sample_lambda_cube_diamond(rng, samples, n, lam, 0.2))
        xz = out["x_zero"]
        rep = {"samples": samples, "lambda": lam, "eps": eps,
               "ball_failures": int(np.count_nonzero(~out["in_ball"])),
               "bound_failures": int(np.count_nonzero(~out["bound_ok"])),
               "x_zero_points": int(np.count_nonzero(xz)),
               "lagrangian_failures": int(np.count_nonzero(~out["in_L"][xz]))}
        ok = rep["ball_failures"] == rep["bound_failures"] == rep["lagrangian_failures"] == 0
    elif name == "rect_to_disk":
        a = args.a
        eps = args.eps if args.eps is not None else 0.01
        m = ra.rect_to_disk(a, eps)
        r = verify_map(m, lambda rng, k: (rng.random((k, 2)) * 2 - 1) * [a, 1.0], samples, tol, seed)
        rep = r.to_dict()
        ok = r.containment_failures == 0 and r.max_symplectic_defect <= tol
    elif name == "annulus_squeeze":
        eps = args.eps if args.eps is not None else cp.DEFAULT_EPS
        c = cp.annulus_upper_certificate(n, args.delta, eps, samples, seed, tol)
        rep, ok = {**c.to_dict(), "report": c.details["report"]}, c.passed
    elif name == "f_delta":
        body = cv.body_from_dict(_load_json(args.body_file)) if args.body_file else cv.ball(1, n)
        c = cp.lower_bound_holed(body, args.delta, base=1.0, samples=samples, seed=seed)
        rep, ok = {"samples": c.samples, "membership_failures": c.failures, "delta": args.delta}, c.passed
    elif name == "cylinder_f":
        m = ct.cylinder_f_spec(args.R)
        r = verify_map(m, ct.CylinderBundle(args.R).sample, samples, tol, seed)
        rep, ok = r.to_dict(), r.max_symplectic_defect <= tol
    elif name == "camel":
        rep = ct.verify_camel(args.a, samples, min(samples, 1000), seed, tol)
        ok = (rep["max_symplectic_defect"] <= tol and rep["seam_max_gap"] <= 1e-9
              and all(s["third_coordinate_ok"] for s in rep["separation"].values()))
    else:  # pragma: no cover - argparse restricts choices
        raise InputError(f"unknown map {name}")
    return {"command": "verify-map", "map": name, "report": _verify_record(rep), "pass": ok}, ok


def cmd_volume(args) -> tuple[dict, bool]:
    if args.body_file:
        body = cv.body_from_dict(_load_json(args.body_file))
    elif args.body:
        try:
            body = cv.body_from_dict(json.loads(args.body))
        except json.JSONDecodeError as exc:
            raise InputError(f"--body is not valid JSON: {exc}") from None
    else:
        raise InputError("volume needs --body or --body-file")
    v = cv.volume(body, args.method, args.samples or 1_000_000, args.seed)
    m = cv.mahler_sqrt(body, args.method, args.samples or 1_000_000, args.seed) if body.centrally_symmetric else None
    rec = {"command": "volume", "body": cv.body_to_dict(body), "volume": v.value, "std_error": v.std_error,
           "method": v.method, "samples": v.samples, "seed": v.seed,
           "mahler_sqrt": None if m is None else {"value": m.value, "std_error": m.std_error}}
    return rec, True


def cmd_cylinder(args) -> tuple[dict, bool]:
    res = ct.cylinder_capacity(args.R, args.a, args.eps if args.eps is not None else 0.1,
                               samples=args.samples or 10_000, seed=args.seed, tol=args.tol)
    up = res["upper_cert"]
    rec = {"command": "cylinder", "R": args.R, "a": args.a, "g": res["g"],
           "lower_cert": res["lower_cert"], "upper_cert": {k: up[k] for k in up},
           "defects": res["defects"], "literal_f_max_radius": res["literal_f_max_radius"],
           "literal_f_radius_bound": res["literal_f_radius_bound"]}
    ok = res["lower_cert"]["membership_failures"] == 0 and math.isfinite(up["upper"])
    return rec, ok


# --------------------------------------------------------------------------
# full reproduction table


def _row_annulus(seed):
    delta = 0.5
    iv = cp.capacity_of(pr.standard_domain("annulus_disk", n=2, delta=delta), seed=seed)
    exp = 2 * (1 - delta)
    ok = iv.contains(exp) and iv.width <= 2e-3 and abs(iv.a_min - exp) <= 1e-4
    return {"row": "annulus_disk(delta=0.5)", "expected": exp, "lower": iv.lower, "upper": iv.upper,
            "a_min": iv.a_min, "pass": ok}


def _row_punctured(seed):
    iv = cp.capacity_of(pr.standard_domain("punctured_cube_diamond", n=2), seed=seed)
    ok = iv.contains(2.0) and iv.upper <= 2 + 2e-3 and abs(iv.a_min - 2) <= 1e-4
    return {"row": "punctured_cube_diamond(n=2)", "expected": 2.0, "lower": iv.lower, "upper": iv.upper,
            "a_min": iv.a_min, "pass": ok}


def _row_barrier(seed):
    r = cp.barrier_test(cv.ellipsoid(1, 1.1))
    return {"row": "pinched_barrier(ellipsoid(1,1.1))", "expected": "left < mid <= right",
            "lower": r["left"], "mid": r["mid"], "upper": r["right"], "pass": r["barrier_certified"]}


def _row_pinched_ball(seed):
    # axes ordered (x1, x2, y1, y2): the pairs (x1, y1), (x2, y2) have radii 1 and 1.2,
    # so M is the symplectic ellipsoid E(pi, 1.44 pi) with capacity pi
    K = cv.ellipsoid(1, 1.2, 1, 1.2)
    iv = cp.biran_pinched_bounds(K, math.pi)
    return {"row": "pinched_lagrangian_disk(ellipsoid(1,1.2,1,1.2))", "expected": "c_M/4 <= c <= c_M",
            "lower": iv.lower, "upper": iv.upper, "pass": iv.lower <= iv.upper}


def _row_cylinder(seed):
    a = math.pi
    res = ct.cylinder_capacity(math.pi, a, 0.1, seed=seed)
    g = res["g"]
    lo, up = res["lower_cert"]["lower"], res["upper_cert"]["upper"]
    ok = lo >= g - 0.2 - 1e-12 and up <= g + 1e-3 + 1e-12
    return {"row": "cotangent_cylinder(a=pi)", "expected": g, "lower": lo, "upper": up, "pass": ok}


def _row_disk_square(seed):
    iv = cp.capacity_of(pr.standard_domain("disk_square"), seed=seed)
    return {"row": "disk_square", "expected": 4.0, "lower": iv.lower, "upper": iv.upper,
            "pass": iv.lower == 4.0 and iv.upper <= 4 + 1e-9}


def _row_camel(seed):
    rep = ct.verify_camel(1.0, 10_000, 1000, seed)
    ok = (rep["max_symplectic_defect"] <= 1e-6 and rep["seam_max_gap"] <= 1e-9
          and all(s["third_coordinate_ok"] for s in rep["separation"].values()))
    return {"row": "camel_map(a=1)", "expected": "defect <= 1e-6, seams <= 1e-9",
            "defect": rep["max_symplectic_defect"], "seam_gap": rep["seam_max_gap"],
            "hole_constant": rep["hole_constant"], "pass": ok}


REPORT_ROWS = (_row_annulus, _row_punctured, _row_barrier, _row_pinched_ball, _row_cylinder,
               _row_disk_square, _row_camel)


def cmd_report(args) -> tuple[dict, bool]:
    with ThreadPoolExecutor(max_workers=_threads()) as ex:
        rows = list(ex.map(lambda f: f(args.seed), REPORT_ROWS))
    return {"command": "report", "rows": rows}, all(r["pass"] for r in rows)


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lagbarrier", description="Certified capacity bounds and billiard actions.")
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--tol", type=float, default=1e-6)
    common.add_argument("--output", "-o", default=None, help="write the JSON report here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("capacity", parents=[common], help="capacity interval of a product domain")
    c.add_argument("domain", nargs="?", default=None, help=f"one of {', '.join(pr.STANDARD_IDS)}")
    c.add_argument("--domain", dest="domain_opt", default=None)
    c.add_argument("--domain-file", default=None)
    c.add_argument("--n", type=int, default=2)
    c.add_argument("--delta", type=float, default=0.0)
    c.add_argument("--r", type=float, default=1.0)
    c.add_argument("--a", type=float, default=1.0)
    c.add_argument("--b", type=float, default=1.0)
    c.add_argument("--eps", type=float, default=cp.DEFAULT_EPS)
    c.add_argument("--scale", type=float, default=1.0)
    c.add_argument("--no-a-min", action="store_true")
    c.set_defaults(func=cmd_capacity)

    b = sub.add_parser("billiard", parents=[common], help="minimal action of a billiard table")
    b.add_argument("--table", choices=("annulus", "scatterers"), default="annulus")
    b.add_argument("--delta", type=float, default=0.0)
    b.add_argument("--k-max", type=int, default=8)
    b.add_argument("--n", type=int, default=2)
    b.add_argument("--points", default=None, help="scatterer points as a JSON list")
    b.add_argument("--outer-file", default=None)
    b.add_argument("--geometry-file", default=None)
    b.add_argument("--csv", default=None, help="trajectory CSV path")
    b.set_defaults(func=cmd_billiard)

    v = sub.add_parser("verify-map", parents=[common], help="numerical checks of an explicit map")
    v.add_argument("--map", required=True,
                   choices=("sigma", "phi_lambda", "rect_to_disk", "annulus_squeeze", "f_delta", "cylinder_f", "camel"))
    v.add_argument("--n", type=int, default=2)
    v.add_argument("--eps", type=float, default=None)
    v.add_argument("--lambda", dest="lam", type=float, default=None)
    v.add_argument("--delta", type=float, default=0.0)
    v.add_argument("--a", type=float, default=1.0)
    v.add_argument("--R", type=float, default=math.pi)
    v.add_argument("--body-file", default=None)
    v.set_defaults(func=cmd_verify_map)

    o = sub.add_parser("volume", parents=[common], help="volume and sqrt(Vol K Vol K°)")
    o.add_argument("--body", default=None, help="body as inline JSON")
    o.add_argument("--body-file", default=None)
    o.add_argument("--method", choices=("exact", "monte_carlo"), default="exact")
    o.set_defaults(func=cmd_volume)

    y = sub.add_parser("cylinder", parents=[common], help="certificates for the cotangent cylinder")
    y.add_argument("--R", type=float, default=math.pi)
    y.add_argument("--a", type=float, default=1.0)
    y.add_argument("--eps", type=float, default=None)
    y.set_defaults(func=cmd_cylinder)

    r = sub.add_parser("report", parents=[common], help="reproduction table of all headline values")
    r.set_defaults(func=cmd_report)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "capacity":
        args.domain = args.domain_opt or args.domain
    try:
        rec, ok = args.func(args)
        emit_report({**rec, "pass": bool(ok)}, args.output)
    except ConsistencyError as exc:
        sys.stderr.write(f"lagbarrier: consistency error: {exc}\n")
        return EXIT_CONSISTENCY
    except (InputError, InvalidArgument, DomainError, PreconditionError, NotFound, KeyError, TypeError) as exc:
        sys.stderr.write(f"lagbarrier: {exc}\n")
        return EXIT_INPUT
    return EXIT_OK if ok else EXIT_FAIL


def main(argv=None):
    sys.exit(run(argv))
