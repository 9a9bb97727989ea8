"""Lagrangian products ``A x_L B`` in R^n x R^n with the form sum dy_i ^ dx_i.

Points of R^{2n} are stored as ``(x_1..x_n, y_1..y_n)``.  The position factor
is a convex body, an annulus ``K \\ delta K`` or a body with finitely many
removed fibers ``{x0} x R^n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import convex as cv
from .convex import ConvexBody
from .errors import InvalidArgument
from .symplectic import SymplecticMapSpec, linear_map, standard_chart

FIBER_TOL = 1e-12


@dataclass(frozen=True)
class Annulus:
    """``outer \\ delta * outer``; delta = 0 removes only the origin.

    Closed convention: points with gauge exactly delta are kept.
    """

    outer: ConvexBody
    delta: float

    def __post_init__(self):
        if not 0 <= self.delta < 1:
            raise InvalidArgument("annulus ratio delta must lie in [0, 1)")

    @property
    def dim(self):
        return self.outer.dim

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        g = cv.gauge(self.outer, x)
        if self.delta == 0:
            return (g <= 1 + cv._MEMBER_TOL) & np.any(np.abs(x) > FIBER_TOL, axis=-1)
        return (g <= 1 + cv._MEMBER_TOL) & (g >= self.delta * (1 - cv._MEMBER_TOL))


@dataclass(frozen=True)
class PuncturedBody:
    body: ConvexBody
    removed_points: tuple

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.removed_points, dtype=float))
        if pts.shape[1] != self.body.dim:
            raise InvalidArgument("removed points must match the body dimension")
        if not np.all(cv.contains(self.body, pts)):
            raise InvalidArgument("removed points must lie in the closed body")
        object.__setattr__(self, "removed_points", tuple(tuple(map(float, p)) for p in pts))

    @property
    def dim(self):
        return self.body.dim

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        ok = cv.contains(self.body, x)
        for p in self.removed_points:
            ok = ok & np.any(np.abs(x - np.asarray(p)) > FIBER_TOL, axis=-1)
        return ok


def position_body(pos) -> ConvexBody:
    """The convex hull of the position factor."""
    if isinstance(pos, Annulus):
        return pos.outer
    if isinstance(pos, PuncturedBody):
        return pos.body
    return pos


def position_contains(pos, x):
    if isinstance(pos, (Annulus, PuncturedBody)):
        return pos.contains(x)
    return cv.contains(pos, x)


@dataclass(frozen=True)
class LagrangianProductDomain:
    position: object
    momentum: ConvexBody
    domain_id: str = "custom"
    params: dict = field(default_factory=dict)
    citation: str = ""
    scale: float = 1.0  # the domain is scale * (base domain); capacities pick up scale**2

    def __post_init__(self):
        if self.position.dim != self.momentum.dim:
            raise InvalidArgument("position and momentum factors must have the same dimension")

    @property
    def dim(self) -> int:
        return self.momentum.dim

    @property
    def is_holed(self) -> bool:
        return isinstance(self.position, (Annulus, PuncturedBody))


def contains_point(dom: LagrangianProductDomain, z):
    z = np.asarray(z, dtype=float)
    n = dom.dim
    if z.shape[-1] != 2 * n:
        raise InvalidArgument(f"expected points of dimension {2 * n}, got {z.shape[-1]}")
    return position_contains(dom.position, z[..., :n]) & cv.contains(dom.momentum, z[..., n:])


def a_r_body(r: float) -> ConvexBody:
    """Convex hull of (0,1), (2,1), (2,-1), (0,-1), (-r,0)."""
    if r <= 0:
        raise InvalidArgument("A_r needs r > 0")
    return cv.polytope([(0, 1), (2, 1), (2, -1), (0, -1), (-r, 0)])


STANDARD_IDS = ("disk_disk", "cube_diamond", "annulus_disk", "punctured_cube_diamond",
                "disk_square", "a_r_diamond", "rect_diamond")


def standard_domain(domain_id: str, n: int = 2, delta: float = 0.0, r: float = 1.0,
                    a: float = 1.0, b: float = 1.0) -> LagrangianProductDomain:
    """Named example domains; only the parameters relevant to the id are used."""
    if domain_id == "disk_disk":
        return LagrangianProductDomain(cv.ball(1, n), cv.ball(1, n), domain_id, {"n": n}, "ostrover-bidisk")
    if domain_id == "cube_diamond":
        return LagrangianProductDomain(cv.cube(1, n=n), cv.cross_polytope(1, n=n), domain_id, {"n": n},
                                       "ramos-cube-diamond")
    if domain_id == "annulus_disk":
        return LagrangianProductDomain(Annulus(cv.ball(1, n), float(delta)), cv.ball(1, n), domain_id,
                                       {"n": n, "delta": float(delta)}, "annulus-product")
    if domain_id == "punctured_cube_diamond":
        return LagrangianProductDomain(PuncturedBody(cv.cube(1, n=n), (tuple([0.0] * n),)),
                                       cv.cross_polytope(1, n=n), domain_id, {"n": n}, "punctured-cube")
    if domain_id == "disk_square":
        return LagrangianProductDomain(cv.ball(1, 2), cv.cube(1, 1), domain_id, {}, "disk-square")
    if domain_id == "a_r_diamond":
        return LagrangianProductDomain(a_r_body(r), cv.cross_polytope(1, n=2), domain_id, {"r": float(r)},
                                       "a-r-product")
    if domain_id == "rect_diamond":
        if a <= 0 or b <= 0:
            raise InvalidArgument("rect_diamond needs a, b > 0")
        return LagrangianProductDomain(cv.cube(a, b), cv.cross_polytope(1, n=2), domain_id,
                                       {"a": float(a), "b": float(b)}, "box-diamond")
    raise InvalidArgument(f"unknown domain id {domain_id!r}; known: {', '.join(STANDARD_IDS)}")


def scale_domain(dom: LagrangianProductDomain, mu: float) -> LagrangianProductDomain:
    """mu * dom, scaling both factors (the form scales by mu^2)."""
    if mu <= 0:
        raise InvalidArgument("scale must be positive")
    pos = dom.position
    if isinstance(pos, Annulus):
        pos = Annulus(cv.scale_body(pos.outer, mu), pos.delta)
    elif isinstance(pos, PuncturedBody):
        pos = PuncturedBody(cv.scale_body(pos.body, mu), tuple(tuple(mu * c for c in p) for p in pos.removed_points))
    else:
        pos = cv.scale_body(pos, mu)
    return replace(dom, position=pos, momentum=cv.scale_body(dom.momentum, mu), scale=dom.scale * mu)


def balance_stretch(a: float, b: float, n: int = 1) -> SymplecticMapSpec:
    """(x, y) -> (t x, y / t) with t = sqrt(b / a).

    Carries D(a) x_L D(b) onto D(sqrt(ab)) x_L D(sqrt(ab)).
    """
    if a <= 0 or b <= 0:
        raise InvalidArgument("balance_stretch needs a, b > 0")
    t = math.sqrt(b / a)
    A = np.diag([t] * n + [1 / t] * n)
    chart = standard_chart(n)
    return linear_map(A, chart, chart, f"stretch(t={t:.6g})")


# --------------------------------------------------------------------------
# sampling


def sample_body(body: ConvexBody, rng, count: int) -> np.ndarray:
    """Uniform points of a body by rejection from its bounding box."""
    lo, hi = cv.bounding_box(body)
    out = []
    need = count
    while need > 0:
        pts = lo + (hi - lo) * rng.random((max(2 * need, 64), body.dim))
        pts = pts[cv.contains(body, pts)]
        out.append(pts[:need])
        need -= len(out[-1])
    return np.concatenate(out)[:count]


def sample_position(pos, rng, count: int) -> np.ndarray:
    body = position_body(pos)
    out = []
    need = count
    while need > 0:
        pts = sample_body(body, rng, 2 * need)
        pts = pts[position_contains(pos, pts)]
        out.append(pts[:need])
        need -= len(out[-1])
    return np.concatenate(out)[:count]


def sample_domain(dom: LagrangianProductDomain, rng, count: int) -> np.ndarray:
    return np.hstack([sample_position(dom.position, rng, count), sample_body(dom.momentum, rng, count)])


# --------------------------------------------------------------------------
# JSON


def position_to_dict(pos) -> dict:
    if isinstance(pos, Annulus):
        return {"annulus": {"outer": cv.body_to_dict(pos.outer), "delta": pos.delta}}
    if isinstance(pos, PuncturedBody):
        return {"punctured": {"body": cv.body_to_dict(pos.body), "removed_points": [list(p) for p in pos.removed_points]}}
    return cv.body_to_dict(pos)


def position_from_dict(d: dict):
    if "annulus" in d:
        a = d["annulus"]
        return Annulus(cv.body_from_dict(a["outer"]), float(a["delta"]))
    if "punctured" in d:
        p = d["punctured"]
        return PuncturedBody(cv.body_from_dict(p["body"]), tuple(tuple(map(float, q)) for q in p["removed_points"]))
    return cv.body_from_dict(d)


def domain_to_dict(dom: LagrangianProductDomain) -> dict:
    return {"product": {"position": position_to_dict(dom.position), "momentum": cv.body_to_dict(dom.momentum)}}


def domain_from_dict(d: dict) -> LagrangianProductDomain:
    if "product" not in d:
        raise InvalidArgument("domain file needs a 'product' object")
    p = d["product"]
    try:
        return LagrangianProductDomain(position_from_dict(p["position"]), cv.body_from_dict(p["momentum"]))
    except KeyError as exc:
        raise InvalidArgument(f"domain file is missing field {exc}") from None
