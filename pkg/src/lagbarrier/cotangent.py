"""Disk cotangent bundles of cylinders and of the dumbbell.

Chart for ``D*C_a(R)``: ``(z, theta, p_z, p_theta)`` with form
``dp_theta ^ dtheta + dp_z ^ dz``; membership is ``|z| < a`` and
``(pi/R) p_theta^2 + p_z^2 < 1``.  Targets use the chart
``(r, phi, x, y)`` with form ``-r dr ^ dphi + dy ^ dx``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rearrangements as ra
from .errors import DomainError, InvalidArgument
from .symplectic import (
    R_MIN,
    Chart,
    PiecewiseMap,
    Seam,
    SymplecticMapSpec,
    compose,
    cotangent_cylinder_chart,
    polar_cotangent_chart,
    polar_first_chart,
    verify_map,
)

Z_MAX = 1e3  # sampling range of z for the unbounded cylinder


def g_of_a(a: float) -> float:
    """Capacity of D*C_a for the base circle of length 2 pi: 4a below pi, 4 pi above."""
    if a <= 0:
        raise InvalidArgument("a must be positive")
    return 4 * a if a <= math.pi else 4 * math.pi


def cylinder_bound(a: float, R: float = math.pi) -> float:
    """min(4a, 4 sqrt(pi R)); equals g_of_a when R = pi.

    4 sqrt(pi R) is the area of the annulus {theta in S^1, |p_theta| < sqrt(R/pi)}.
    """
    if a <= 0 or R <= 0:
        raise InvalidArgument("a and R must be positive")
    return min(4 * a, 4 * math.sqrt(math.pi * R))


@dataclass(frozen=True)
class CylinderBundle:
    R: float = math.pi
    a: float = math.inf

    def __post_init__(self):
        if self.R <= 0 or self.a <= 0:
            raise InvalidArgument("R and a must be positive")

    @property
    def c(self) -> float:
        """Radius of the base circle, sqrt(R/pi)."""
        return math.sqrt(self.R / math.pi)

    def contains(self, q):
        q = np.asarray(q, dtype=float)
        return (np.abs(q[..., 0]) < self.a) & (q[..., 3] ** 2 / self.c ** 2 + q[..., 2] ** 2 < 1)

    def chart(self) -> Chart:
        base = cotangent_cylinder_chart(self.a)
        return Chart(f"D*C(R={self.R:g}, a={self.a:g})", 4, base.form, self.contains)

    def sample(self, rng, count: int) -> np.ndarray:
        zmax = self.a if math.isfinite(self.a) else Z_MAX
        z = zmax * (2 * rng.random(count) - 1)
        th = 2 * math.pi * rng.random(count)
        rad = np.sqrt(rng.random(count))
        ang = 2 * math.pi * rng.random(count)
        return np.column_stack([z, th, rad * np.cos(ang), self.c * rad * np.sin(ang)])


# --------------------------------------------------------------------------
# upper bound maps


def _literal_f(c):
    def ev(q):
        q = np.asarray(q, dtype=float)
        r = c + q[..., 3]
        return np.stack([r, -q[..., 1] / r, q[..., 0], q[..., 2]], axis=-1)
    return ev


def cylinder_f_jacobian(R: float, q) -> np.ndarray:
    """Closed-form Jacobian of the closed-form map f at points q (N, 4)."""
    c = math.sqrt(R / math.pi)
    q = np.atleast_2d(np.asarray(q, dtype=float))
    r = c + q[:, 3]
    J = np.zeros((len(q), 4, 4))
    J[:, 0, 3] = 1
    J[:, 1, 1] = -1 / r
    J[:, 1, 3] = q[:, 1] / r ** 2
    J[:, 2, 0] = 1
    J[:, 3, 2] = 1
    return J


def cylinder_f_spec(R: float = math.pi, a: float = math.inf) -> SymplecticMapSpec:
    """f(z, th, p_z, p_th) = (c + p_th, -th / (c + p_th), z, p_z), c = sqrt(R/pi).

    Locally symplectic; the angular coordinate spans 2 pi / (c + p_th), so the
    map is not injective where c + p_th < 1.
    """
    bundle = CylinderBundle(R, a)
    c = bundle.c

    def in_target(p):
        return (p[..., 0] > 0) & (p[..., 0] < 2 * c)

    return SymplecticMapSpec(bundle.chart(), polar_first_chart(2), _literal_f(c), None, in_target,
                             f"cylinder_f(R={R:g})")


def cylinder_map_f(R: float, pt, a: float = math.inf) -> np.ndarray:
    bundle = CylinderBundle(R, a)
    pt = np.asarray(pt, dtype=float)
    if not np.all(bundle.contains(pt)):
        raise DomainError("point outside the disk cotangent bundle")
    return _literal_f(bundle.c)(pt)


def _area_first_factor(c):
    """(z, th, p_z, p_th) -> (sqrt(2 (p_th + c)), -th, z, p_z): injective version of f."""

    def ev(q):
        q = np.asarray(q, dtype=float)
        r = np.sqrt(2 * (q[..., 3] + c))
        return np.stack([r, -q[..., 1], q[..., 0], q[..., 2]], axis=-1)

    def jac(q):
        q = np.atleast_2d(np.asarray(q, dtype=float))
        r = np.sqrt(2 * (q[:, 3] + c))
        J = np.zeros((len(q), 4, 4))
        J[:, 0, 3] = 1 / r
        J[:, 1, 1] = -1
        J[:, 2, 0] = 1
        J[:, 3, 2] = 1
        return J

    return ev, jac


def _second_factor_squeeze(rect_map: SymplecticMapSpec, name: str) -> SymplecticMapSpec:
    """(r, phi, x, y) -> (r, phi, rect_map(x, y)) on the polar-first chart."""

    def ev(p):
        p = np.asarray(p, dtype=float)
        w = rect_map.eval(p[..., 2:4])
        return np.concatenate([p[..., :2], w], axis=-1)

    def jac(p):
        p = np.atleast_2d(np.asarray(p, dtype=float))
        J = np.zeros((len(p), 4, 4))
        J[:, 0, 0] = J[:, 1, 1] = 1
        J[:, 2:, 2:] = rect_map.analytic_jacobian(p[:, 2:4])
        return J

    chart = polar_first_chart(2)
    return SymplecticMapSpec(chart, chart, ev, jac, None, name)


def cylinder_upper_certificate(R: float = math.pi, a: float = math.inf, eps: float = 1e-3,
                               samples: int = 10_000, seed: int = 0, tol: float = 1e-6) -> dict:
    """Embedding of D*C_a(R) into B^2(A1) x B^2(A2), A1 = 4 sqrt(pi R), A2 = 4a + eps.

    The first factor uses the injective area coordinate; the second factor is
    the rectangle [-a, a] x [-1, 1] squeezed onto a disk.  Non-squeezing then
    bounds the capacity by min(A1, A2) over the factors whose containment is
    verified.
    """
    bundle = CylinderBundle(R, a)
    c = bundle.c
    ev, jac = _area_first_factor(c)
    first = SymplecticMapSpec(bundle.chart(), polar_first_chart(2), ev, jac, name="area_first_factor")
    A1 = 4 * math.pi * c
    branches = {}

    def in_first(p):
        return math.pi * p[..., 0] ** 2 < A1 * (1 + 1e-12)

    m1 = SymplecticMapSpec(first.source, first.target, ev, jac, in_first, first.name)
    r1 = verify_map(m1, bundle.sample, samples, tol, seed)
    branches["first_factor"] = {"target": A1, "report": r1.to_dict(),
                                "valid": r1.containment_failures == 0 and r1.max_symplectic_defect <= tol}
    if math.isfinite(a):
        A2 = 4 * a + eps
        sq = _second_factor_squeeze(ra.rect_to_disk(a, eps), "W_squeeze")
        full = compose(first, sq, name="W_squeeze o area_first_factor")

        def in_second(p):
            return math.pi * (p[..., 2] ** 2 + p[..., 3] ** 2) <= A2 * (1 + 1e-12)

        m2 = SymplecticMapSpec(full.source, full.target, full.eval, full.analytic_jacobian, in_second, full.name)
        r2 = verify_map(m2, bundle.sample, samples, tol, seed + 1)
        branches["second_factor"] = {"target": A2, "report": r2.to_dict(),
                                     "valid": r2.containment_failures == 0 and r2.max_symplectic_defect <= tol}
    valid = [b["target"] for b in branches.values() if b["valid"]]
    return {"upper": min(valid) if valid else math.inf, "branches": branches,
            "axioms": ["gromov-nonsqueezing"]}


# --------------------------------------------------------------------------
# lower bound map


def _h_box(a, eps, R):
    s = math.sqrt(R / math.pi)
    return a - eps / 2, s * (math.pi - eps / 2), s


def lower_map_h(a: float, eps: float, pt, R: float = math.pi) -> np.ndarray:
    """(x1, x2, y1, y2) -> (z, th, p_z, p_th) = (x1, x2 / s, y1, s y2), s = sqrt(R/pi).

    For R = pi this is the identity.  The source is
    box(a - eps/2, s (pi - eps/2)) x_L open diamond(1).
    """
    if eps <= 0 or a <= 0:
        raise InvalidArgument("need a > 0 and eps > 0")
    b1, b2, s = _h_box(a, eps, R)
    pt = np.asarray(pt, dtype=float)
    inside = (np.abs(pt[..., 0]) <= b1) & (np.abs(pt[..., 1]) <= b2) & (np.abs(pt[..., 2]) + np.abs(pt[..., 3]) < 1)
    if not np.all(inside):
        raise DomainError("point outside box x_L diamond")
    return np.stack([pt[..., 0], pt[..., 1] / s, pt[..., 2], s * pt[..., 3]], axis=-1)


def cylinder_lower_certificate(R: float = math.pi, a: float = 1.0, eps: float = 0.1, samples: int = 10_000,
                               seed: int = 0) -> dict:
    """Ball certificate 4 min(a - eps/2, s (pi - eps/2)) from box x diamond inside D*C_a(R)."""
    if a <= eps / 2 or eps >= 2 * math.pi:
        raise InvalidArgument("need eps < 2a and eps < 2 pi")
    b1, b2, s = _h_box(a, eps, R)
    rng = np.random.Generator(np.random.Philox(seed))
    x = np.column_stack([b1 * (2 * rng.random(samples) - 1), b2 * (2 * rng.random(samples) - 1)])
    e = rng.exponential(size=(samples, 3))
    y = e[:, :2] / e.sum(axis=1, keepdims=True) * np.where(rng.random((samples, 2)) < 0.5, -1, 1)
    y *= 1 - 1e-12  # open diamond
    img = lower_map_h(a, eps, np.hstack([x, y]), R)
    bundle = CylinderBundle(R, a)
    failures = int(np.count_nonzero(~bundle.contains(img)))
    theta_span = float(img[:, 1].max() - img[:, 1].min())
    return {"lower": 4 * min(b1, b2) if failures == 0 else 0.0, "box": [b1, b2], "samples": samples,
            "membership_failures": failures, "theta_span": theta_span,
            "axioms": ["ramos-cube-diamond"]}


def cylinder_capacity(R: float = math.pi, a: float = 1.0, eps: float = 0.1, upper_eps: float = 1e-3,
                      samples: int = 10_000, seed: int = 0, tol: float = 1e-6) -> dict:
    """Lower/upper certificates for D*C_a(R) and the literal-map diagnostics."""
    lo_a = a if math.isfinite(a) else Z_MAX
    lower = cylinder_lower_certificate(R, lo_a, eps, samples, seed)
    upper = cylinder_upper_certificate(R, a, upper_eps, samples, seed + 10, tol)
    f = cylinder_f_spec(R, a)
    rf = verify_map(f, CylinderBundle(R, a).sample, samples, tol, seed + 20)
    rng = np.random.Generator(np.random.Philox(seed + 21))
    img = f.eval(CylinderBundle(R, a).sample(rng, samples))
    g = cylinder_bound(a, R) if math.isfinite(a) else 4 * math.sqrt(math.pi * R)
    return {
        "R": R, "a": a, "g": g,
        "lower_cert": lower, "upper_cert": upper,
        "defects": {"literal_f": rf.to_dict()},
        "literal_f_max_radius": float(img[:, 0].max()),
        "literal_f_radius_bound": 2 * math.sqrt(R / math.pi),
        "literal_f_max_angular_span": float(2 * math.pi / img[:, 0].min()),
    }


# --------------------------------------------------------------------------
# dumbbell and the camel map


@dataclass(frozen=True)
class Dumbbell:
    """Pieces C_a, X_a^+ and X_a^- in coordinates (r, th, z, p_r, p_th, p_z)."""

    a: float

    def __post_init__(self):
        if self.a <= 0:
            raise InvalidArgument("a must be positive")

    def contains(self, pt, piece: str):
        q = np.asarray(pt, dtype=float)
        r, z, pr, pth, pz = q[..., 0], q[..., 2], q[..., 3], q[..., 4], q[..., 5]
        if piece == "C":
            return (r == 1) & (np.abs(z) <= self.a) & (pr == 0) & (pz ** 2 + pth ** 2 < 1)
        if piece in ("X+", "X-"):
            sgn = 1 if piece == "X+" else -1
            return (z == sgn * self.a) & (r >= 1) & (pz == 0) & (pr ** 2 + pth ** 2 / r ** 2 < 1)
        raise DomainError(f"unknown dumbbell piece {piece!r}")


def _camel_c(q):
    q = np.asarray(q, dtype=float)  # (z, th, p_z, p_th)
    r = 1 + q[..., 3]
    return np.stack([r, -q[..., 1] / r, q[..., 0], q[..., 2]], axis=-1)


def _camel_x(a, sign):
    def ev(q):
        q = np.asarray(q, dtype=float)  # (r, th, p_r, p_th)
        rr = 1 + q[..., 3]
        return np.stack([rr, -q[..., 1] / rr, sign * (q[..., 0] - 1 + a), sign * q[..., 2]], axis=-1)
    return ev


def camel_map_g(a: float, pt, piece_label: str) -> np.ndarray:
    """Piecewise map of D*X_a into R^4 (r, phi, x, y); pt is (r, th, z, p_r, p_th, p_z).

    The X^- branch uses third coordinate -(r - 1 + a) so that it meets the
    cylinder piece at z = -a.
    """
    db = Dumbbell(a)
    pt = np.asarray(pt, dtype=float)
    if not np.all(db.contains(pt, piece_label)):
        raise DomainError(f"point not in piece {piece_label}")
    if piece_label == "C":
        return _camel_c(pt[..., [2, 1, 5, 4]])
    sign = 1 if piece_label == "X+" else -1
    return _camel_x(a, sign)(pt[..., [0, 1, 3, 4]])


def camel_hole_constant() -> float:
    """Capacity of the hole disk {y = 0, r^2 + x^2 <= 4}: 4 pi."""
    return math.pi * 4.0


def camel_pieces(a: float, r_max: float = 4.0) -> PiecewiseMap:
    c_chart = cotangent_cylinder_chart(a)
    c_src = Chart("D*C_a", 4, c_chart.form,
                  lambda q: (np.abs(q[..., 0]) <= a) & (q[..., 2] ** 2 + q[..., 3] ** 2 < 1) & (1 + q[..., 3] > R_MIN))
    x_chart = polar_cotangent_chart(2)  # (r, th, p_r, p_th)

    def x_dom(q):
        r = q[..., 0]
        return (r >= 1) & (q[..., 2] ** 2 + q[..., 3] ** 2 / r ** 2 < 1) & (1 + q[..., 3] > R_MIN)

    x_src = Chart("D*X_a^pm", 4, x_chart.form, x_dom)
    tgt = polar_first_chart(2)
    pieces = {
        "C": SymplecticMapSpec(c_src, tgt, _camel_c, name="g|C"),
        "X+": SymplecticMapSpec(x_src, tgt, _camel_x(a, 1), name="g|X+"),
        "X-": SymplecticMapSpec(x_src, tgt, _camel_x(a, -1), name="g|X-"),
    }

    def seam(sign):
        def sampler(rng, n):
            th = 2 * math.pi * rng.random(n)
            rad = np.sqrt(rng.random(n))
            ang = 2 * math.pi * rng.random(n)
            s, pth = rad * np.cos(ang), rad * np.sin(ang)
            on_c = np.column_stack([np.full(n, sign * a), th, s, pth])
            on_x = np.column_stack([np.ones(n), th, sign * s, pth])
            return on_c, on_x
        return sampler

    seams = (Seam("C", "X+", seam(1)), Seam("C", "X-", seam(-1)))
    return PiecewiseMap(pieces, seams, f"camel_g(a={a:g})")


def _sample_c(a):
    def s(rng, n):
        rad = np.sqrt(rng.random(n))
        ang = 2 * math.pi * rng.random(n)
        return np.column_stack([a * (2 * rng.random(n) - 1), 2 * math.pi * rng.random(n),
                                rad * np.cos(ang), rad * np.sin(ang)])
    return s


def _sample_x(r_max):
    def s(rng, n):
        r = 1 + (r_max - 1) * rng.random(n)
        rad = np.sqrt(rng.random(n))
        ang = 2 * math.pi * rng.random(n)
        return np.column_stack([r, 2 * math.pi * rng.random(n), rad * np.cos(ang), r * rad * np.sin(ang)])
    return s


def verify_camel(a: float, samples: int = 10_000, seam_samples: int = 1000, seed: int = 0,
                 tol: float = 1e-6, r_max: float = 4.0) -> dict:
    """Per-piece defects, seam gaps and the sign behavior of the X^pm images."""
    pm = camel_pieces(a, r_max)
    samplers = {"C": _sample_c(a), "X+": _sample_x(r_max), "X-": _sample_x(r_max)}
    rep = verify_map(pm, samplers, samples, tol, seed, seam_samples=seam_samples)
    rng = np.random.Generator(np.random.Philox(seed + 31))
    out = rep.to_dict()
    sep = {}
    for label, sign in (("X+", 1), ("X-", -1)):
        q = samplers[label](rng, samples)
        chart_ok = 1 + q[:, 3] > R_MIN
        img = pm.pieces[label].eval(q[chart_ok])
        x, y = img[:, 2], img[:, 3]
        sep[label] = {
            "third_coordinate_ok": bool(np.all(sign * x >= a)),
            "min_signed_third": float(np.min(sign * x)),
            "fourth_positive_fraction": float(np.mean(y > 0)),
            "out_of_chart_fraction": float(np.mean(~chart_ok)),
            "images_in_removed_set": int(np.count_nonzero((y == 0) & (img[:, 0] ** 2 + x ** 2 > 4))),
        }
    out["separation"] = sep
    out["hole_constant"] = camel_hole_constant()
    return out
