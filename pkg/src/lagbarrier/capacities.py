"""Certified capacity intervals.

Convention: capacities are normalized so that ``c(B^{2n}(r)) = r`` with
``B^{2n}(r) = {pi |z|^2 <= r}``.  Deep theorems (non-squeezing, the
Lagrangian barrier in the ball, the cube x diamond symplectomorphism, the
bidisk value) enter only as registry axioms with citation tags.  Everything
else is a certificate: an explicit map that is verified numerically.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from . import billiards as bl
from . import convex as cv
from . import products as pr
from . import rearrangements as ra
from .convex import ConvexBody
from .errors import ConsistencyError, InvalidArgument, NotFound, PreconditionError
from .symplectic import (
    R_MIN,
    Chart,
    SymplecticMapSpec,
    linear_map,
    polar_cotangent_chart,
    polar_first_chart,
    split_chart,
    standard_chart,
    verify_map,
)

PINCH_ALPHA = (4 / math.pi) ** (2 / 3)
DEFAULT_EPS = 1e-3


# --------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class KnownResult:
    domain_id: str
    value: float
    citation: str


@dataclass
class Certificate:
    kind: str  # "lower" or "upper"
    value: float
    theorem: str
    axioms: list = field(default_factory=list)
    defect: float = 0.0
    samples: int = 0
    failures: int = 0
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        return {"kind": self.kind, "value": float(self.value), "theorem": self.theorem,
                "axioms": list(self.axioms), "defect": float(self.defect), "samples": int(self.samples),
                "failures": int(self.failures)}


@dataclass
class CapacityInterval:
    lower: float
    upper: float
    certificates: list = field(default_factory=list)
    a_min: float | None = None
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.lower < 0 or self.lower > self.upper:
            raise ConsistencyError(f"capacity interval [{self.lower}, {self.upper}] is inconsistent",
                                   [c.to_dict() for c in self.certificates])

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, v: float, tol: float = 0.0) -> bool:
        return self.lower - tol <= v <= self.upper + tol

    def scaled(self, factor: float) -> "CapacityInterval":
        return CapacityInterval(self.lower * factor, self.upper * factor, self.certificates,
                                None if self.a_min is None else self.a_min * factor,
                                {**self.extras, "conformal_factor": factor})


def intersect(certs: list, a_min=None, extras=None) -> CapacityInterval:
    """max of accepted lowers, min of accepted uppers; rejected certificates are kept
    for provenance but do not bind."""
    ok = [c for c in certs if c.passed]
    lowers = [c for c in ok if c.kind == "lower"]
    uppers = [c for c in ok if c.kind == "upper"]
    lo = max(lowers, key=lambda c: c.value) if lowers else None
    up = min(uppers, key=lambda c: c.value) if uppers else None
    ex = dict(extras or {})
    ex["binding"] = {"lower": lo.theorem if lo else None, "upper": up.theorem if up else None}
    return CapacityInterval(lo.value if lo else 0.0, up.value if up else math.inf, certs, a_min, ex)


# --------------------------------------------------------------------------
# registry


_REGISTRY = {
    "ball": (lambda r=1.0: float(r), "normalization"),
    "cylinder": (lambda r=1.0: float(r), "normalization"),
    "disk_disk": (lambda n=2: 4.0, "ostrover-bidisk"),
    "cube_diamond": (lambda n=2: 4.0, "ramos-cube-diamond"),
    "biran_holed_ball": (lambda s=1.0: float(s) / 2, "biran-barrier"),
    "disk_square": (lambda: 4.0, "disk-square-value"),
}


def registry_lookup(domain_id: str, *args) -> KnownResult:
    """Known capacity values, e.g. ``registry_lookup("cube_diamond", 3)`` or
    ``registry_lookup("biran_holed_ball(1)")``."""
    m = re.fullmatch(r"\s*([a-z_]+)\s*(?:\((.*)\))?\s*", domain_id)
    if not m or m.group(1) not in _REGISTRY:
        raise NotFound(domain_id)
    name = m.group(1)
    if m.group(2):
        args = tuple(float(v) for v in m.group(2).split(",") if v.strip())
    fn, cite = _REGISTRY[name]
    try:
        value = fn(*args)
    except TypeError:
        raise InvalidArgument(f"bad parameters {args} for {name}") from None
    if name in ("ball", "cylinder", "biran_holed_ball") and value <= 0:
        raise InvalidArgument("capacity parameters must be positive")
    label = f"{name}({', '.join(f'{a:g}' for a in args)})" if args else name
    return KnownResult(label, value, cite)


def dual_product_base(K: ConvexBody):
    """c(K x_L K°) when K is a linear image of a ball or cube (value 4), else None."""
    if K.kind in ("ball", "ellipsoid"):
        return 4.0, "ostrover-bidisk"
    if K.kind in ("cube", "cross_polytope"):
        return 4.0, "ramos-cube-diamond"
    return None


# --------------------------------------------------------------------------
# lower bound by translation into the holed body


def f_delta(K: ConvexBody, delta: float, z) -> np.ndarray:
    """((1 + delta)/2) rho_K(e_1) e_1 + z for z in ((1 - delta)/2) K.

    rho_K(e_1) e_1 is the boundary point of K on the positive first axis.
    """
    if not K.centrally_symmetric:
        raise PreconditionError("K must be centrally symmetric")
    if not 0 <= delta < 1:
        raise InvalidArgument("delta must lie in [0, 1)")
    z = np.asarray(z, dtype=float)
    if np.any(cv.gauge(K, z) > (1 - delta) / 2 * (1 + 1e-12)):
        raise PreconditionError("z lies outside ((1 - delta)/2) K")
    e1 = np.zeros(K.dim)
    e1[0] = 1.0
    b = cv.radial(K, e1)
    return (1 + delta) / 2 * b + z


def lower_bound_holed(K: ConvexBody, delta: float, base: float | None = None, samples: int = 10_000,
                      seed: int = 0, base_tag: str | None = None) -> Certificate | None:
    """(1 - delta)/2 * c(K x K°) via the translated copy ((1 - delta)/2) K.

    ``base`` defaults to the registry value for linear images of balls and
    cubes; without one the certificate is unresolved (None).
    """
    if base is None:
        known = dual_product_base(K)
        if known is None:
            return None
        base, base_tag = known
    rng = np.random.Generator(np.random.Philox(seed))
    s = (1 - delta) / 2
    inner = pr.sample_body(K, rng, samples - samples // 4) * s
    bnd = cv.boundary_samples(K, samples // 4, seed + 1) * s
    z = np.vstack([inner, bnd])
    img = f_delta(K, delta, z)
    ann = pr.Annulus(K, delta)
    failures = int(np.count_nonzero(~ann.contains(img)))
    return Certificate("lower", s * base, "holed-lower-translation", [base_tag or "registry"], 0.0,
                       len(z), failures, {"base": base, "scale": s})


# --------------------------------------------------------------------------
# upper bounds by non-squeezing


def upper_bound_nonsqueezing(m: SymplecticMapSpec, sampler, target_capacity: float, samples: int = 10_000,
                             tol: float = 1e-6, seed: int = 0, theorem: str = "nonsqueezing",
                             eps_report: float = 0.0) -> Certificate:
    """Certificate ``c <= target_capacity`` from a verified map into B^2(target) x R^{2n-2}.

    ``m.containment_target`` must test membership of the first target pair in
    the disk.  Any containment failure or defect above tol rejects it.
    """
    rep = verify_map(m, sampler, samples, tol, seed)
    failures = rep.containment_failures + int(rep.max_symplectic_defect > tol)
    return Certificate("upper", target_capacity, theorem, ["gromov-nonsqueezing"], rep.max_symplectic_defect,
                       rep.samples, failures, {"report": rep.to_dict(), "eps": eps_report})


def _disk_test(index: int, capacity: float):
    def test(p):
        p = np.asarray(p, dtype=float)
        return math.pi * (p[..., index] ** 2 + p[..., index + 1] ** 2) <= capacity * (1 + 1e-12)
    return test


def _factor_squeeze_map(n: int, perm, rect: SymplecticMapSpec, capacity: float, name: str) -> SymplecticMapSpec:
    """Permute standard coordinates into split pairs, then squeeze the first pair."""
    P = np.zeros((2 * n, 2 * n))
    for i, j in enumerate(perm):
        P[i, j] = 1.0

    def ev(q):
        q = np.asarray(q, dtype=float)
        w = q @ P.T
        return np.concatenate([rect.eval(w[..., :2]), w[..., 2:]], axis=-1)

    def jac(q):
        q = np.atleast_2d(np.asarray(q, dtype=float))
        w = q @ P.T
        B = np.broadcast_to(np.eye(2 * n), (len(q), 2 * n, 2 * n)).copy()
        B[:, :2, :2] = rect.analytic_jacobian(w[:, :2])
        return B @ P

    return SymplecticMapSpec(standard_chart(n), split_chart(n), ev, jac, _disk_test(0, capacity), name)


def annulus_upper_map(n: int, delta: float, eps: float = DEFAULT_EPS) -> SymplecticMapSpec:
    """Polar-coordinate map of (D^n \\ D^n(delta)) x_L D^n into B^2(2(1 - delta) + eps) x R^{2n-2}.

    Source chart (r, th, x_3.., p_r, p_th, y_3..); target chart
    (R, phi, X_2, Y_2, X_3, Y_3, ..).  The angular pair goes to
    R^2 = 2(1 + p_th), phi = -th; the pair (r, p_r) in
    [delta, 1] x [-1, 1] is squeezed onto the disk of area 2(1 - delta).
    """
    a = (1 - delta) / 2
    rect = ra.rect_to_disk(a, eps, center=((1 + delta) / 2, 0.0))
    cap = 4 * a + eps

    def ev(q):
        q = np.asarray(q, dtype=float)
        r, th, pr_, pth = q[..., 0], q[..., 1], q[..., n], q[..., n + 1]
        R = np.sqrt(2 * np.maximum(1 + pth, 0.0))
        w = rect.eval(np.stack([r, pr_], axis=-1))
        parts = [R[..., None], -th[..., None], w]
        for i in range(2, n):
            parts.append(np.stack([q[..., i], q[..., n + i]], axis=-1))
        return np.concatenate(parts, axis=-1)

    def jac(q):
        q = np.atleast_2d(np.asarray(q, dtype=float))
        N = len(q)
        J = np.zeros((N, 2 * n, 2 * n))
        R = np.sqrt(2 * (1 + q[:, n + 1]))
        J[:, 0, n + 1] = 1 / R
        J[:, 1, 1] = -1
        Jw = rect.analytic_jacobian(np.column_stack([q[:, 0], q[:, n]]))
        J[:, 2, 0], J[:, 2, n] = Jw[:, 0, 0], Jw[:, 0, 1]
        J[:, 3, 0], J[:, 3, n] = Jw[:, 1, 0], Jw[:, 1, 1]
        for i in range(2, n):
            J[:, 2 * i, i] = 1
            J[:, 2 * i + 1, n + i] = 1
        return J

    src = polar_cotangent_chart(n)
    src = Chart(src.name, 2 * n, src.form, lambda q: (q[..., 0] > R_MIN) & (1 + q[..., n + 1] > R_MIN))
    return SymplecticMapSpec(src, polar_first_chart(n), ev, jac, _disk_test(2, cap),
                             f"annulus_squeeze(n={n}, delta={delta:g})")


def to_polar_cotangent(pts, n: int) -> np.ndarray:
    """Cartesian (x, y) -> (r, th, x_3.., p_r, p_th, y_3..) in the (x_1, x_2) plane."""
    pts = np.asarray(pts, dtype=float)
    x, y = pts[..., :n], pts[..., n:]
    r = np.hypot(x[..., 0], x[..., 1])
    th = np.arctan2(x[..., 1], x[..., 0])
    with np.errstate(divide="ignore", invalid="ignore"):
        p_r = (x[..., 0] * y[..., 0] + x[..., 1] * y[..., 1]) / r
    p_th = x[..., 0] * y[..., 1] - x[..., 1] * y[..., 0]
    return np.concatenate([r[..., None], th[..., None], x[..., 2:], p_r[..., None], p_th[..., None], y[..., 2:]],
                          axis=-1)


def annulus_upper_certificate(n: int, delta: float, eps: float = DEFAULT_EPS, samples: int = 10_000,
                              seed: int = 0, tol: float = 1e-6) -> Certificate:
    dom = pr.standard_domain("annulus_disk", n=n, delta=delta)
    m = annulus_upper_map(n, delta, eps)

    def sampler(rng, k):
        return to_polar_cotangent(pr.sample_domain(dom, rng, k), n)

    cert = upper_bound_nonsqueezing(m, sampler, 2 * (1 - delta) + eps, samples, tol, seed,
                                    "nonsqueezing-polar-squeeze", eps)
    return cert


def swap_squeeze_certificate(domain: pr.LagrangianProductDomain, perm, a: float, eps: float = 0.0,
                             samples: int = 10_000, seed: int = 0, tol: float = 1e-6,
                             theorem: str = "nonsqueezing-swap") -> Certificate:
    """Upper bound 4a + eps when the first permuted pair ranges over [-a, a] x [-1, 1]."""
    rect = ra.rect_to_disk(a, eps)
    cap = 4 * a + eps
    m = _factor_squeeze_map(domain.dim, perm, rect, cap, f"swap_squeeze(a={a:g})")
    return upper_bound_nonsqueezing(m, lambda rng, k: pr.sample_domain(domain, rng, k), cap, samples, tol, seed,
                                    theorem, eps)


def upper_bound_biran_cube(n: int, lam: float, samples: int = 1000, seed: int = 0,
                           eps: float | None = None) -> Certificate:
    """Upper bound for the punctured cube x diamond from the embedding phi_lambda.

    phi_lambda sends lambda (cube x diamond) into B^{2n}(4) and the fiber over
    the origin into the Lagrangian disk, so by conformality
    ``lambda^2 c(punctured) <= c(B^{2n}(4) \\ L) = 2``.
    """
    if not 0 < lam < 1:
        raise PreconditionError("lambda must lie in (0, 1)")
    if eps is None:
        eps = (1 / lam - 1) / 2
    rng = np.random.Generator(np.random.Philox(seed))
    pts = ra.sample_lambda_cube_diamond(rng, samples, n, lam, x_zero_fraction=0.2)
    out = ra.phi_lambda_batch(n, lam, eps, pts)
    xz = out["x_zero"]
    failures = int(np.count_nonzero(~out["in_ball"]) + np.count_nonzero(~out["in_L"][xz])
                   + np.count_nonzero(~out["bound_ok"]))
    sig = ra.verify_sigma(ra.SigmaMap(n, eps), samples=max(samples, 1000), seed=seed + 1, lam=lam,
                          cells=20, grid=20, mc_samples=20_000)
    sig_fail = (sig["item1_restricted_failures"] + sig["item1_upper_failures"] + sig["item2_failures"]
                + int(sig["item3_coverage"] < 1.0))
    base = registry_lookup("biran_holed_ball", 4).value
    return Certificate("upper", base / lam ** 2, "barrier-cube-embedding",
                       ["biran-barrier", "conformality"], float(sig["max_area_defect"]), samples,
                       failures + sig_fail,
                       {"lambda": lam, "eps": eps, "bound_2_over_lambda": base / lam, "limit": base,
                        "x_zero_points": int(np.count_nonzero(xz)),
                        "sigma": {k: sig[k] for k in ("item1_restricted_failures", "item1_upper_failures",
                                                      "item2_failures", "item3_coverage")}})


def biran_lambda_for(eps: float) -> float:
    """lambda with 2 / lambda^2 = 2 + eps."""
    return math.sqrt(2 / (2 + eps))


# --------------------------------------------------------------------------
# pinched bodies


def pinched_product_bounds(K: ConvexBody, holed: bool = False) -> CapacityInterval:
    """Bounds from the ball sandwich D(k_min) x D(1/k_max) in K x K° in D(k_max) x D(1/k_min).

    The main interval is the square-root form ``base * sqrt(k_min/k_max)``
    to ``base * sqrt(k_max/k_min)``; the interval obtained directly from the
    sandwich and the balancing stretch, ``base * k_min/k_max`` to
    ``base * k_max/k_min``, is attached under ``extras['sandwich']``.
    """
    ext = cv.radial_extremes(K)
    q = ext.k_min / ext.k_max
    base = 2.0 if holed else 4.0
    sqrt_iv = (base * math.sqrt(q), base / math.sqrt(q))
    sandwich = (base * q, base / q)
    tag = "pinched-sqrt" if not holed else "pinched-sqrt-holed"
    certs = [Certificate("lower", sqrt_iv[0], tag, ["ostrover-bidisk"]),
             Certificate("upper", sqrt_iv[1], tag, ["ostrover-bidisk"])]
    return CapacityInterval(sqrt_iv[0], sqrt_iv[1], certs, extras={
        "sandwich": list(sandwich), "k_min": ext.k_min, "k_max": ext.k_max,
        "discrepancy": not math.isclose(sqrt_iv[0], sandwich[0], rel_tol=0, abs_tol=1e-12)})


def barrier_test(K: ConvexBody, method: str = "exact", samples: int = 1_000_000, seed: int = 0) -> dict:
    """left < mid <= right with left the holed upper bound, mid sqrt(Vol K Vol K°),
    right the full lower bound."""
    if K.dim != 2:
        raise PreconditionError("barrier test is planar")
    if not K.centrally_symmetric:
        raise PreconditionError("K must be centrally symmetric")
    rep = cv.pinching_report(K, PINCH_ALPHA)
    if not rep["is_alpha_pinched"]:
        raise PreconditionError(f"pinching ratio {rep['ratio']:.6g} exceeds (4/pi)^(2/3) = {PINCH_ALPHA:.6g}")
    holed = pinched_product_bounds(K, holed=True)
    full = pinched_product_bounds(K, holed=False)
    mid = cv.mahler_sqrt(K, method, samples, seed)
    left, right = holed.upper, full.lower
    s_left, s_right = holed.extras["sandwich"][1], full.extras["sandwich"][0]
    m, err = mid.value, mid.std_error
    return {
        "barrier_certified": bool(left < m <= right),
        "left": left, "mid": m, "right": right,
        "mid_std_error": err, "mid_method": mid.method,
        "robust": bool(left < m - 4 * err and m + 4 * err <= right),
        "ratio": rep["ratio"],
        "sandwich_left": s_left, "sandwich_right": s_right,
        "sandwich_certified": bool(s_left < m <= s_right),
    }


def biran_pinched_bounds(M, c_M: float) -> CapacityInterval:
    """Bounds for M minus the Lagrangian disk when M is strictly sqrt(2)-pinched.

    ``M`` is a ConvexBody in R^{2n} or a pair (m_min, m_max) of radii.
    """
    if isinstance(M, ConvexBody):
        ext = cv.radial_extremes(M)
        m_min, m_max = ext.k_min, ext.k_max
    else:
        m_min, m_max = map(float, M)
    if not (0 < m_min <= m_max) or not m_max < math.sqrt(2) * m_min:
        raise PreconditionError(f"pinching ratio {m_max / m_min:.6g} is not below sqrt(2)")
    sandwich = [math.pi * m_min ** 2 / 2, math.pi * m_max ** 2 / 2]
    certs = [Certificate("lower", c_M / 4, "biran-pinched", ["biran-barrier"]),
             Certificate("upper", c_M, "monotonicity", [])]
    return CapacityInterval(c_M / 4, c_M, certs, extras={
        "strict_upper": bool(c_M > math.pi * m_min ** 2), "sandwich": sandwich,
        "m_min": m_min, "m_max": m_max})


# --------------------------------------------------------------------------
# dispatcher


def _registry_cert(domain_id, *args, kind_both=True):
    k = registry_lookup(domain_id, *args)
    out = [Certificate("lower", k.value, "registry", [k.citation])]
    if kind_both:
        out.append(Certificate("upper", k.value, "registry", [k.citation]))
    return out


def _ball_sandwich_certs(K: ConvexBody, T: ConvexBody) -> list:
    """D(r_K) x D(r_T) <= K x T <= D(R_K) x D(R_T) with c(D(a) x D(b)) = 4ab."""
    eK, eT = cv.radial_extremes(K), cv.radial_extremes(T)
    return [Certificate("lower", 4 * eK.k_min * eT.k_min, "ball-sandwich", ["ostrover-bidisk", "monotonicity"]),
            Certificate("upper", 4 * eK.k_max * eT.k_max, "ball-sandwich", ["ostrover-bidisk", "monotonicity"])]


def _is_polar_pair(K: ConvexBody, T: ConvexBody, samples: int = 200) -> bool:
    if K.dim != T.dim:
        return False
    U = cv.sphere_grid(K.dim, samples if K.dim == 2 else 400)
    return bool(np.allclose(cv.support(T, U), cv.gauge(K, U), rtol=0, atol=1e-9))


def _inclusion_cert(value, theorem, inner_vertices, outer_body, axioms):
    """Lower bound from a polytope whose vertices lie in the outer body."""
    fails = int(np.count_nonzero(~cv.contains(outer_body, np.asarray(inner_vertices, dtype=float))))
    return Certificate("lower", value, theorem, axioms, 0.0, len(inner_vertices), fails)


def _a_min(dom: pr.LagrangianProductDomain):
    if dom.domain_id == "annulus_disk":
        return bl.annulus_min_action(dom.params["delta"], 8, n=min(dom.params["n"], 3))[0]
    if dom.domain_id == "punctured_cube_diamond" and dom.dim <= 3:
        n = dom.dim
        return bl.scatterer_min_action([[0.0] * n], cv.cube(1, n=n), cv.cross_polytope(1, n=n))[0]
    return None


def capacity_of(dom: pr.LagrangianProductDomain, eps: float = DEFAULT_EPS, samples: int = 10_000,
                seed: int = 0, tol: float = 1e-6, with_a_min: bool = True) -> CapacityInterval:
    """Intersect every applicable certificate for the domain."""
    if dom.scale != 1.0:
        base = pr.standard_domain(dom.domain_id, **_std_kwargs(dom)) if dom.domain_id in pr.STANDARD_IDS else None
        if base is None:
            raise InvalidArgument("scaled custom domains are not supported; scale the bodies instead")
        iv = capacity_of(base, eps / dom.scale ** 2, samples, seed, tol, with_a_min)
        return iv.scaled(dom.scale ** 2)
    did, p, n = dom.domain_id, dom.params, dom.dim
    certs: list = []
    extras: dict = {}
    if did == "disk_disk":
        certs += _registry_cert("disk_disk", n)
    elif did == "cube_diamond":
        certs += _registry_cert("cube_diamond", n)
    elif did == "annulus_disk":
        delta = p["delta"]
        c = lower_bound_holed(cv.ball(1, n), delta, samples=samples, seed=seed)
        certs.append(c)
        certs.append(annulus_upper_certificate(n, delta, eps, samples, seed + 1, tol))
        certs.append(Certificate("upper", 4.0, "monotonicity", ["ostrover-bidisk"]))
    elif did == "punctured_cube_diamond":
        certs.append(lower_bound_holed(cv.cube(1, n=n), 0.0, samples=samples, seed=seed))
        certs.append(upper_bound_biran_cube(n, biran_lambda_for(eps), min(samples, 2000), seed + 2))
        certs.append(Certificate("upper", 4.0, "monotonicity", ["ramos-cube-diamond"]))
    elif did == "disk_square":
        # swap (x, y) -> (y, -x) carries diamond x_L square onto square x_L diamond
        diamond_vertices = cv.polytope_vertices(cv.cross_polytope(1, n=2))
        certs.append(_inclusion_cert(4.0, "inclusion-diamond", diamond_vertices, cv.ball(1, 2),
                                     ["ramos-cube-diamond"]))
        certs.append(swap_squeeze_certificate(dom, (0, 2, 1, 3), 1.0, 0.0, samples, seed + 3, tol))
    elif did == "a_r_diamond":
        square = cv.polytope_vertices(cv.cube(1, n=2)) + np.array([1.0, 0.0])
        certs.append(_inclusion_cert(4.0, "inclusion-translated-square", square, dom.position,
                                     ["ramos-cube-diamond"]))
        certs.append(swap_squeeze_certificate(dom, (1, 3, 0, 2), 1.0, 0.0, samples, seed + 4, tol))
        extras["swap"] = "(x2, y2, x1, y1)"
    elif did == "rect_diamond":
        a, b = p["a"], p["b"]
        m = min(a, b)
        certs.append(_inclusion_cert(4 * m, "inclusion-square-stretch", cv.polytope_vertices(cv.cube(m, m)),
                                     dom.position, ["ramos-cube-diamond", "conformality"]))
        perm = (0, 2, 1, 3) if a <= b else (1, 3, 0, 2)
        certs.append(swap_squeeze_certificate(dom, perm, m, 0.0, samples, seed + 5, tol))
    else:
        certs += _generic_certs(dom, samples, seed)
    a_min = _a_min(dom) if with_a_min else None
    return intersect([c for c in certs if c is not None], a_min, extras)


def _std_kwargs(dom):
    p = dict(dom.params)
    if "delta" in p or dom.domain_id in ("disk_disk", "cube_diamond", "punctured_cube_diamond"):
        p.setdefault("n", dom.dim)
    return p


def _generic_certs(dom: pr.LagrangianProductDomain, samples: int, seed: int) -> list:
    K = pr.position_body(dom.position)
    T = dom.momentum
    full = []
    if _is_polar_pair(K, T):
        known = dual_product_base(K)
        if known is not None:
            full = [Certificate("lower", known[0], "dual-product-linear-image", [known[1]]),
                    Certificate("upper", known[0], "dual-product-linear-image", [known[1]])]
    if not full:
        full = _ball_sandwich_certs(K, T)
    if not dom.is_holed:
        return full
    lower_full = max(c.value for c in full if c.kind == "lower")
    out = [c for c in full if c.kind == "upper"]  # monotonicity
    pos = dom.position
    if isinstance(pos, pr.Annulus):
        delta = pos.delta
    elif all(np.allclose(q, 0) for q in pos.removed_points):
        delta = 0.0
    else:
        return out
    if K.centrally_symmetric:
        c = lower_bound_holed(K, delta, base=lower_full, samples=samples, seed=seed,
                              base_tag=full[0].theorem)
        out.append(c)
    return out
