"""Explicit area-preserving plane maps built by transport along nested curves.

Two constructions live here.

``rect_to_disk`` sends a closed rectangle onto the closed disk of the same
area.  Both are star-shaped about their centers and the nested family is the
homothetic one, so matching the cone measure ``|b x b'| dt`` along the
boundaries gives a map with Jacobian determinant exactly one.

``SigmaMap`` sends the disk ``B^2(4) = {pi |z|^2 < 4}`` into a slightly tall
square.  The circle of action ``a = pi |z|^2`` goes to the boundary of the
rectangle ``{|x| <= X(a), |y| <= H(a)}`` with ``X(a) = 1 - w + w a / 8`` and
``H(a) = a / (4 X(a))``, so the enclosed area is exactly ``a``.  The angle is
matched to the normal-flux measure of the moving boundary, which makes the
map area preserving; its horizontal bars satisfy
``a/4 <= |y| < a/4 + eps/n``.  As ``a -> 0`` the rectangles flatten onto the
segment ``|x| <= 1 - w`` and the center is sent to the origin by convention.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidArgument, PreconditionError
from .symplectic import Chart, SymplecticMapSpec, standard_chart, verify_map

TWO_PI = 2 * math.pi


# --------------------------------------------------------------------------
# rectangle -> disk


def rect_to_disk(a: float, eps: float, center=(0.0, 0.0), half_height: float = 1.0) -> SymplecticMapSpec:
    """Area-preserving map of ``center + [-a,a] x [-H,H]`` onto the disk of area 4aH.

    The returned spec's containment target is ``B^2(4aH + eps)`` centered at
    the origin.
    """
    if a <= 0 or eps < 0 or half_height <= 0:
        raise InvalidArgument("rect_to_disk needs a > 0, H > 0 and eps >= 0")
    H = float(half_height)
    cx, cy = (float(c) for c in center)
    area = 4 * a * H
    rho2 = area / math.pi  # squared radius of the target disk

    def regions(u, v):
        side = np.abs(u) / a >= np.abs(v) / H
        return side & (u > 0), side & (u <= 0), ~side & (v > 0), ~side & (v <= 0)

    def ev(q):
        q = np.asarray(q, dtype=float)
        u, v = q[..., 0] - cx, q[..., 1] - cy
        right, left, top, bottom = regions(u, v)
        s = np.maximum(np.abs(u) / a, np.abs(v) / H)
        with np.errstate(divide="ignore", invalid="ignore"):
            psi = np.select(
                [right, left, top, bottom],
                [a * a * v / u, 4 * a * H + a * a * v / u,
                 2 * a * H - H * H * u / v, 6 * a * H - H * H * u / v],
            ) / rho2
        psi = np.where(s == 0, 0.0, psi)
        r = s * math.sqrt(rho2)
        return np.stack([r * np.cos(psi), r * np.sin(psi)], axis=-1)

    def jac(q):
        q = np.atleast_2d(np.asarray(q, dtype=float))
        u, v = q[:, 0] - cx, q[:, 1] - cy
        right, left, top, bottom = regions(u, v)
        side = right | left
        psi_pts = ev(q)
        psi = np.arctan2(psi_pts[:, 1], psi_pts[:, 0])
        s = np.maximum(np.abs(u) / a, np.abs(v) / H)
        with np.errstate(divide="ignore", invalid="ignore"):
            ds = np.where(side[:, None], np.column_stack([np.sign(u) / a, 0 * u]),
                          np.column_stack([0 * v, np.sign(v) / H]))
            dpsi = np.where(side[:, None],
                            (a * a / rho2) * np.column_stack([-v / u ** 2, 1 / u]),
                            (-H * H / rho2) * np.column_stack([1 / v, -u / v ** 2]))
        c = np.column_stack([np.cos(psi), np.sin(psi)])
        t = np.column_stack([-np.sin(psi), np.cos(psi)])
        rho = math.sqrt(rho2)
        return rho * (np.einsum("ni,nj->nij", c, ds) + s[:, None, None] * np.einsum("ni,nj->nij", t, dpsi))

    def in_rect(q):
        q = np.asarray(q, dtype=float)
        return (np.abs(q[..., 0] - cx) <= a * (1 + 1e-12)) & (np.abs(q[..., 1] - cy) <= H * (1 + 1e-12))

    def in_disk(p):
        p = np.asarray(p, dtype=float)
        return math.pi * np.sum(p ** 2, axis=-1) <= (area + eps) * (1 + 1e-12)

    chart = standard_chart(1)
    src = Chart("rectangle", 2, chart.form, in_rect)
    return SymplecticMapSpec(src, chart, ev, jac, in_disk, f"rect_to_disk(a={a:g}, eps={eps:g})")


# --------------------------------------------------------------------------
# the disk -> square map sigma


@dataclass(frozen=True)
class SigmaMap:
    """Nested-rectangle transport of ``B^2(4)`` used to build ``phi_lambda``."""

    n: int
    eps: float

    def __post_init__(self):
        if self.n < 1 or not 0 < self.eps < 1:
            raise InvalidArgument("SigmaMap needs n >= 1 and 0 < eps < 1")

    @property
    def w(self) -> float:
        return self.eps / (2 * self.n)

    def X(self, a):
        return 1 - self.w + self.w * np.asarray(a, dtype=float) / 8

    def H(self, a):
        return np.asarray(a, dtype=float) / (4 * self.X(a))

    @property
    def dX(self) -> float:
        return self.w / 8

    def dH(self, a):
        return (1 - self.w) / (4 * self.X(a) ** 2)

    def curve_points(self, a: float, m: int, corners: bool = False) -> np.ndarray:
        """Images of ``m`` equally spaced points of the circle of action ``a``.

        With ``corners`` the flux parameters of the four corners are added, so
        the polygon is exactly the curve and its shoelace area is ``a``.
        """
        if not corners:
            phi = TWO_PI * np.arange(m) / m
            r = math.sqrt(a / math.pi)
            return sigma(self, np.column_stack([r * np.cos(phi), r * np.sin(phi)]))
        sv = float(self.H(a)) * self.dX
        s = np.unique(np.concatenate([np.arange(m) / m - 0.5, [sv, -sv, 0.5 - sv, -(0.5 - sv), 0.5]]))
        x, y = _sigma_from_action_angle(self, a, s)
        return np.column_stack([x, y])


def _sigma_from_action_angle(sm: SigmaMap, a, s):
    """Point of the curve ``gamma_a`` at flux fraction ``s`` in (-1/2, 1/2]."""
    X, H, dX, dH = sm.X(a), sm.H(a), sm.dX, sm.dH(a)
    sv = H * dX
    right = np.abs(s) <= sv
    top = (s > sv) & (s < 0.5 - sv)
    bottom = (s < -sv) & (s > -(0.5 - sv))
    left = ~(right | top | bottom)
    x = np.select([right, top, bottom, left], [X, (0.25 - s) / dH, (s + 0.25) / dH, -X])
    y_left = np.where(s > 0, 0.5 - s, -0.5 - s) / dX
    y = np.select([right, top, bottom, left], [s / dX, H, -H, y_left])
    return x, y


def sigma(sm: SigmaMap, z) -> np.ndarray:
    """Apply sigma to points ``z`` of shape (..., 2) in ``B^2(4)``."""
    z = np.asarray(z, dtype=float)
    a = math.pi * np.sum(z ** 2, axis=-1)
    if np.any(a >= 4 * (1 + 1e-12)):
        raise DomainError("sigma is defined on B^2(4) = {pi |z|^2 < 4}")
    s = np.arctan2(z[..., 1], z[..., 0]) / TWO_PI
    x, y = _sigma_from_action_angle(sm, a, s)
    center = a == 0
    x = np.where(center, 0.0, x)
    y = np.where(center, 0.0, y)
    return np.stack([x, y], axis=-1)


def sigma_action_level(sm: SigmaMap, p) -> np.ndarray:
    """Action a with p on gamma_a (closed form); 0 on the collapsed segment."""
    p = np.asarray(p, dtype=float)
    ax, ay = np.abs(p[..., 0]), np.abs(p[..., 1])
    w = sm.w
    a_side = 8 * (ax - (1 - w)) / w
    a_bar = 4 * ay * (1 - w) / (1 - ay * w / 2)
    return np.maximum(np.maximum(a_side, a_bar), 0.0)


def sigma_action_level_bisect(sm: SigmaMap, p, tol: float = 1e-12) -> np.ndarray:
    """Same level found by bisection on the nesting, used as an independent check."""
    p = np.atleast_2d(np.asarray(p, dtype=float))
    lo = np.zeros(len(p))
    hi = np.full(len(p), 8.0)
    ax, ay = np.abs(p[:, 0]), np.abs(p[:, 1])
    while np.max(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        with np.errstate(divide="ignore"):
            g = np.maximum(ax / sm.X(mid), np.where(ay > 0, ay / np.maximum(sm.H(mid), 1e-300), 0.0))
        inside = g <= 1
        hi = np.where(inside, mid, hi)
        lo = np.where(inside, lo, mid)
    return hi


def sigma_inverse(sm: SigmaMap, p) -> np.ndarray:
    """Preimage in B^2(4); points of the collapsed segment go to the center."""
    p = np.asarray(p, dtype=float)
    x, y = p[..., 0], p[..., 1]
    a = sigma_action_level(sm, p)
    if np.any(a >= 4):
        raise DomainError("point is outside the image of sigma")
    on_side = 8 * (np.abs(x) - (1 - sm.w)) / sm.w >= 4 * np.abs(y) * (1 - sm.w) / (1 - np.abs(y) * sm.w / 2)
    dH = sm.dH(a)
    s_bar = np.where(y > 0, 0.25 - x * dH, -0.25 + x * dH)
    s_side = np.where(x > 0, y * sm.dX, np.where(y >= 0, 0.5 - y * sm.dX, -0.5 - y * sm.dX))
    s = np.where(on_side, s_side, s_bar)
    r = np.sqrt(a / math.pi)
    u = r * np.cos(TWO_PI * s)
    v = r * np.sin(TWO_PI * s)
    # the vertical axis is kept exactly: x = 0 on a bar means angle +-pi/2
    axis = (x == 0) & ~on_side
    u = np.where(axis, 0.0, u)
    v = np.where(axis, np.sign(y) * r, v)
    return np.stack([u, v], axis=-1)


def sigma_spec(sm: SigmaMap, margin: float = 2e-4) -> SymplecticMapSpec:
    """Sigma as a map spec; the chart excludes a thin band around the
    parameter switches (corners of the curves) and the collapsed center."""

    def domain(z):
        z = np.asarray(z, dtype=float)
        a = math.pi * np.sum(z ** 2, axis=-1)
        s = np.arctan2(z[..., 1], z[..., 0]) / TWO_PI
        sv = sm.H(a) * sm.dX
        switches = np.stack([sv, -sv, 0.5 - sv, -(0.5 - sv)], axis=-1)
        near = np.min(np.abs(s[..., None] - switches), axis=-1) < margin
        # the branch cut of atan2 (|s| = 1/2) lies inside the left side; keep away from it too
        return (a < 4) & (a > 1e-3) & ~near & (np.abs(np.abs(s) - 0.5) > margin)

    chart = standard_chart(1)
    return SymplecticMapSpec(Chart("B2(4)", 2, chart.form, domain), chart,
                             lambda z: sigma(sm, z), name=f"sigma(n={sm.n}, eps={sm.eps:g})")


def _uniform_disk(rng, count, area=4.0):
    a = area * rng.random(count)
    phi = TWO_PI * rng.random(count)
    r = np.sqrt(a / math.pi)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi)])


def shoelace(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def verify_sigma(sm: SigmaMap, samples: int = 10_000, tol: float = 1e-6, seed: int = 0,
                 lam: float | None = None, cells: int = 100, grid: int = 60,
                 curve_points: int = 8192, mc_samples: int = 200_000) -> dict:
    """Check the listed properties of sigma on random samples.

    * area transport: image area of each annular cell, measured by the
      shoelace formula on images of densely sampled circles, against the
      cell area; and the Jacobian determinant by finite differences
    * lower/upper bounds on |y| (the lower bound only where |x| < 1 - w)
    * the vertical axis is preserved
    * a grid of the square used by phi_lambda has preimages in B^2(4)
    """
    if samples < 1000:
        raise InvalidArgument("verify_sigma needs at least 1000 samples")
    n, eps, w = sm.n, sm.eps, sm.w
    if lam is None:
        lam = (1.0 / (1.0 + eps)) * (1 - 1e-9)
    rng = np.random.Generator(np.random.Philox(seed))
    z = _uniform_disk(rng, samples)
    a = math.pi * np.sum(z ** 2, axis=1)
    p = sigma(sm, z)
    ay = np.abs(p[:, 1])
    inner = np.abs(p[:, 0]) < 1 - w
    lower_ok = ay >= a / 4
    upper_ok = ay < a / 4 + eps / n
    in_box = (np.abs(p[:, 0]) < 1) & (ay < 1 + eps / n)

    # vertical axis
    t = 4 * rng.random(samples)
    sgn = np.where(rng.random(samples) < 0.5, -1.0, 1.0)
    axis_pts = np.column_stack([np.zeros(samples), sgn * np.sqrt(t / math.pi)])
    axis_img = sigma(sm, axis_pts)
    item2_failures = int(np.count_nonzero(axis_img[:, 0] != 0.0))

    # grid coverage (midpoint grid: the collapsed row y = 0 is never hit)
    hy = lam * (1 + eps / n)
    gx = lam * (2 * (np.arange(grid) + 0.5) / grid - 1)
    gy = hy * (2 * (np.arange(grid) + 0.5) / grid - 1)
    G = np.array(np.meshgrid(gx, gy, indexing="ij")).reshape(2, -1).T
    level = sigma_action_level(sm, G)
    covered = level < 4
    pre = sigma_inverse(sm, G[covered])
    roundtrip = float(np.max(np.linalg.norm(sigma(sm, pre) - G[covered], axis=1))) if covered.any() else 0.0
    coverage = float(np.count_nonzero(covered)) / len(G)

    # area transport per annular cell
    levels = np.linspace(0, 4, cells + 1)
    enclosed = np.array([0.0] + [shoelace(sm.curve_points(lv * (1 - 1e-15), curve_points))
                                 for lv in levels[1:]])
    cell_area = np.diff(levels)
    cell_err = np.abs(np.diff(enclosed) - cell_area) / cell_area
    # Monte Carlo total image area over the bounding box
    box = np.array([2.0, 2 * (1 + eps / n)])
    q = (rng.random((mc_samples, 2)) - 0.5) * box
    hit = sigma_action_level(sm, q) < 4
    frac = np.count_nonzero(hit) / mc_samples
    mc_area = frac * box.prod()
    mc_err = box.prod() * math.sqrt(frac * (1 - frac) / mc_samples)

    rep = verify_map(sigma_spec(sm), lambda r, k: _uniform_disk(r, k), samples, tol, seed + 1)
    return {
        "samples": samples,
        "item1_restricted_failures": int(np.count_nonzero(inner & ~(lower_ok & upper_ok))),
        "item1_unrestricted_lower_violations": int(np.count_nonzero(~lower_ok)),
        "item1_upper_failures": int(np.count_nonzero(~upper_ok)),
        "image_outside_box": int(np.count_nonzero(~in_box)),
        "item2_failures": item2_failures,
        "item3_coverage": coverage,
        "item3_roundtrip_max": roundtrip,
        "cell_area_max_rel_error": float(cell_err.max()),
        "mc_image_area": mc_area,
        "mc_image_area_std": mc_err,
        "max_area_defect": rep.max_area_defect,
        "jacobian_samples": rep.samples,
        "lam": lam,
    }


# --------------------------------------------------------------------------
# phi_lambda = (sigma x ... x sigma)^{-1} on lambda (cube x diamond)


def _check_phi_args(n, lam, eps):
    if not 0 < lam < 1:
        raise PreconditionError("lambda must lie in (0, 1)")
    if not 0 < eps < 1 / lam - 1:
        raise PreconditionError(f"eps must lie in (0, 1/lambda - 1) = (0, {1 / lam - 1:.6g})")


def phi_lambda_batch(n: int, lam: float, eps: float, pts) -> dict:
    """Preimages under the n-fold product of sigma for points of lambda(cube x diamond).

    ``pts`` has shape (N, 2n) in Lagrangian order (x_1..x_n, y_1..y_n).  The
    preimages are returned in split order (u_1, v_1, ..., u_n, v_n).
    """
    _check_phi_args(n, lam, eps)
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if pts.shape[1] != 2 * n:
        raise InvalidArgument(f"points must have dimension {2 * n}")
    x, y = pts[:, :n], pts[:, n:]
    tol = 1e-12
    if np.any(np.abs(x) > lam * (1 + tol)) or np.any(np.sum(np.abs(y), axis=1) > lam * (1 + tol)):
        raise PreconditionError("point outside lambda (cube x diamond)")
    sm = SigmaMap(n, eps)
    planes = np.stack([x, y], axis=-1)  # (N, n, 2)
    z = sigma_inverse(sm, planes)
    actions = math.pi * np.sum(z ** 2, axis=-1)  # (N, n)
    total = actions.sum(axis=1)
    xzero = np.all(x == 0, axis=1)
    return {
        "preimage": z.reshape(len(pts), 2 * n),
        "quarter_action": total / 4,
        "y_l1": np.sum(np.abs(y), axis=1),
        "in_ball": total < 4,
        "bound_ok": total / 4 <= np.sum(np.abs(y), axis=1) * (1 + 1e-12),
        "x_zero": xzero,
        "in_L": xzero & np.all(z[..., 0] == 0, axis=1) & (total < 4),
    }


def phi_lambda_check(n: int, lam: float, eps: float, pt) -> dict:
    """Single-point version of :func:`phi_lambda_batch`."""
    out = phi_lambda_batch(n, lam, eps, np.asarray(pt, dtype=float)[None, :])
    return {k: (v[0] if np.ndim(v) else v) for k, v in out.items()}


def sample_lambda_cube_diamond(rng, count: int, n: int, lam: float, x_zero_fraction: float = 0.0):
    """Uniform points of lambda (cube x diamond); a fraction is put on {x = 0}."""
    x = lam * (2 * rng.random((count, n)) - 1)
    # uniform on the l1 ball: exponential spacings with random signs
    e = rng.exponential(size=(count, n + 1))
    y = e[:, :n] / e.sum(axis=1, keepdims=True)
    y *= np.where(rng.random((count, n)) < 0.5, -1.0, 1.0) * lam
    if x_zero_fraction > 0:
        k = int(count * x_zero_fraction)
        x[:k] = 0.0
    return np.hstack([x, y])
