"""Closed (Minkowski) billiard orbits and their minimal action.

A trajectory in a table K with geometry body T is a closed polygon whose
vertices lie on the boundary components; its action is
``sum_j h_T(q_{j+1} - q_j)``.  Critical polygons of the action are the
billiard orbits; for T the unit ball they obey the usual reflection law.

Planar tables are parameterized boundary by boundary (angle for round and
elliptic boundaries, perimeter for polygons) and critical points are found by
a batched damped Newton iteration on the parameters.
"""
from __future__ import annotations

import csv
import io
import math
import zlib
from dataclasses import dataclass, field
from itertools import product

import numpy as np
from scipy import optimize
from scipy.spatial import ConvexHull

from . import convex as cv
from .convex import ConvexBody
from .errors import DomainError, InvalidArgument

TWO_PI = 2 * math.pi


# --------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class ScaledObstacle:
    """The copy ``delta * outer`` removed from the table."""

    delta: float


@dataclass(frozen=True)
class PointObstacle:
    """A point scatterer; orbits hitting it reverse direction."""

    point: tuple


@dataclass(frozen=True)
class BilliardTable:
    outer: ConvexBody
    obstacles: tuple = ()
    geometry: ConvexBody | None = None

    def __post_init__(self):
        if self.geometry is None:
            object.__setattr__(self, "geometry", cv.ball(1.0, self.outer.dim))
        if self.geometry.dim != self.outer.dim:
            raise InvalidArgument("geometry body and table must have the same dimension")
        seen = set()
        for ob in self.obstacles:
            if isinstance(ob, ScaledObstacle):
                if not 0 < ob.delta < 1:
                    raise InvalidArgument("scaled obstacle needs delta in (0, 1)")
            elif isinstance(ob, PointObstacle):
                p = np.asarray(ob.point, dtype=float)
                if p.shape != (self.outer.dim,) or not cv.gauge(self.outer, p) < 1:
                    raise InvalidArgument("point obstacles must lie strictly inside the table")
                if ob.point in seen:
                    raise InvalidArgument("point obstacles must be distinct")
                seen.add(ob.point)
            else:
                raise InvalidArgument(f"unknown obstacle {ob!r}")

    def component(self, label: str):
        if label == "outer":
            return None
        if label.startswith("obstacle"):
            return self.obstacles[int(label[len("obstacle"):])]
        raise InvalidArgument(f"unknown component label {label!r}")


@dataclass
class BilliardTrajectory:
    bounce_points: np.ndarray
    component_labels: list
    chord_lengths: np.ndarray
    action: float
    central_angles: np.ndarray | None = None

    @property
    def k(self) -> int:
        return len(self.bounce_points)

    def to_dict(self) -> dict:
        return {
            "action": float(self.action),
            "k": self.k,
            "labels": list(self.component_labels),
            "bounce_points": np.asarray(self.bounce_points).tolist(),
            "chord_lengths": np.asarray(self.chord_lengths).tolist(),
        }


@dataclass
class CriticalOrbitReport:
    trajectory: BilliardTrajectory | None
    gradient_norm: float
    multipliers: list = field(default_factory=list)
    slacks: list = field(default_factory=list)
    converged: bool = False
    extras: dict = field(default_factory=dict)


def make_trajectory(T: ConvexBody, points, labels) -> BilliardTrajectory:
    P = np.asarray(points, dtype=float)
    D = np.roll(P, -1, axis=0) - P
    chords = np.linalg.norm(D, axis=1)
    return BilliardTrajectory(P, list(labels), chords, minkowski_action(T, P))


def minkowski_action(T: ConvexBody, polygon) -> float:
    """Cyclic sum of h_T over consecutive differences."""
    P = np.asarray(polygon, dtype=float)
    if P.ndim != 2 or len(P) < 2:
        raise InvalidArgument("a closed polygon needs at least 2 vertices")
    D = np.roll(P, -1, axis=0) - P
    nz = np.linalg.norm(D, axis=1) > 0
    return float(np.sum(cv.support(T, D[nz]))) if nz.any() else 0.0


def trajectory_csv(trajs) -> str:
    """CSV rows ``index,x,y[,z],component_label`` (header only when empty)."""
    trajs = list(trajs)
    dim = trajs[0].bounce_points.shape[1] if trajs else 2
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "x", "y", "z"][: dim + 1] + ["component_label"])
    i = 0
    for t in trajs:
        for p, lab in zip(t.bounce_points, t.component_labels):
            w.writerow([i] + [repr(float(c)) for c in p] + [lab])
            i += 1
    return buf.getvalue()


# --------------------------------------------------------------------------
# disk orbits


def disk_orbit(k: int, m: int = 1) -> BilliardTrajectory:
    """Regular star polygon with k vertices and rotation number m on the unit circle."""
    if k < 2 or m < 1 or math.gcd(k, m) != 1 or not (2 * m < k or (k, m) == (2, 1)):
        raise InvalidArgument(f"invalid (k, m) = ({k}, {m}) for a periodic disk orbit")
    phi = TWO_PI * m * np.arange(k) / k
    P = np.column_stack([np.cos(phi), np.sin(phi)])
    tr = make_trajectory(cv.ball(1, 2), P, ["outer"] * k)
    tr.central_angles = np.full(k, TWO_PI * m / k)
    tr.action = 2 * k * math.sin(math.pi * m / k)
    return tr


# --------------------------------------------------------------------------
# boundary parameterizations (planar)


class _Curve:
    """Boundary of ``scale * body`` as a periodic curve."""

    def __init__(self, body: ConvexBody, scale: float = 1.0):
        if body.dim != 2:
            raise InvalidArgument("boundary parameterization is planar")
        self.body, self.scale = body, scale
        self.kind = body.kind
        if cv.is_polytopal(body):
            V = cv.polytope_vertices(body)
            hull = ConvexHull(V)
            V = V[hull.vertices]  # counter-clockwise in 2D
            E = np.roll(V, -1, axis=0) - V
            L = np.linalg.norm(E, axis=1)
            self.V, self.E, self.cum = V, E / L[:, None], np.concatenate([[0.0], np.cumsum(L)])
            self.period = float(self.cum[-1])
        else:
            self.period = TWO_PI

    def point(self, t):
        t = np.asarray(t, dtype=float)
        s = self.scale
        if self.kind == "ball":
            r = self.body.params[0]
            return s * r * np.stack([np.cos(t), np.sin(t)], axis=-1)
        if self.kind == "ellipsoid":
            a, b = self.body.params
            return s * np.stack([a * np.cos(t), b * np.sin(t)], axis=-1)
        if hasattr(self, "V"):
            tt = np.mod(t, self.period)
            i = np.clip(np.searchsorted(self.cum, tt, side="right") - 1, 0, len(self.V) - 1)
            return s * (self.V[i] + (tt - self.cum[i])[..., None] * self.E[i])
        u = np.stack([np.cos(t), np.sin(t)], axis=-1)
        return s * u / cv.gauge(self.body, u)[..., None]

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        s = self.scale
        if self.kind == "ball":
            r = self.body.params[0]
            return s * r * np.stack([-np.sin(t), np.cos(t)], axis=-1)
        if self.kind == "ellipsoid":
            a, b = self.body.params
            return s * np.stack([-a * np.sin(t), b * np.cos(t)], axis=-1)
        if hasattr(self, "V"):
            tt = np.mod(t, self.period)
            i = np.clip(np.searchsorted(self.cum, tt, side="right") - 1, 0, len(self.V) - 1)
            return s * self.E[i]
        h = 1e-6
        return (self.point(t + h) - self.point(t - h)) / (2 * h)

    def param_of(self, x):
        """Parameter of the boundary point closest in angle to x."""
        x = np.asarray(x, dtype=float)
        ang = np.arctan2(x[..., 1], x[..., 0])
        if self.kind == "ellipsoid":
            a, b = self.body.params
            return np.arctan2(x[..., 1] / b, x[..., 0] / a)
        if hasattr(self, "V"):
            grid = np.linspace(0, self.period, 4097)[:-1]
            pts = self.point(grid)
            d = np.abs(np.angle(np.exp(1j * (np.arctan2(pts[:, 1], pts[:, 0])[None, :] - np.atleast_1d(ang)[:, None]))))
            return grid[np.argmin(d, axis=1)].reshape(np.shape(ang))
        return ang


def _grad_h(T, v):
    """Gradient of h_T at v (a support point); zero for zero vectors."""
    nz = np.linalg.norm(v, axis=-1, keepdims=True) > 1e-300
    safe = np.where(nz, v, 1.0)
    return np.where(nz, cv.support_point(T, safe), 0.0)


class _ActionProblem:
    """Action of closed polygons with vertices on assigned components."""

    def __init__(self, table: BilliardTable, labels):
        self.table, self.labels = table, list(labels)
        self.k = len(self.labels)
        if self.k < 2:
            raise InvalidArgument("orbits need at least 2 bounces")
        self.T = table.geometry
        self.fixed = {}
        self.curves = {}
        self.var_idx = []
        scales = []
        self.base = _Curve(table.outer, 1.0)
        for j, lab in enumerate(self.labels):
            comp = table.component(lab)
            if isinstance(comp, PointObstacle):
                self.fixed[j] = np.asarray(comp.point, dtype=float)
            else:
                scale = 1.0 if comp is None else comp.delta
                self.curves[j] = _Curve(table.outer, scale)
                self.var_idx.append(j)
                scales.append(scale)
        self.scales = np.asarray(scales)[None, :, None]
        self.m = len(self.var_idx)

    def points(self, x):
        x = np.atleast_2d(x)
        P = np.zeros((len(x), self.k, 2))
        for j, p in self.fixed.items():
            P[:, j] = p
        if self.var_idx:
            P[:, self.var_idx] = self.scales * self.base.point(x)
        return P

    def action(self, x):
        P = self.points(x)
        D = np.roll(P, -1, axis=1) - P
        return np.sum(cv.support(self.T, np.where(np.linalg.norm(D, axis=-1, keepdims=True) > 0, D, 1.0))
                      * (np.linalg.norm(D, axis=-1) > 0), axis=1)

    def grad(self, x):
        x = np.atleast_2d(x)
        P = self.points(x)
        fwd = np.roll(P, -1, axis=1) - P  # q_{j+1} - q_j
        G = _grad_h(self.T, fwd)
        g_in = np.roll(G, 1, axis=1)  # grad h(q_j - q_{j-1})
        dP = self.scales * self.base.deriv(x)
        return np.sum((g_in[:, self.var_idx] - G[:, self.var_idx]) * dP, axis=-1)

    def hessian(self, x, h=1e-6):
        x = np.atleast_2d(x)
        S, m = x.shape
        H = np.zeros((S, m, m))
        for c in range(m):
            e = np.zeros(m)
            e[c] = h
            H[:, :, c] = (self.grad(x + e) - self.grad(x - e)) / (2 * h)
        return 0.5 * (H + np.transpose(H, (0, 2, 1)))


def _newton_batch(prob: _ActionProblem, x0, tol=1e-9, max_iter=60):
    x = np.array(x0, dtype=float)
    g = prob.grad(x)
    gn = np.linalg.norm(g, axis=1)
    for _ in range(max_iter):
        active = gn > tol
        if not active.any():
            break
        H = prob.hessian(x[active])
        step = -np.einsum("nij,nj->ni", np.linalg.pinv(H, rcond=1e-10), g[active])
        xa, ga, gna = x[active], g[active], gn[active]
        t = np.ones(len(xa))
        accepted = np.zeros(len(xa), dtype=bool)
        for _ in range(12):
            trial = xa + t[:, None] * step
            gt = prob.grad(trial)
            gnt = np.linalg.norm(gt, axis=1)
            ok = (gnt < gna) & ~accepted
            xa = np.where(ok[:, None], trial, xa)
            ga = np.where(ok[:, None], gt, ga)
            new_gn = np.where(ok, gnt, gna)
            accepted |= ok
            gna = new_gn
            if accepted.all():
                break
            t = np.where(accepted, t, t / 2)
        # a failed line search falls back to a small gradient step
        stuck = ~accepted
        if stuck.any():
            xs = xa[stuck] - 1e-3 * ga[stuck]
            xa[stuck] = xs
            ga[stuck] = prob.grad(xs)
            gna[stuck] = np.linalg.norm(ga[stuck], axis=1)
        x[active], g[active], gn[active] = xa, ga, gna
    return x, gn


def _polish_root(prob: _ActionProblem, x, tol):
    sol = optimize.root(lambda v: prob.grad(v[None, :])[0], x, method="hybr", options={"xtol": 1e-14})
    gn = float(np.linalg.norm(prob.grad(sol.x[None, :])[0]))
    return sol.x, gn


# --------------------------------------------------------------------------
# orbit checks


def _segment_min_gauge(body: ConvexBody, a, b, samples: int = 257) -> float:
    if body.kind == "ball":
        d = b - a
        t = np.clip(-np.dot(a, d) / max(np.dot(d, d), 1e-300), 0, 1)
        return float(np.linalg.norm(a + t * d) / body.params[0])
    t = np.linspace(0, 1, samples)
    pts = a[None, :] + t[:, None] * (b - a)[None, :]
    g = cv.gauge(body, pts)
    i = int(np.argmin(g))
    lo, hi = t[max(i - 1, 0)], t[min(i + 1, samples - 1)]
    res = optimize.minimize_scalar(lambda s: float(cv.gauge(body, a + s * (b - a))), bounds=(lo, hi),
                                   method="bounded", options={"xatol": 1e-12})
    return float(min(res.fun, g[i]))


def orbit_admissible(table: BilliardTable, points, labels, tol: float = 1e-9) -> bool:
    """Segments stay in the table and bounces off obstacles come from outside."""
    P = np.asarray(points, dtype=float)
    k = len(P)
    for j in range(k):
        if np.linalg.norm(P[(j + 1) % k] - P[j]) < 1e-9:
            return False
    for ob_i, ob in enumerate(table.obstacles):
        if not isinstance(ob, ScaledObstacle):
            continue
        for j in range(k):
            a, b = P[j], P[(j + 1) % k]
            if _segment_min_gauge(table.outer, a, b) < ob.delta * (1 - 1e-7):
                return False
        for j, lab in enumerate(labels):
            if lab != f"obstacle{ob_i}":
                continue
            n = cv.support_point(cv.polar_dual(table.outer), P[j]) if table.outer.kind != "ball" else P[j]
            for nb in (P[j - 1], P[(j + 1) % k]):
                if np.dot(nb - P[j], n) < -tol:
                    return False
    return True


def reflection_residuals(table: BilliardTable, points, labels) -> np.ndarray:
    """|angle(in, tangent) - angle(out, tangent)| at bounces on smooth curves.

    Meaningful for Euclidean geometry; point scatterers are skipped.
    """
    P = np.asarray(points, dtype=float)
    k = len(P)
    res = []
    for j, lab in enumerate(labels):
        comp = table.component(lab)
        if isinstance(comp, PointObstacle):
            continue
        curve = _Curve(table.outer, 1.0 if comp is None else comp.delta)
        t = curve.param_of(P[j])
        tan = curve.deriv(t)
        tan = tan / np.linalg.norm(tan)
        din = P[j] - P[j - 1]
        dout = P[(j + 1) % k] - P[j]
        din, dout = din / np.linalg.norm(din), dout / np.linalg.norm(dout)
        a_in = math.acos(np.clip(np.dot(din, tan), -1, 1))
        a_out = math.acos(np.clip(np.dot(dout, tan), -1, 1))
        res.append(abs(a_in - a_out))
    return np.asarray(res)


# --------------------------------------------------------------------------
# critical orbit search


def _init_params(prob: _ActionProblem, init):
    init = np.asarray(init, dtype=float)
    if init.ndim == 2 and init.shape == (prob.k, 2):
        return np.array([prob.curves[j].param_of(init[j]) for j in prob.var_idx], dtype=float)
    init = np.atleast_1d(init)
    if init.shape != (prob.m,):
        raise InvalidArgument(f"init needs {prob.m} parameters or {prob.k} points")
    return init


def find_critical_orbit(table: BilliardTable, k: int, labels, init, tol: float = 1e-9,
                        max_iter: int = 60) -> CriticalOrbitReport:
    """Newton search for a critical polygon with the given component labels.

    ``init`` is either one parameter per non-point bounce (angle, or perimeter
    position on polygons) or a (k, 2) array of initial points.
    """
    if len(labels) != k:
        raise InvalidArgument("need one component label per bounce")
    if table.outer.dim != 2:
        raise InvalidArgument("critical orbit search works on planar tables; reduce to a plane first")
    prob = _ActionProblem(table, labels)
    if prob.m == 0:
        P = prob.points(np.zeros((1, 0)))[0]
        tr = make_trajectory(table.geometry, P, labels)
        return CriticalOrbitReport(tr, 0.0, converged=True)
    x0 = _init_params(prob, init)
    x, gn = _newton_batch(prob, x0[None, :], tol, max_iter)
    x, g = x[0], float(gn[0])
    if g > tol:
        x2, g2 = _polish_root(prob, x, tol)
        if g2 < g:
            x, g = x2, g2
    P = prob.points(x[None, :])[0]
    tr = make_trajectory(table.geometry, P, labels)
    extras = {"params": x.tolist(), "admissible": orbit_admissible(table, P, labels)}
    if _is_euclidean(table.geometry):
        r = reflection_residuals(table, P, labels)
        extras["reflection_max"] = float(r.max()) if len(r) else 0.0
    if cv.is_polytopal(table.outer):
        extras["near_corner"] = _near_corner(table, P, labels)
    return CriticalOrbitReport(tr, g, converged=g <= tol, extras=extras)


def _is_euclidean(T: ConvexBody) -> bool:
    return T.kind == "ball" and abs(T.params[0] - 1.0) < 1e-15


def _near_corner(table, P, labels, tol=1e-6) -> bool:
    V = cv.polytope_vertices(table.outer)
    for j, lab in enumerate(labels):
        comp = table.component(lab)
        if isinstance(comp, PointObstacle):
            continue
        s = 1.0 if comp is None else comp.delta
        if np.min(np.linalg.norm(s * V - P[j], axis=1)) < tol:
            return True
    return False


def _pattern_seed(pattern: str) -> int:
    return zlib.crc32(pattern.encode())


def multistart_orbits(table: BilliardTable, labels, starts: int = 32, tol: float = 1e-9,
                      max_iter: int = 60) -> list:
    """All converged, admissible critical orbits from seeded random starts."""
    prob = _ActionProblem(table, labels)
    rng = np.random.Generator(np.random.Philox(_pattern_seed("".join(labels))))
    if prob.m == 0:
        return [find_critical_orbit(table, len(labels), labels, [], tol)]
    period = np.array([prob.curves[j].period for j in prob.var_idx])
    x0 = rng.random((starts, prob.m)) * period
    x, gn = _newton_batch(prob, x0, tol, max_iter)
    out = []
    for xi, g in zip(x, gn):
        if g > tol:
            continue
        P = prob.points(xi[None, :])[0]
        if not orbit_admissible(table, P, labels):
            continue
        tr = make_trajectory(table.geometry, P, labels)
        rep = CriticalOrbitReport(tr, float(g), converged=True, extras={"params": xi.tolist()})
        if _is_euclidean(table.geometry):
            r = reflection_residuals(table, P, labels)
            rep.extras["reflection_max"] = float(r.max()) if len(r) else 0.0
        out.append(rep)
    return out


# --------------------------------------------------------------------------
# annulus


def _necklaces(k: int):
    """Cyclic words over {O, I} of length k with at least one I and no two
    cyclically adjacent I's, one representative per rotation class."""
    seen = set()
    for w in product("OI", repeat=k):
        if "I" not in w:
            continue
        if any(w[i] == "I" and w[(i + 1) % k] == "I" for i in range(k)):
            continue
        rep = min("".join(w[i:] + w[:i]) for i in range(k))
        if rep not in seen:
            seen.add(rep)
            yield rep


def _first_angle(tr: BilliardTrajectory) -> float:
    p = tr.bounce_points[0]
    return float(math.atan2(p[1], p[0]) % TWO_PI) if len(p) >= 2 else 0.0


def _argmin(cands):
    """Deterministic argmin over (trajectory, regular flag) pairs."""
    return min(cands, key=lambda c: (round(c[0].action, 9), not c[1], c[0].k, round(_first_angle(c[0]), 9)))


def annulus_table(delta: float) -> BilliardTable:
    if delta == 0:
        return BilliardTable(cv.ball(1, 2), (PointObstacle((0.0, 0.0)),))
    return BilliardTable(cv.ball(1, 2), (ScaledObstacle(float(delta)),))


def annulus_candidates(delta: float, k_max: int, starts: int = 32) -> dict:
    """Every orbit class considered by :func:`annulus_min_action`."""
    if not 0 <= delta < 1:
        raise InvalidArgument("delta must lie in [0, 1)")
    if k_max < 2:
        raise InvalidArgument("k_max must be >= 2")
    table = annulus_table(delta)
    inner = (delta, 0.0)
    radial = make_trajectory(table.geometry, [(1.0, 0.0), inner], ["outer", "obstacle0"])
    caustic = [{"k": k, "value": 2 * k * math.sqrt(1 - delta ** 2)} for k in range(2, k_max + 1)]
    stars = []
    for k in range(2, k_max + 1):
        for m in range(1, k):
            if math.gcd(k, m) != 1 or not (2 * m < k or (k, m) == (2, 1)):
                continue
            if math.cos(math.pi * m / k) >= delta:
                stars.append(disk_orbit(k, m))
    mixed = []
    if delta > 0:
        for k in range(2, k_max + 1):
            for pat in _necklaces(k):
                labels = ["outer" if c == "O" else "obstacle0" for c in pat]
                for rep in multistart_orbits(table, labels, starts):
                    mixed.append(rep)
    return {"table": table, "radial": radial, "caustic": caustic, "stars": stars, "mixed": mixed}


def annulus_min_action(delta: float, k_max: int = 8, starts: int = 32, n: int = 2):
    """Minimal action of the annulus table ``D(1) \\ D(delta)`` with Euclidean geometry.

    Returns ``(value, trajectory)``.  For n = 3 the planar section through the
    origin is used and the orbit is embedded with z = 0.
    """
    if n not in (2, 3):
        raise InvalidArgument("annulus tables are supported for n = 2, 3")
    c = annulus_candidates(delta, k_max, starts)
    pool = [(c["radial"], True)] + [(s, True) for s in c["stars"]]
    pool += [(r.trajectory, False) for r in c["mixed"]]
    best = _argmin(pool)[0]
    if n == 3:
        best = BilliardTrajectory(np.hstack([best.bounce_points, np.zeros((best.k, 1))]),
                                  best.component_labels, best.chord_lengths, best.action, best.central_angles)
    return float(best.action), best


# --------------------------------------------------------------------------
# point scatterers


def _inradius(K: ConvexBody, C: ConvexBody, p, samples: int = 4096):
    """Largest mu with p + mu C inside K, and a minimizing direction."""
    p = np.asarray(p, dtype=float)
    if cv.is_polytopal(K):
        N, b = cv.facets(K)
        vals = (b - N @ p) / cv.support(C, N)
        i = int(np.argmin(vals))
        return float(vals[i]), N[i]
    U = cv.sphere_grid(K.dim, samples if K.dim == 2 else 4000)

    def f(u):
        u = np.asarray(u, dtype=float)
        u = u / np.linalg.norm(u, axis=-1, keepdims=True)
        return (cv.support(K, u) - u @ p) / cv.support(C, u)

    vals = f(U)
    i = int(np.argmin(vals))
    res = optimize.minimize(lambda v: float(f(v)), U[i], method="Nelder-Mead",
                            options={"xatol": 1e-13, "fatol": 1e-15, "maxiter": 4000})
    if res.fun < vals[i]:
        u = res.x / np.linalg.norm(res.x)
        return float(res.fun), u
    return float(vals[i]), U[i]


def _contact_point(C: ConvexBody, u, p, mu):
    """Contact point p + mu c with c in the face of C exposed by u.

    For polytopal C a vertex of that face is used (ties broken toward the
    largest coordinate sum), which gives the corner-to-center orbits.
    Returns (point, regular flag).
    """
    if cv.is_polytopal(C):
        F = cv.support_face_vertices(C, u, tol=1e-9)
        order = np.lexsort(tuple(-F[:, i] for i in reversed(range(F.shape[1]))) + (-F.sum(axis=1),))
        return p + mu * F[order[0]], True
    return p + mu * cv.support_point(C, u), True


def scatterer_min_action(x_points, outer: ConvexBody, T: ConvexBody, k_max: int = 4, starts: int = 32):
    """Minimal action of the table ``outer`` with point scatterers ``x_points``.

    Candidates: point-boundary and point-point 2-bounces, the
    boundary-boundary 2-bounce, and (planar smooth tables) mixed orbits with
    up to ``k_max`` bounces.  Returns ``(value, trajectory)``.
    """
    pts = [tuple(map(float, p)) for p in np.atleast_2d(np.asarray(x_points, dtype=float))] if len(x_points) else []
    if not pts:
        raise InvalidArgument("need at least one scatterer")
    if not T.centrally_symmetric:
        raise InvalidArgument("scatterer search assumes a centrally symmetric geometry body")
    table = BilliardTable(outer, tuple(PointObstacle(p) for p in pts), T)
    Tpolar = cv.polar_dual(T)
    cands = []
    for i, p in enumerate(pts):
        mu, u = _inradius(outer, Tpolar, p)
        q, regular = _contact_point(Tpolar, u, np.asarray(p), mu)
        tr = make_trajectory(T, [p, q], [f"obstacle{i}", "outer"])
        cands.append((tr, regular))
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            cands.append((make_trajectory(T, [pts[i], pts[j]], [f"obstacle{i}", f"obstacle{j}"]), True))
    mu0, u0 = _inradius(outer, Tpolar, np.zeros(outer.dim))
    q0, _ = _contact_point(Tpolar, u0, np.zeros(outer.dim), mu0)
    cands.append((make_trajectory(T, [q0, -q0], ["outer", "outer"]), True))
    if outer.dim == 2 and not cv.is_polytopal(outer) and k_max >= 3:
        for k in range(3, k_max + 1):
            for labels in _scatter_patterns(len(pts), k):
                for rep in multistart_orbits(table, labels, starts):
                    cands.append((rep.trajectory, False))
    best = _argmin(cands)[0]
    return float(best.action), best


def _scatter_patterns(n_points: int, k: int):
    names = ["outer"] + [f"obstacle{i}" for i in range(n_points)]
    seen = set()
    for w in product(range(len(names)), repeat=k):
        if all(c == 0 for c in w) or any(w[i] == w[(i + 1) % k] and w[i] != 0 for i in range(k)):
            continue
        rep = min(w[i:] + w[:i] for i in range(k))
        if rep in seen:
            continue
        seen.add(rep)
        yield [names[c] for c in rep]


# --------------------------------------------------------------------------
# stationarity of the chord-length functional


def lagrange_critical_check(delta: float, k: int, tol: float = 1e-9, seed: int = 0) -> CriticalOrbitReport:
    """Solve the stationarity system of sum sqrt(2(1 - cos a_i)) under
    ``cos a_i - 2 delta^2 + 1 = b_i^2`` and check ``cos a_i = 2 delta^2 - 1``.

    The chord with central angle a_i is then tangent to the circle of radius
    delta.  ``extras['closes']`` says whether k such chords close up.
    """
    if not 0 < delta < 1:
        raise InvalidArgument("delta must lie in (0, 1)")
    if k < 2:
        raise InvalidArgument("k must be >= 2")
    c0 = 2 * delta ** 2 - 1

    def F(v):
        a, lam, b = v[:k], v[k:2 * k], v[2 * k:]
        df = np.cos(a / 2)  # derivative of 2 sin(a/2) on (0, pi)
        return np.concatenate([df + lam * np.sin(a), np.cos(a) - c0 - b ** 2, 2 * b * lam])

    rng = np.random.Generator(np.random.Philox(seed))
    best = None
    for _ in range(16):
        a0 = math.acos(c0) + 0.3 * (rng.random(k) - 0.5)
        v0 = np.concatenate([np.clip(a0, 0.05, math.pi - 0.05), -np.ones(k), 0.1 * rng.random(k)])
        sol = optimize.root(F, v0, method="hybr", options={"xtol": 1e-15})
        res = float(np.linalg.norm(F(sol.x)))
        if best is None or res < best[1]:
            best = (sol.x, res)
        if res <= tol:
            break
    v, res = best
    a, lam, b = v[:k], v[k:2 * k], v[2 * k:]
    if res > max(tol, 1e-8) or np.any(a <= 0) or np.any(a >= math.pi):
        raise DomainError(f"stationarity system has no solution in (0, pi)^k for delta={delta}, k={k} "
                          f"(residual {res:.3g})")
    ok = bool(np.all(np.abs(np.cos(a) - c0) <= max(tol, 1e-9)))
    total = float(np.sum(np.sqrt(2 * (1 - np.cos(a)))))
    turns = k * a / TWO_PI
    closes = bool(abs(np.sum(a) / TWO_PI - round(np.sum(a) / TWO_PI)) < 1e-9)
    phi = np.concatenate([[0.0], np.cumsum(a)[:-1]])
    P = np.column_stack([np.cos(phi), np.sin(phi)])
    tr = make_trajectory(cv.ball(1, 2), P, ["outer"] * k)
    tr.central_angles = a
    tr.action = total
    return CriticalOrbitReport(
        tr, res, multipliers=lam.tolist(), slacks=b.tolist(), converged=ok,
        extras={"cos_alpha": np.cos(a).tolist(), "target_cos": c0, "total_length": total,
                "closed_form_length": 2 * k * math.sqrt(1 - delta ** 2), "closes": closes,
                "winding": float(turns[0]) if len(turns) else 0.0,
                "multiplier_closed_form": -1 / (2 * math.sqrt(1 - delta ** 2))},
    )
