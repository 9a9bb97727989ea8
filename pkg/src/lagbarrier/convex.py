"""Convex bodies in R^n described by support function and gauge.

Every body is closed and has the origin in its interior.  Exact formulas are
used for the standard kinds (ball, box, cross-polytope, ellipsoid, vertex
polytope); ``support_sampled`` bodies interpolate a table of support values
over a triangulated sphere of directions.

All evaluators broadcast over leading axes: ``support(body, u)`` accepts an
array of shape ``(..., n)`` and returns shape ``(...)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.spatial import ConvexHull

from .errors import DomainError, InvalidArgument

KINDS = ("ball", "cube", "cross_polytope", "ellipsoid", "polytope", "support_sampled")
_MEMBER_TOL = 1e-12
_MAX_DIM = 8


@dataclass(frozen=True, eq=False)
class ConvexBody:
    """A convex body with the origin in its interior.

    ``params`` holds the radius (ball), half side lengths (cube), half
    diagonals (cross_polytope) or semi-axes (ellipsoid).  Polytopes carry
    ``vertices``; sampled bodies carry unit ``directions`` and ``values``.
    """

    kind: str
    dim: int
    params: tuple = ()
    vertices: np.ndarray | None = None
    directions: np.ndarray | None = None
    values: np.ndarray | None = None
    centrally_symmetric: bool = True
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgument(f"unknown body kind {self.kind!r}")
        if not 1 <= self.dim <= _MAX_DIM:
            raise InvalidArgument(f"dimension {self.dim} outside 1..{_MAX_DIM}")
        if self.kind == "polytope":
            _prepare_polytope(self)
        elif self.kind == "support_sampled":
            _prepare_sampled(self)
        elif any(p <= 0 for p in self.params) or len(self.params) != (
            1 if self.kind == "ball" else self.dim
        ):
            raise InvalidArgument(f"bad parameters {self.params} for {self.kind}")

    # convenience accessors -------------------------------------------------
    @property
    def a(self) -> np.ndarray:
        return np.asarray(self.params, dtype=float)

    def support(self, u):
        return support(self, u)

    def gauge(self, x):
        return gauge(self, x)

    def contains(self, x):
        return contains(self, x)

    def scaled(self, mu: float) -> "ConvexBody":
        return scale_body(self, mu)

    def __repr__(self):
        if self.kind == "polytope":
            return f"ConvexBody(polytope, dim={self.dim}, {len(self.vertices)} vertices)"
        if self.kind == "support_sampled":
            return f"ConvexBody(support_sampled, dim={self.dim}, {len(self.values)} directions)"
        return f"ConvexBody({self.kind}, dim={self.dim}, params={self.params})"


@dataclass(frozen=True)
class RadialExtremes:
    k_min: float
    k_max: float

    @property
    def ratio(self) -> float:
        return self.k_max / self.k_min


@dataclass(frozen=True)
class VolumeEstimate:
    value: float
    std_error: float
    method: str
    samples: int = 0
    seed: int | None = None


# --------------------------------------------------------------------------
# constructors


def ball(r: float = 1.0, n: int = 2) -> ConvexBody:
    return ConvexBody("ball", n, (float(r),))


def cube(*a, n: int | None = None) -> ConvexBody:
    """Box with half side lengths ``a``; ``cube(1, n=3)`` gives the unit cube."""
    a = _expand(a, n)
    return ConvexBody("cube", len(a), a)


def cross_polytope(*r, n: int | None = None) -> ConvexBody:
    """{x : sum |x_i| / r_i <= 1}; a single ``r`` with ``n`` gives the regular one."""
    r = _expand(r, n)
    return ConvexBody("cross_polytope", len(r), r)


def ellipsoid(*axes) -> ConvexBody:
    axes = tuple(float(x) for x in axes)
    return ConvexBody("ellipsoid", len(axes), axes)


def polytope(vertices) -> ConvexBody:
    v = np.atleast_2d(np.asarray(vertices, dtype=float))
    sym = _is_symmetric_pointset(v)
    return ConvexBody("polytope", v.shape[1], vertices=v, centrally_symmetric=sym)


def support_sampled(directions, values) -> ConvexBody:
    d = np.atleast_2d(np.asarray(directions, dtype=float))
    d = d / np.linalg.norm(d, axis=1, keepdims=True)
    v = np.asarray(values, dtype=float)
    return ConvexBody("support_sampled", d.shape[1], directions=d, values=v,
                      centrally_symmetric=_sampled_symmetric(d, v))


def sample_support(body: ConvexBody, resolution: int = 256) -> ConvexBody:
    """Tabulate ``body``'s support function on a sphere grid (n <= 3)."""
    dirs = sphere_grid(body.dim, resolution)
    return support_sampled(dirs, support(body, dirs))


def sphere_grid(n: int, resolution: int) -> np.ndarray:
    """Roughly uniform unit directions: a circle for n=2, a Fibonacci sphere for n=3."""
    if n == 2:
        t = 2 * np.pi * np.arange(resolution) / resolution
        return np.column_stack([np.cos(t), np.sin(t)])
    if n == 3:
        m = resolution
        i = np.arange(m) + 0.5
        phi = np.arccos(1 - 2 * i / m)
        theta = np.pi * (1 + 5 ** 0.5) * i
        pts = np.column_stack([np.cos(theta) * np.sin(phi), np.sin(theta) * np.sin(phi), np.cos(phi)])
        axes = np.vstack([np.eye(3), -np.eye(3)])
        return np.vstack([pts, axes])
    raise InvalidArgument("sampled bodies are limited to n <= 3")


def _expand(vals, n):
    if len(vals) == 1 and np.ndim(vals[0]) > 0:
        vals = tuple(vals[0])
    vals = tuple(float(v) for v in vals)
    if n is not None:
        if len(vals) == 1:
            vals = vals * n
        elif len(vals) != n:
            raise InvalidArgument(f"expected {n} parameters, got {len(vals)}")
    return vals


def _is_symmetric_pointset(v, tol=1e-9):
    for p in v:
        if np.min(np.linalg.norm(v + p, axis=1)) > tol:
            return False
    return True


def _sampled_symmetric(d, v, tol=1e-9):
    for di, vi in zip(d, v):
        j = np.argmin(np.linalg.norm(d + di, axis=1))
        if np.linalg.norm(d[j] + di) > tol or abs(v[j] - vi) > tol * max(1.0, abs(vi)):
            return False
    return True


def _prepare_polytope(body):
    v = body.vertices
    if v.shape[0] <= body.dim:
        raise InvalidArgument("polytope needs at least n+1 vertices")
    hull = ConvexHull(v)
    normals = hull.equations[:, :-1]
    offsets = -hull.equations[:, -1]  # normals @ x <= offsets
    if np.any(offsets <= 1e-12):
        raise DomainError("origin is not interior to the polytope")
    # merge coplanar facets (qhull splits them into simplices)
    key = np.round(np.column_stack([normals, offsets]), 10)
    _, idx = np.unique(key, axis=0, return_index=True)
    body._cache["normals"] = normals[np.sort(idx)]
    body._cache["offsets"] = offsets[np.sort(idx)]
    body._cache["hull_vertices"] = v[hull.vertices]
    body._cache["volume"] = hull.volume


def _prepare_sampled(body):
    d, val = body.directions, body.values
    if d.shape[0] != val.shape[0]:
        raise InvalidArgument("directions and values differ in length")
    if np.any(val <= 0):
        raise DomainError("origin is not interior: non-positive support value")
    if body.dim not in (2, 3):
        raise InvalidArgument("support_sampled bodies need n in {2, 3}")
    hull = ConvexHull(d)
    simplices = hull.simplices
    eq = hull.equations
    verts = d[simplices]  # (F, n, n): rows are the facet's vertices
    body._cache["facet_normals"] = eq[:, :-1]
    body._cache["facet_offsets"] = -eq[:, -1]
    body._cache["facet_inv"] = np.linalg.inv(np.transpose(verts, (0, 2, 1)))
    body._cache["facet_values"] = val[simplices]


# --------------------------------------------------------------------------
# support function, gauge, membership


def _check_dir(body, u):
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != body.dim:
        raise InvalidArgument(f"vector of dimension {u.shape[-1]} for body of dimension {body.dim}")
    return u


def support(body: ConvexBody, u):
    """sup over x in body of <u, x>."""
    u = _check_dir(body, u)
    if np.any(np.linalg.norm(u, axis=-1) == 0):
        raise InvalidArgument("support of the zero direction")
    return _support(body, u)


def _support(body, u):
    k = body.kind
    if k == "ball":
        return body.params[0] * np.linalg.norm(u, axis=-1)
    if k == "cube":
        return np.sum(body.a * np.abs(u), axis=-1)
    if k == "cross_polytope":
        return np.max(body.a * np.abs(u), axis=-1)
    if k == "ellipsoid":
        return np.sqrt(np.sum((body.a * u) ** 2, axis=-1))
    if k == "polytope":
        return np.max(u @ body._cache["hull_vertices"].T, axis=-1)
    return _sampled_support(body, u)


def _sampled_support(body, u):
    c = body._cache
    norm = np.linalg.norm(u, axis=-1)
    flat = u.reshape(-1, body.dim) / norm.reshape(-1, 1)
    # the ray through u leaves the direction hull through the facet maximizing <n,u>/offset
    f = np.argmax(flat @ c["facet_normals"].T / c["facet_offsets"], axis=1)
    t = c["facet_offsets"][f] / np.einsum("ij,ij->i", flat, c["facet_normals"][f])
    hit = flat * t[:, None]
    lam = np.einsum("fij,fj->fi", c["facet_inv"][f], hit)
    h_hit = np.einsum("fi,fi->f", lam, c["facet_values"][f])
    # h was interpolated at the hull point hit = t*u_hat; rescale to the unit direction
    out = h_hit / t
    return out.reshape(norm.shape) * norm


def gauge(body: ConvexBody, x):
    """Minkowski functional: inf {t > 0 : x in t*body}; equals support of the polar."""
    x = _check_dir(body, x)
    k = body.kind
    if k == "ball":
        return np.linalg.norm(x, axis=-1) / body.params[0]
    if k == "cube":
        return np.max(np.abs(x) / body.a, axis=-1)
    if k == "cross_polytope":
        return np.sum(np.abs(x) / body.a, axis=-1)
    if k == "ellipsoid":
        return np.sqrt(np.sum((x / body.a) ** 2, axis=-1))
    if k == "polytope":
        c = body._cache
        return np.maximum(np.max(x @ c["normals"].T / c["offsets"], axis=-1), 0.0)
    # outer polytope approximation {x : <x,u_i> <= h_i}
    return np.maximum(np.max(x @ body.directions.T / body.values, axis=-1), 0.0)


def contains(body: ConvexBody, x):
    """Closed membership: gauge(x) <= 1 (with a 1e-12 relative slack)."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != body.dim:
        raise InvalidArgument(f"point of dimension {x.shape[-1]} for body of dimension {body.dim}")
    return gauge(body, x) <= 1.0 + _MEMBER_TOL


def radial(body: ConvexBody, u):
    """Boundary point in direction u: u_hat / gauge(u_hat)."""
    u = _check_dir(body, u)
    uh = u / np.linalg.norm(u, axis=-1, keepdims=True)
    return uh / gauge(body, uh)[..., None]


def support_point(body: ConvexBody, u):
    """A maximizer of <u, x> over the body.

    For polytopal kinds the centroid of the maximizing face is returned, which
    makes the choice symmetric when the face is not a vertex.
    """
    u = _check_dir(body, u)
    k = body.kind
    if k == "ball":
        return body.params[0] * u / np.linalg.norm(u, axis=-1, keepdims=True)
    if k == "ellipsoid":
        a2u = body.a ** 2 * u
        return a2u / np.sqrt(np.sum(body.a ** 2 * u ** 2, axis=-1))[..., None]
    if k == "cube":
        return body.a * np.sign(np.where(np.abs(u) < 1e-14, 0.0, u))
    if k == "cross_polytope":
        s = body.a * np.abs(u)
        m = np.max(s, axis=-1, keepdims=True)
        tie = s >= m * (1 - 1e-12)
        w = tie / np.sum(tie, axis=-1, keepdims=True)
        return w * body.a * np.sign(u)
    if k == "polytope":
        V = body._cache["hull_vertices"]
        s = u @ V.T
        m = np.max(s, axis=-1, keepdims=True)
        tie = s >= m - 1e-12 * np.maximum(1.0, np.abs(m))
        return (tie @ V) / np.sum(tie, axis=-1, keepdims=True)
    return _numeric_gradient(lambda v: _sampled_support(body, v), u)


def support_face_vertices(body: ConvexBody, u, tol=1e-12) -> np.ndarray:
    """Vertices of the face of a polytopal body maximizing <u, .> (single direction)."""
    u = np.asarray(u, dtype=float)
    V = polytope_vertices(body)
    s = V @ u
    return V[s >= s.max() - tol * max(1.0, abs(s.max()))]


def polytope_vertices(body: ConvexBody) -> np.ndarray:
    if body.kind == "polytope":
        return body._cache["hull_vertices"]
    if body.kind == "cube":
        n = body.dim
        signs = np.array(np.meshgrid(*[[-1.0, 1.0]] * n, indexing="ij")).reshape(n, -1).T
        return signs * body.a
    if body.kind == "cross_polytope":
        return np.vstack([np.diag(body.a), -np.diag(body.a)])
    raise InvalidArgument(f"{body.kind} is not polytopal")


def facets(body: ConvexBody):
    """(normals, offsets) with unit normals and body = {normals @ x <= offsets}."""
    if body.kind == "polytope":
        return body._cache["normals"], body._cache["offsets"]
    if body.kind == "cube":
        n = body.dim
        N = np.vstack([np.eye(n), -np.eye(n)])
        return N, np.concatenate([body.a, body.a])
    if body.kind == "cross_polytope":
        n = body.dim
        signs = np.array(np.meshgrid(*[[-1.0, 1.0]] * n, indexing="ij")).reshape(n, -1).T
        N = signs / body.a
        b = np.ones(len(N))
        norm = np.linalg.norm(N, axis=1)
        return N / norm[:, None], b / norm
    raise InvalidArgument(f"{body.kind} is not polytopal")


def is_polytopal(body: ConvexBody) -> bool:
    return body.kind in ("cube", "cross_polytope", "polytope")


def is_smooth_direction(body: ConvexBody, u, tol=1e-9) -> bool:
    """True when the face of ``body`` exposed by ``u`` contains smooth boundary points.

    For a polytope this means u is a facet normal; smooth kinds always pass.
    """
    if not is_polytopal(body):
        return True
    N, _ = facets(body)
    uh = np.asarray(u, dtype=float) / np.linalg.norm(u)
    return bool(np.any(N @ uh >= 1 - tol))


def _numeric_gradient(f, u, h=1e-7):
    u = np.asarray(u, dtype=float)
    g = np.zeros_like(u)
    for i in range(u.shape[-1]):
        e = np.zeros(u.shape[-1])
        e[i] = h
        g[..., i] = (f(u + e) - f(u - e)) / (2 * h)
    return g


# --------------------------------------------------------------------------
# derived bodies


def polar_dual(body: ConvexBody, resolution: int = 512) -> ConvexBody:
    """K° = {y : <x, y> <= 1 for all x in K}."""
    k = body.kind
    if k == "ball":
        return ball(1.0 / body.params[0], body.dim)
    if k == "cube":
        return ConvexBody("cross_polytope", body.dim, tuple(float(v) for v in 1.0 / body.a))
    if k == "cross_polytope":
        return ConvexBody("cube", body.dim, tuple(float(v) for v in 1.0 / body.a))
    if k == "ellipsoid":
        return ellipsoid(*(float(v) for v in 1.0 / body.a))
    if k == "polytope":
        c = body._cache
        return polytope(c["normals"] / c["offsets"][:, None])
    # support of the polar is the gauge of the body
    d = body.directions
    return support_sampled(d, gauge(body, d))


def scale_body(body: ConvexBody, mu: float) -> ConvexBody:
    if mu <= 0:
        raise InvalidArgument("scale factor must be positive")
    if body.kind == "polytope":
        return polytope(mu * body.vertices)
    if body.kind == "support_sampled":
        return support_sampled(body.directions, mu * body.values)
    return ConvexBody(body.kind, body.dim, tuple(float(mu * p) for p in body.params))


# --------------------------------------------------------------------------
# radial extremes and pinching


def radial_extremes(body: ConvexBody, starts: int = 32, seed: int = 0) -> RadialExtremes:
    """Smallest and largest distance from the origin to the boundary."""
    k = body.kind
    a = body.a if body.params else None
    if k == "ball":
        r = body.params[0]
        return RadialExtremes(r, r)
    if k == "cube":
        return RadialExtremes(float(a.min()), float(np.linalg.norm(a)))
    if k == "cross_polytope":
        return RadialExtremes(float(1.0 / np.linalg.norm(1.0 / a)), float(a.max()))
    if k == "ellipsoid":
        return RadialExtremes(float(a.min()), float(a.max()))
    if k == "polytope":
        c = body._cache
        k_min = float(np.min(c["offsets"] / np.linalg.norm(c["normals"], axis=1)))
        k_max = float(np.max(np.linalg.norm(c["hull_vertices"], axis=1)))
        return RadialExtremes(k_min, k_max)
    return _radial_extremes_numeric(body, starts, seed)


def _radial_extremes_numeric(body, starts, seed, tol=1e-9):
    # min distance to the boundary = min of h over unit directions;
    # max distance = max of 1/gauge over unit directions
    n = body.dim
    dirs = sphere_grid(n, 2048 if n == 2 else 4000)
    h = support(body, dirs)
    rho = 1.0 / gauge(body, dirs)

    def to_dir(t):
        if n == 2:
            return np.array([math.cos(t[0]), math.sin(t[0])])
        return np.array([math.sin(t[0]) * math.cos(t[1]), math.sin(t[0]) * math.sin(t[1]), math.cos(t[0])])

    def to_angles(d):
        if n == 2:
            return np.array([math.atan2(d[1], d[0])])
        return np.array([math.acos(np.clip(d[2], -1, 1)), math.atan2(d[1], d[0])])

    def refine(obj, order):
        best = np.inf
        for i in order[:starts]:
            res = minimize(lambda t: obj(to_dir(t)), to_angles(dirs[i]), method="Nelder-Mead",
                           options={"xatol": tol, "fatol": tol * 1e-3, "maxiter": 2000})
            best = min(best, float(res.fun), float(obj(dirs[i])))
        return best

    k_min = refine(lambda d: float(support(body, d)), np.argsort(h))
    k_max = -refine(lambda d: -1.0 / float(gauge(body, d)), np.argsort(-rho))
    return RadialExtremes(k_min, k_max)


def pinching_report(body: ConvexBody, alpha: float) -> dict:
    if alpha <= 1:
        raise InvalidArgument("pinching constant must exceed 1")
    ext = radial_extremes(body)
    ratio = ext.k_max / ext.k_min
    return {
        "ratio": ratio,
        "is_alpha_pinched": bool(ext.k_max <= alpha * ext.k_min * (1 + 1e-12)),
        "is_strict": bool(ext.k_max < alpha * ext.k_min),
    }


# --------------------------------------------------------------------------
# volume


def exact_volume(body: ConvexBody) -> float | None:
    n = body.dim
    k = body.kind
    if k == "ball":
        return math.pi ** (n / 2) * body.params[0] ** n / math.gamma(n / 2 + 1)
    if k == "cube":
        return 2.0 ** n * float(np.prod(body.a))
    if k == "cross_polytope":
        return 2.0 ** n * float(np.prod(body.a)) / math.factorial(n)
    if k == "ellipsoid":
        return math.pi ** (n / 2) / math.gamma(n / 2 + 1) * float(np.prod(body.a))
    if k == "polytope":
        return float(body._cache["volume"])
    return None


def bounding_box(body: ConvexBody):
    eye = np.eye(body.dim)
    return -support(body, -eye), support(body, eye)


def volume(body: ConvexBody, method: str = "exact", samples: int = 1_000_000, seed: int = 0,
           shard: int = 65536) -> VolumeEstimate:
    """Volume, exact for standard kinds, else by seeded rejection sampling.

    Monte Carlo runs in fixed-size shards, each with its own child seed, so the
    estimate depends only on ``(samples, seed)``.
    """
    if method == "exact":
        v = exact_volume(body)
        if v is not None:
            return VolumeEstimate(v, 0.0, "exact")
        method = "monte_carlo"
    if method != "monte_carlo":
        raise InvalidArgument(f"unknown volume method {method!r}")
    if samples < 1000:
        raise InvalidArgument("Monte Carlo volume needs at least 1000 samples")
    lo, hi = bounding_box(body)
    box = float(np.prod(hi - lo))
    n_shards = -(-samples // shard)
    children = np.random.SeedSequence(seed).spawn(n_shards)
    hits = 0
    remaining = samples
    for child in children:
        m = min(shard, remaining)
        rng = np.random.Generator(np.random.Philox(child))
        pts = lo + (hi - lo) * rng.random((m, body.dim))
        hits += int(np.count_nonzero(contains(body, pts)))
        remaining -= m
    p = hits / samples
    return VolumeEstimate(box * p, box * math.sqrt(p * (1 - p) / samples), "monte_carlo",
                          samples, seed)


def mahler_sqrt(body: ConvexBody, method: str = "exact", samples: int = 1_000_000,
                seed: int = 0) -> VolumeEstimate:
    """sqrt(Vol(K) Vol(K°)) with first-order error propagation."""
    v1 = volume(body, method, samples, seed)
    v2 = volume(polar_dual(body), method, samples, seed + 1)
    m = math.sqrt(v1.value * v2.value)
    err = 0.5 * math.hypot(v1.std_error * v2.value, v2.std_error * v1.value) / m
    tag = v1.method if v1.method == v2.method else f"{v1.method}+{v2.method}"
    return VolumeEstimate(m, err, tag, samples if "monte" in tag else 0,
                          seed if "monte" in tag else None)


# --------------------------------------------------------------------------
# boundary sampling and file format


def boundary_samples(body: ConvexBody, count: int, seed: int = 0) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(seed))
    u = rng.standard_normal((count, body.dim))
    return radial(body, u)


def body_from_dict(d: dict) -> ConvexBody:
    try:
        kind = d["kind"]
        if kind == "polytope":
            return polytope(d["vertices"])
        if kind == "support_sampled":
            return support_sampled(d["directions"], d["values"])
        dim = int(d["dim"])
        params = d.get("params", [1.0])
        if kind == "ball":
            return ball(float(params[0]), dim)
        if kind == "cube":
            return cube(*params, n=dim)
        if kind == "cross_polytope":
            return cross_polytope(*params, n=dim)
        if kind == "ellipsoid":
            if len(params) != dim:
                raise InvalidArgument("ellipsoid needs one semi-axis per dimension")
            return ellipsoid(*params)
    except (KeyError, TypeError, IndexError) as exc:
        raise InvalidArgument(f"malformed body definition: {exc}") from exc
    raise InvalidArgument(f"unknown body kind {kind!r}")


def body_to_dict(body: ConvexBody) -> dict:
    if body.kind == "polytope":
        return {"kind": "polytope", "dim": body.dim, "vertices": body.vertices.tolist()}
    if body.kind == "support_sampled":
        return {"kind": "support_sampled", "dim": body.dim,
                "directions": body.directions.tolist(), "values": body.values.tolist()}
    return {"kind": body.kind, "dim": body.dim, "params": list(body.params)}
