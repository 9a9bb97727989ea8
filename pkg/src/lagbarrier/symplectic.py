"""Charts with explicit symplectic-form matrices and numerical map verification.

A 2-form is stored as its coefficient matrix ``Omega`` with
``omega(u, v) = u @ Omega @ v``.  A term ``c * dP ^ dQ`` contributes
``Omega[P, Q] = c`` and ``Omega[Q, P] = -c``.

Maps are evaluated on arrays of shape ``(..., d)``; Jacobians and defects are
computed for whole sample batches at once.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, InvalidArgument

R_MIN = 1e-6


def _always(q):
    return np.ones(np.shape(q)[:-1], dtype=bool)


@dataclass(frozen=True)
class Chart:
    name: str
    dim: int
    form: Callable[[np.ndarray], np.ndarray]
    domain: Callable[[np.ndarray], np.ndarray] = _always


@dataclass(frozen=True)
class SymplecticMapSpec:
    source: Chart
    target: Chart
    eval: Callable[[np.ndarray], np.ndarray]
    analytic_jacobian: Callable[[np.ndarray], np.ndarray] | None = None
    containment_target: Callable[[np.ndarray], np.ndarray] | None = None
    name: str = "map"

    def __call__(self, q):
        return self.eval(np.asarray(q, dtype=float))


@dataclass(frozen=True)
class Seam:
    """Matching points on two pieces of a piecewise map.

    ``sampler(rng, n)`` returns ``(points_on_a, points_on_b)`` that represent
    the same points of the glued manifold.
    """

    piece_a: str
    piece_b: str
    sampler: Callable


@dataclass(frozen=True)
class PiecewiseMap:
    pieces: dict
    seams: tuple = ()
    name: str = "piecewise"


@dataclass
class VerificationReport:
    samples: int = 0
    max_symplectic_defect: float = 0.0
    max_area_defect: float = 0.0
    containment_failures: int = 0
    seam_max_gap: float = 0.0
    skipped: int = 0
    extras: dict = field(default_factory=dict)

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        return VerificationReport(
            self.samples + other.samples,
            max(self.max_symplectic_defect, other.max_symplectic_defect),
            max(self.max_area_defect, other.max_area_defect),
            self.containment_failures + other.containment_failures,
            max(self.seam_max_gap, other.seam_max_gap),
            self.skipped + other.skipped,
            {**self.extras, **other.extras},
        )

    def to_dict(self) -> dict:
        out = {
            "samples": self.samples,
            "max_symplectic_defect": float(self.max_symplectic_defect),
            "max_area_defect": float(self.max_area_defect),
            "containment_failures": int(self.containment_failures),
            "seam_max_gap": float(self.seam_max_gap),
            "skipped": int(self.skipped),
        }
        out.update(self.extras)
        return out


# --------------------------------------------------------------------------
# forms and charts


def form_from_terms(dim: int, terms: Sequence[tuple[int, int, object]]):
    """Build a form evaluator from terms ``(P, Q, coeff)`` meaning ``coeff * dP ^ dQ``.

    ``coeff`` is a number or a callable of the point.
    """

    def form(q):
        q = np.asarray(q, dtype=float)
        out = np.zeros(q.shape[:-1] + (dim, dim))
        for p_idx, q_idx, c in terms:
            val = c(q) if callable(c) else c
            out[..., p_idx, q_idx] += val
            out[..., q_idx, p_idx] -= val
        return out

    return form


def standard_chart(n: int) -> Chart:
    """Coordinates (x_1..x_n, y_1..y_n) with the form sum dy_i ^ dx_i."""
    return Chart(f"cartesian_R{2 * n}", 2 * n, form_from_terms(2 * n, [(n + i, i, 1.0) for i in range(n)]))


def split_chart(n: int) -> Chart:
    """Interleaved coordinates (X_1, Y_1, ..., X_n, Y_n), form sum dY_i ^ dX_i.

    The first pair is the factor tested against a disk in non-squeezing
    certificates.
    """
    return Chart(f"split_R{2 * n}", 2 * n, form_from_terms(2 * n, [(2 * i + 1, 2 * i, 1.0) for i in range(n)]))


def polar_first_chart(n: int = 2) -> Chart:
    """(r, phi, X_2, Y_2, ...) with form -r dr ^ dphi + sum dY ^ dX, r > R_MIN."""
    terms = [(0, 1, lambda q: -q[..., 0])]
    terms += [(2 * i + 1, 2 * i, 1.0) for i in range(1, n)]
    return Chart(f"polar_first_R{2 * n}", 2 * n, form_from_terms(2 * n, terms),
                 lambda q: np.asarray(q)[..., 0] > R_MIN)


def cotangent_cylinder_chart(a: float = np.inf) -> Chart:
    """(z, theta, p_z, p_theta) with form dp_theta ^ dtheta + dp_z ^ dz."""
    return Chart("cotangent_cylinder", 4, form_from_terms(4, [(3, 1, 1.0), (2, 0, 1.0)]),
                 lambda q: np.abs(np.asarray(q)[..., 0]) <= a)


def polar_cotangent_chart(n: int) -> Chart:
    """(r, theta, x_3..x_n, p_r, p_theta, y_3..y_n): cotangent lift of polar coordinates.

    Form dp_r ^ dr + dp_theta ^ dtheta + sum dy_i ^ dx_i, r > R_MIN.
    """
    return Chart(f"polar_cotangent_R{2 * n}", 2 * n,
                 form_from_terms(2 * n, [(n + i, i, 1.0) for i in range(n)]),
                 lambda q: np.asarray(q)[..., 0] > R_MIN)


def form_matrix(chart: Chart, q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if q.shape[-1] != chart.dim:
        raise InvalidArgument(f"point of dimension {q.shape[-1]} in a {chart.dim}-dimensional chart")
    if not np.all(chart.domain(q)):
        raise DomainError(f"point outside the domain of chart {chart.name}")
    return chart.form(q)


# --------------------------------------------------------------------------
# Jacobians and defects


def _fd_jacobian(f, q, h):
    """Central differences; q has shape (N, d), h shape (N,).  Returns (N, m, d)."""
    N, d = q.shape
    steps = np.einsum("n,ij->nij", h, np.eye(d))
    stencil = np.concatenate([q[:, None, :] + steps, q[:, None, :] - steps], axis=1)
    vals = np.asarray(f(stencil.reshape(-1, d))).reshape(N, 2 * d, -1)
    return np.transpose((vals[:, :d] - vals[:, d:]) / (2 * h[:, None, None]), (0, 2, 1))


def _stencil_ok(chart, q, h):
    N, d = q.shape
    steps = np.einsum("n,ij->nij", h, np.eye(d))
    stencil = np.concatenate([q[:, None, :] + steps, q[:, None, :] - steps], axis=1)
    return np.all(chart.domain(stencil.reshape(-1, d)).reshape(N, 2 * d), axis=1)


def jacobian_batch(m: SymplecticMapSpec, q, h: float = 1e-5, richardson: bool = False,
                   reductions: int = 3):
    """Jacobians for a batch of points.

    Returns ``(J, ok)``; ``ok`` is False where even the reduced step leaves
    the chart domain (those Jacobians are NaN).
    """
    q = np.atleast_2d(np.asarray(q, dtype=float))
    if m.analytic_jacobian is not None:
        return np.asarray(m.analytic_jacobian(q)).reshape(len(q), -1, q.shape[1]), m.source.domain(q)
    hs = np.full(len(q), float(h))
    ok = _stencil_ok(m.source, q, hs)
    for _ in range(reductions):
        if ok.all():
            break
        hs = np.where(ok, hs, hs / 2)
        ok = _stencil_ok(m.source, q, hs)
    J = np.full((len(q), np.shape(m.eval(q[:1]))[-1], q.shape[1]), np.nan)
    if ok.any():
        J1 = _fd_jacobian(m.eval, q[ok], hs[ok])
        if richardson:
            J2 = _fd_jacobian(m.eval, q[ok], hs[ok] / 2)
            J1 = (4 * J2 - J1) / 3
        J[ok] = J1
    return J, ok


def jacobian(m: SymplecticMapSpec, q, h: float = 1e-5) -> np.ndarray:
    """Jacobian at a single point (central differences unless analytic)."""
    q = np.asarray(q, dtype=float)
    J, ok = jacobian_batch(m, q[None, :], h)
    if not ok[0]:
        raise DomainError("point too close to the chart boundary for the difference stencil")
    return J[0]


def _defects(m, q, J):
    fq = m.eval(q)
    Ws = m.source.form(q)
    Wt = m.target.form(fq)
    pull = np.einsum("nki,nkl,nlj->nij", J, Wt, J)
    return np.max(np.abs(pull - Ws), axis=(1, 2))


def symplecticity_defect_batch(m: SymplecticMapSpec, q, h: float = 1e-5, tol: float | None = None):
    """max |J^T Omega_target(f(q)) J - Omega_source(q)| per sample; NaN where skipped."""
    q = np.atleast_2d(np.asarray(q, dtype=float))
    J, ok = jacobian_batch(m, q, h)
    out = np.full(len(q), np.nan)
    if ok.any():
        out[ok] = _defects(m, q[ok], J[ok])
        if tol is not None and m.analytic_jacobian is None:
            bad = np.where(ok)[0][out[ok] >= tol]
            if len(bad):
                Jr, okr = jacobian_batch(m, q[bad], h, richardson=True)
                d2 = np.full(len(bad), np.nan)
                d2[okr] = _defects(m, q[bad][okr], Jr[okr])
                out[bad] = np.fmin(out[bad], d2)
    return out, J, ok


def symplecticity_defect(m: SymplecticMapSpec, q, h: float = 1e-5, tol: float | None = None) -> float:
    q = np.asarray(q, dtype=float)
    if not np.all(m.source.domain(q[None, :])):
        raise DomainError("point outside the source chart")
    d, _, ok = symplecticity_defect_batch(m, q[None, :], h, tol)
    if not ok[0]:
        raise DomainError("point too close to the chart boundary for the difference stencil")
    return float(d[0])


# --------------------------------------------------------------------------
# composition and verification


def compose(*maps: SymplecticMapSpec, name: str | None = None) -> SymplecticMapSpec:
    """maps[-1] o ... o maps[0]."""
    first, last = maps[0], maps[-1]

    def ev(q):
        for mp in maps:
            q = mp.eval(q)
        return q

    jac = None
    if all(mp.analytic_jacobian is not None for mp in maps):
        def jac(q):
            q = np.atleast_2d(q)
            J = maps[0].analytic_jacobian(q)
            x = maps[0].eval(q)
            for mp in maps[1:]:
                J = np.einsum("nij,njk->nik", mp.analytic_jacobian(x), J)
                x = mp.eval(x)
            return J

    return SymplecticMapSpec(first.source, last.target, ev, jac, last.containment_target,
                             name or " o ".join(mp.name for mp in reversed(maps)))


def linear_map(matrix, source: Chart, target: Chart, name: str = "linear",
               containment_target=None) -> SymplecticMapSpec:
    A = np.asarray(matrix, dtype=float)

    def jac(q):
        q = np.atleast_2d(q)
        return np.broadcast_to(A, (len(q),) + A.shape).copy()

    return SymplecticMapSpec(source, target, lambda q: np.asarray(q) @ A.T, jac, containment_target, name)


def verify_map(m: SymplecticMapSpec | PiecewiseMap, sampler, n_samples: int, tol: float = 1e-6,
               seed: int = 0, h: float = 1e-5, seam_samples: int | None = None) -> VerificationReport:
    """Aggregate symplecticity, area, containment and seam checks over random samples.

    ``sampler(rng, n)`` returns candidate source points; for a piecewise map it
    is a dict ``label -> sampler``.  Out-of-domain samples are skipped and
    counted.
    """
    if n_samples < 1:
        raise InvalidArgument("n_samples must be >= 1")
    if isinstance(m, PiecewiseMap):
        return _verify_piecewise(m, sampler, n_samples, tol, seed, h, seam_samples)
    rng = np.random.Generator(np.random.Philox(seed))
    q = np.atleast_2d(sampler(rng, n_samples))
    inside = m.source.domain(q)
    q = q[inside]
    rep = VerificationReport(skipped=int(np.count_nonzero(~inside)))
    if len(q) == 0:
        return rep
    defects, J, ok = symplecticity_defect_batch(m, q, h, tol)
    rep.skipped += int(np.count_nonzero(~ok))
    rep.samples = int(np.count_nonzero(ok))
    if rep.samples:
        rep.max_symplectic_defect = float(np.nanmax(defects))
        if m.source.dim == 2:
            rep.max_area_defect = float(np.max(np.abs(np.linalg.det(J[ok]) - 1.0)))
    if m.containment_target is not None:
        img = m.eval(q)
        rep.containment_failures = int(np.count_nonzero(~m.containment_target(img)))
    return rep


def _verify_piecewise(pm, samplers, n_samples, tol, seed, h, seam_samples):
    rep = VerificationReport()
    per_piece = {}
    for i, (label, piece) in enumerate(sorted(pm.pieces.items())):
        r = verify_map(piece, samplers[label], n_samples, tol, seed + 1000 * i, h)
        per_piece[label] = r.max_symplectic_defect
        rep = rep.merge(r)
    rep.extras = {"piece_defects": per_piece}
    rng = np.random.Generator(np.random.Philox(seed + 7919))
    gaps = []
    for seam in pm.seams:
        pa, pb = seam.sampler(rng, seam_samples or n_samples)
        ia = pm.pieces[seam.piece_a].eval(pa)
        ib = pm.pieces[seam.piece_b].eval(pb)
        gaps.append(float(np.max(np.linalg.norm(ia - ib, axis=-1))) if len(pa) else 0.0)
    rep.seam_max_gap = max(gaps, default=0.0)
    return rep
