import math

import numpy as np
import pytest

from lagbarrier import convex as cv
from lagbarrier.errors import DomainError, InvalidArgument

STANDARD = [cv.ball(1.3, 2), cv.cube(1, 2), cv.cross_polytope(1, n=2), cv.ellipsoid(1, 2),
            cv.ball(1, 3), cv.cube(1, 0.5, 2), cv.ellipsoid(1, 1.3, 0.7)]


def directions(n, count=200, seed=3):
    rng = np.random.default_rng(seed)
    u = rng.normal(size=(count, n))
    return u / np.linalg.norm(u, axis=1, keepdims=True)


def test_support_examples():
    assert cv.support(cv.cube(1, 1), [1, 0]) == pytest.approx(1)
    assert cv.support(cv.cross_polytope(1, n=2), [1, 1]) == pytest.approx(1)
    assert cv.support(cv.ball(2.5, 3), [0, 0.6, 0.8]) == pytest.approx(2.5)


def test_zero_direction_rejected():
    with pytest.raises(InvalidArgument):
        cv.support(cv.ball(1, 2), [0, 0])


def test_polar_dual_kinds():
    assert cv.polar_dual(cv.cube(1, 1, 1)).kind == "cross_polytope"
    d = cv.polar_dual(cv.ball(1, 2))
    assert d.kind == "ball" and d.params[0] == pytest.approx(1)
    e = cv.polar_dual(cv.ellipsoid(1, 2))
    assert np.allclose(e.params, [1, 0.5])


def test_polar_requires_interior_origin():
    with pytest.raises(DomainError):
        cv.polar_dual(cv.polytope([(0.1, 0), (1, 0), (1, 1), (0.1, 1)]))


@pytest.mark.parametrize("body", STANDARD + [cv.polytope([(1, 0), (0, 1), (-1, 0.2), (-0.3, -1)])],
                         ids=lambda b: b.kind)
def test_dual_involution(body):
    u = directions(body.dim)
    back = cv.polar_dual(cv.polar_dual(body))
    assert np.max(np.abs(cv.support(back, u) - cv.support(body, u))) <= 1e-6


@pytest.mark.parametrize("body", STANDARD, ids=lambda b: b.kind)
def test_gauge_support_duality(body):
    u = directions(body.dim)
    assert np.max(np.abs(cv.support(cv.polar_dual(body), u) - cv.gauge(body, u))) <= 1e-8


@pytest.mark.parametrize("body", STANDARD, ids=lambda b: b.kind)
def test_support_axioms(body):
    u, v = directions(body.dim, seed=1), directions(body.dim, seed=2)
    h = cv.support(body, u)
    assert np.all(h > 0)
    assert np.allclose(cv.support(body, 3.7 * u), 3.7 * h, atol=1e-10)
    assert np.all(cv.support(body, u + v) <= h + cv.support(body, v) + 1e-12)
    assert np.allclose(cv.support(body, -u), h)


def test_contains_examples():
    assert cv.contains(cv.cube(1, 1), [0.5, -0.9])
    assert not cv.contains(cv.cross_polytope(1, n=2), [0.6, 0.6])
    assert cv.contains(cv.ball(1, 2), [math.cos(0.3), math.sin(0.3)])
    with pytest.raises(InvalidArgument):
        cv.contains(cv.ball(1, 2), [0, 0, 0])


def test_radial_extremes_examples():
    r = cv.radial_extremes(cv.ball(2, 3))
    assert (r.k_min, r.k_max) == pytest.approx((2, 2))
    r = cv.radial_extremes(cv.cube(1, 1))
    assert (r.k_min, r.k_max) == pytest.approx((1, math.sqrt(2)))
    r = cv.radial_extremes(cv.ellipsoid(1, 2))
    assert (r.k_min, r.k_max) == pytest.approx((1, 2))


def test_radial_extremes_numeric_polytope():
    # regular hexagon with circumradius 1: inradius cos(pi/6)
    t = np.arange(6) * math.pi / 3
    r = cv.radial_extremes(cv.polytope(np.column_stack([np.cos(t), np.sin(t)])))
    assert r.k_min == pytest.approx(math.cos(math.pi / 6), abs=1e-9)
    assert r.k_max == pytest.approx(1, abs=1e-9)


@pytest.mark.parametrize("body", STANDARD, ids=lambda b: b.kind)
def test_ball_sandwich(body):
    r = cv.radial_extremes(body)
    pts = cv.boundary_samples(body, 1000, seed=5)
    norms = np.linalg.norm(pts, axis=1)
    assert np.all(norms >= r.k_min - 1e-9) and np.all(norms <= r.k_max + 1e-9)


def test_pinching_report():
    alpha = (4 / math.pi) ** (2 / 3)
    rep = cv.pinching_report(cv.ellipsoid(1, 1.1), alpha)
    assert rep["ratio"] == pytest.approx(1.1) and rep["is_alpha_pinched"]
    assert cv.pinching_report(cv.ball(1, 2), 1.01)["ratio"] == pytest.approx(1)
    rep = cv.pinching_report(cv.cube(1, 1), 1.2)
    assert rep["ratio"] == pytest.approx(math.sqrt(2)) and not rep["is_alpha_pinched"]
    with pytest.raises(InvalidArgument):
        cv.pinching_report(cv.ball(1, 2), 1.0)


def test_exact_volumes():
    assert cv.volume(cv.cross_polytope(1, n=2)).value == pytest.approx(2)
    assert cv.volume(cv.cube(1, 1, 1)).value == pytest.approx(8)
    assert cv.volume(cv.ball(1, 3)).value == pytest.approx(4 * math.pi / 3)
    assert cv.volume(cv.ellipsoid(1, 2)).value == pytest.approx(2 * math.pi)
    hexagon = cv.polytope([(1, 0), (0.5, 1), (-0.5, 1), (-1, 0), (-0.5, -1), (0.5, -1)])
    assert cv.volume(hexagon).value == pytest.approx(3)


@pytest.mark.parametrize("body, exact", [(cv.ball(1, 2), math.pi), (cv.cube(1, 0.5, 2), 8.0),
                                         (cv.ellipsoid(1, 2), 2 * math.pi), (cv.ball(1, 3), 4 * math.pi / 3)])
def test_monte_carlo_volume_within_4_sigma(body, exact):
    v = cv.volume(body, "monte_carlo", 200_000, seed=11)
    assert v.method == "monte_carlo"
    assert abs(v.value - exact) <= 4 * max(v.std_error, 1e-12)


def test_monte_carlo_is_reproducible():
    a = cv.volume(cv.ellipsoid(1, 2), "monte_carlo", 50_000, seed=4)
    b = cv.volume(cv.ellipsoid(1, 2), "monte_carlo", 50_000, seed=4)
    assert a == b
    with pytest.raises(InvalidArgument):
        cv.volume(cv.ball(1, 2), "monte_carlo", 10)


def test_mahler_examples():
    assert cv.mahler_sqrt(cv.ball(1, 2)).value == pytest.approx(math.pi)
    assert cv.mahler_sqrt(cv.cube(1, 1)).value == pytest.approx(2 * math.sqrt(2))
    m = cv.mahler_sqrt(cv.ellipsoid(1, 1.1), "monte_carlo", 100_000, seed=2).value
    assert math.pi / 1.1 <= m <= 1.1 * math.pi


def test_sampled_support_body():
    body = cv.sample_support(cv.ellipsoid(1, 1.5), 720)
    u = directions(2)
    assert np.max(np.abs(cv.support(body, u) - cv.support(cv.ellipsoid(1, 1.5), u))) < 1e-4


def test_json_round_trip():
    for body in STANDARD + [cv.polytope([(1, 0), (0, 1), (-1, 0), (0, -1)])]:
        back = cv.body_from_dict(cv.body_to_dict(body))
        u = directions(body.dim, 20)
        assert np.allclose(cv.support(back, u), cv.support(body, u))
    assert cv.body_from_dict({"kind": "cube", "dim": 2, "params": [1, 1]}).kind == "cube"
    with pytest.raises(InvalidArgument):
        cv.body_from_dict({"kind": "blob", "dim": 2, "params": [1]})
    with pytest.raises(InvalidArgument):
        cv.ball(1, 9)
