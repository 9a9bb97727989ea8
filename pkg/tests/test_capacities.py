import math

import numpy as np
import pytest

from lagbarrier import capacities as cp
from lagbarrier import convex as cv
from lagbarrier import products as pr
from lagbarrier.errors import ConsistencyError, InvalidArgument, NotFound, PreconditionError


def test_registry():
    assert cp.registry_lookup("cube_diamond", 3).value == 4
    assert cp.registry_lookup("biran_holed_ball(1)").value == pytest.approx(0.5)
    assert cp.registry_lookup("ball(4)").value == 4
    assert cp.registry_lookup("disk_square").citation
    with pytest.raises(NotFound):
        cp.registry_lookup("torus")
    with pytest.raises(InvalidArgument):
        cp.registry_lookup("ball", -1)


def test_f_delta_examples():
    assert np.allclose(cp.f_delta(cv.ball(1, 3), 0.0, np.zeros(3)), [0.5, 0, 0])
    img = cp.f_delta(cv.cube(1, 1), 0.5, [0.2, 0.1])
    assert np.allclose(img, [0.95, 0.1]) and pr.Annulus(cv.cube(1, 1), 0.5).contains(img)
    d = 0.3
    assert np.allclose(cp.f_delta(cv.ball(1, 2), d, [-(1 - d) / 2, 0]), [d, 0])
    with pytest.raises(PreconditionError):
        cp.f_delta(cv.ball(1, 2), 0.5, [0.3, 0.0])
    with pytest.raises(PreconditionError):
        cp.f_delta(cv.polytope([(1, 0), (0, 1), (-0.5, -0.5)]), 0.0, [0, 0])


@pytest.mark.parametrize("K, delta, expected", [(cv.ball(1, 2), 0.0, 2.0), (cv.cube(1, n=3), 0.0, 2.0),
                                                (cv.ball(1, 3), 0.3, 1.4)])
def test_lower_bound_holed(K, delta, expected):
    c = cp.lower_bound_holed(K, delta, samples=10_000)
    assert c.passed and c.samples == 10_000
    assert c.value == pytest.approx(expected)


def test_lower_bound_holed_unresolved():
    K = cv.polytope([(1, 0), (0.3, 1), (-1, 0), (-0.3, -1)])
    assert cp.lower_bound_holed(K, 0.2) is None


def test_annulus_upper_certificate():
    c = cp.annulus_upper_certificate(2, 0.5, 1e-3, 10_000)
    assert c.passed and c.value == pytest.approx(1.001)
    assert c.defect <= 1e-9
    assert "gromov-nonsqueezing" in c.axioms


def test_annulus_squeeze_fd_agrees():
    from lagbarrier import symplectic as sp
    m = cp.annulus_upper_map(2, 0.3)
    fd = sp.SymplecticMapSpec(m.source, m.target, m.eval)
    dom = pr.standard_domain("annulus_disk", delta=0.3)
    q = cp.to_polar_cotangent(pr.sample_domain(dom, np.random.default_rng(1), 300), 2)
    q = q[1 + q[:, 3] > 0.1]
    J1, ok = sp.jacobian_batch(fd, q)
    assert np.max(np.abs(J1[ok] - m.analytic_jacobian(q[ok]))) <= 1e-6


def test_annulus_squeeze_rejected_in_dimension_three():
    c = cp.annulus_upper_certificate(3, 0.3, 1e-3, 2000)
    assert not c.passed


def test_biran_cube():
    c = cp.upper_bound_biran_cube(2, 0.99)
    assert c.passed and c.value == pytest.approx(2 / 0.99 ** 2)
    assert c.details["bound_2_over_lambda"] == pytest.approx(2.0202, abs=1e-4)
    assert c.details["limit"] == 2
    assert cp.upper_bound_biran_cube(3, 0.9).details["bound_2_over_lambda"] == pytest.approx(2.2222, abs=1e-4)
    lam = cp.biran_lambda_for(1e-3)
    assert cp.upper_bound_biran_cube(2, lam).value == pytest.approx(2.001)
    with pytest.raises(PreconditionError):
        cp.upper_bound_biran_cube(2, 1.0)


def test_pinched_product_bounds():
    iv = cp.pinched_product_bounds(cv.ball(1, 2))
    assert (iv.lower, iv.upper) == pytest.approx((4, 4)) and not iv.extras["discrepancy"]
    iv = cp.pinched_product_bounds(cv.ellipsoid(1, 1.05))
    assert iv.lower == pytest.approx(4 / math.sqrt(1.05)) and iv.upper == pytest.approx(4 * math.sqrt(1.05))
    holed = cp.pinched_product_bounds(cv.ellipsoid(1, 1.05), holed=True)
    assert holed.extras["sandwich"] == pytest.approx([2 / 1.05, 2 * 1.05])


def test_barrier_test():
    r = cp.barrier_test(cv.ball(1, 2))
    assert r["barrier_certified"] and (r["left"], r["mid"], r["right"]) == pytest.approx((2, math.pi, 4))
    r = cp.barrier_test(cv.ellipsoid(1, 1.1), method="monte_carlo", samples=200_000)
    assert r["barrier_certified"] and math.pi / 1.1 <= r["mid"] <= 1.1 * math.pi
    with pytest.raises(PreconditionError, match="1.3"):
        cp.barrier_test(cv.ellipsoid(1, 1.3))
    with pytest.raises(PreconditionError):
        cp.barrier_test(cv.ball(1, 3))


def test_biran_pinched_bounds():
    iv = cp.biran_pinched_bounds(cv.ball(1 / math.sqrt(math.pi), 4), 1.0)
    assert iv.extras["sandwich"] == pytest.approx([0.5, 0.5])
    iv = cp.biran_pinched_bounds((1.0, 1.2), math.pi * 1.1)
    assert (iv.lower, iv.upper) == pytest.approx((math.pi * 1.1 / 4, math.pi * 1.1))
    assert iv.extras["strict_upper"]
    with pytest.raises(PreconditionError):
        cp.biran_pinched_bounds((1.0, 1.5), 1.0)


@pytest.mark.parametrize("did, params, lo, hi", [
    ("annulus_disk", {"delta": 0.5}, 1.0, 1.001),
    ("punctured_cube_diamond", {}, 2.0, 2.001),
    ("disk_square", {}, 4.0, 4.0),
    ("a_r_diamond", {"r": 2.0}, 4.0, 4.0),
    ("rect_diamond", {"a": 0.5, "b": 2.0}, 2.0, 2.0),
    ("disk_disk", {}, 4.0, 4.0),
])
def test_capacity_of(did, params, lo, hi):
    iv = cp.capacity_of(pr.standard_domain(did, **params), samples=4000)
    assert iv.lower == pytest.approx(lo, abs=1e-12) and iv.upper == pytest.approx(hi, abs=1e-12)
    assert iv.extras["binding"]["lower"] and iv.extras["binding"]["upper"]


def test_a_min_matches_interval():
    for did, params in (("annulus_disk", {"delta": 0.3}), ("punctured_cube_diamond", {"n": 3})):
        iv = cp.capacity_of(pr.standard_domain(did, **params), samples=4000)
        assert iv.lower - 1e-3 <= iv.a_min <= iv.upper + 1e-3


def test_generic_dual_pair():
    K = cv.ellipsoid(1, 2)
    iv = cp.capacity_of(pr.LagrangianProductDomain(K, cv.polar_dual(K)))
    assert (iv.lower, iv.upper) == pytest.approx((4, 4))
    K = cv.polytope([(1, 0), (0.5, 0.9), (-0.5, 0.9), (-1, 0), (-0.5, -0.9), (0.5, -0.9)])
    iv = cp.capacity_of(pr.LagrangianProductDomain(K, cv.polar_dual(K)))
    ext = cv.radial_extremes(K)
    assert iv.lower == pytest.approx(4 * ext.k_min / ext.k_max, rel=1e-6)


@pytest.mark.parametrize("mu", [0.5, 2.0])
def test_conformality(mu):
    # the reported epsilon is kept fixed, so the base is computed at eps / mu^2
    eps = 1e-3
    for did in ("disk_square", "annulus_disk", "cube_diamond"):
        base = cp.capacity_of(pr.standard_domain(did, delta=0.3), eps / mu ** 2, samples=2000,
                              with_a_min=False)
        scaled = cp.capacity_of(pr.scale_domain(pr.standard_domain(did, delta=0.3), mu), eps, samples=2000,
                                with_a_min=False)
        assert scaled.lower == pytest.approx(mu ** 2 * base.lower)
        assert scaled.upper == pytest.approx(mu ** 2 * base.upper)


def test_monotonicity_consistency():
    # annulus(0.5) x D inside annulus(0.3) x D inside D x D
    small = cp.capacity_of(pr.standard_domain("annulus_disk", delta=0.5), samples=2000, with_a_min=False)
    mid = cp.capacity_of(pr.standard_domain("annulus_disk", delta=0.3), samples=2000, with_a_min=False)
    big = cp.capacity_of(pr.standard_domain("disk_disk"), with_a_min=False)
    assert small.lower <= mid.upper and mid.lower <= big.upper


def test_inconsistent_interval_raises():
    with pytest.raises(ConsistencyError) as err:
        cp.intersect([cp.Certificate("lower", 3.0, "a"), cp.Certificate("upper", 2.0, "b")])
    assert len(err.value.certificates) == 2


def test_rejected_certificate_does_not_bind():
    iv = cp.intersect([cp.Certificate("lower", 1.0, "a"), cp.Certificate("upper", 0.5, "bad", failures=3),
                       cp.Certificate("upper", 2.0, "b")])
    assert iv.upper == 2.0 and iv.extras["binding"]["upper"] == "b"
