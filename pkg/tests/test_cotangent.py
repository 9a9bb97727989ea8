import math

import numpy as np
import pytest

from lagbarrier import cotangent as ct
from lagbarrier import symplectic as sp
from lagbarrier.errors import DomainError, InvalidArgument


def test_g_of_a():
    assert ct.g_of_a(math.pi / 2) == pytest.approx(2 * math.pi)
    assert ct.g_of_a(math.pi) == pytest.approx(4 * math.pi)
    assert ct.g_of_a(10) == pytest.approx(4 * math.pi)
    with pytest.raises(InvalidArgument):
        ct.g_of_a(0)


def test_bundle_membership():
    b = ct.CylinderBundle(math.pi, 2.0)
    assert b.contains([1.0, 0.3, 0.5, 0.5])
    assert not b.contains([2.5, 0.3, 0.0, 0.0])
    assert not b.contains([0.0, 0.3, 0.9, 0.9])
    pts = b.sample(np.random.default_rng(0), 2000)
    assert b.contains(pts).all()


def test_cylinder_map_f_origin():
    assert np.allclose(ct.cylinder_map_f(math.pi, [0, 0, 0, 0]), [1, 0, 0, 0])
    with pytest.raises(DomainError):
        ct.cylinder_map_f(math.pi, [0, 0, 1.5, 0])


@pytest.mark.parametrize("R", [1.0, math.pi, 5.0])
def test_cylinder_map_f_defect(R):
    b = ct.CylinderBundle(R)
    rep = sp.verify_map(ct.cylinder_f_spec(R), b.sample, 10_000)
    assert rep.max_symplectic_defect <= 1e-6 and rep.containment_failures == 0
    img = ct.cylinder_f_spec(R).eval(b.sample(np.random.default_rng(1), 5000))
    assert img[:, 0].max() < 2 * math.sqrt(R / math.pi)


def test_fd_agrees_with_analytic():
    # central differences lose accuracy like h^2 |theta| / r^4 near the polar
    # singularity r = 1 + p_theta -> 0, so the comparison keeps r >= 1/4
    q = ct.CylinderBundle(math.pi).sample(np.random.default_rng(2), 4000)
    q = q[1 + q[:, 3] >= 0.25]
    m = ct.cylinder_f_spec(math.pi)
    fd = sp.jacobian_batch(m, q)[0]
    an = ct.cylinder_f_jacobian(math.pi, q)
    assert np.max(np.abs(fd - an)) <= 1e-6


@pytest.mark.parametrize("a, expected", [(1.0, 3.8), (10.0, 4 * math.pi - 0.2)])
def test_lower_certificate(a, expected):
    cert = ct.cylinder_lower_certificate(math.pi, a, 0.1, 10_000)
    assert cert["membership_failures"] == 0
    assert cert["lower"] == pytest.approx(expected)


def test_lower_map_h_identity():
    pt = [0.2, 0.5, 0.1, 0.3]
    assert np.allclose(ct.lower_map_h(1.0, 0.1, pt), pt)


@pytest.mark.parametrize("a", [1.0, math.pi, 5.0])
def test_capacity_sandwich(a):
    res = ct.cylinder_capacity(math.pi, a, 0.1)
    g = ct.g_of_a(a)
    assert res["lower_cert"]["lower"] >= g - 0.2 - 1e-12
    assert res["upper_cert"]["upper"] <= g + 1e-3 + 1e-12
    assert res["defects"]["literal_f"]["max_symplectic_defect"] <= 1e-6


def test_unbounded_cylinder_bound():
    res = ct.cylinder_capacity(2.0, math.inf, 0.1)
    assert res["g"] == pytest.approx(4 * math.sqrt(2 * math.pi))
    assert res["upper_cert"]["upper"] <= res["g"] + 1e-3


def test_camel_examples():
    assert np.allclose(ct.camel_map_g(1.0, [1, 0, 0, 0, 0, 0], "C"), [1, 0, 0, 0])
    th, pth = 0.4, 0.2
    c = ct.camel_map_g(1.0, [1, th, 1.0, 0, pth, 0], "C")
    x = ct.camel_map_g(1.0, [1, th, 1.0, 0, pth, 0], "X+")
    assert np.allclose(c, x)
    c = ct.camel_map_g(1.0, [1, th, -1.0, 0, pth, 0], "C")
    x = ct.camel_map_g(1.0, [1, th, -1.0, 0, pth, 0], "X-")
    assert np.allclose(c, x)
    with pytest.raises(DomainError):
        ct.camel_map_g(1.0, [1, 0, 0, 0, 0, 0], "Y")
    with pytest.raises(DomainError):
        ct.camel_map_g(1.0, [1, 0, 0.5, 0, 0, 0], "X+")


def test_verify_camel():
    rep = ct.verify_camel(1.0, 10_000, 1000)
    assert rep["max_symplectic_defect"] <= 1e-6
    assert rep["seam_max_gap"] <= 1e-9
    for label in ("X+", "X-"):
        assert rep["separation"][label]["third_coordinate_ok"]
    assert rep["hole_constant"] == pytest.approx(4 * math.pi)
    assert 4 * math.pi < 13
