import math

import numpy as np
import pytest

from lagbarrier import convex as cv
from lagbarrier import products as pr
from lagbarrier import symplectic as sp
from lagbarrier.errors import InvalidArgument


def test_standard_ids_construct():
    for did in pr.STANDARD_IDS:
        dom = pr.standard_domain(did)
        assert dom.domain_id == did and dom.citation
    with pytest.raises(InvalidArgument):
        pr.standard_domain("torus")


def test_annulus_domain_shape():
    dom = pr.standard_domain("annulus_disk", n=3, delta=0.3)
    assert dom.dim == 3 and dom.is_holed and dom.position.delta == 0.3


def test_a_r_vertices():
    body = pr.standard_domain("a_r_diamond", r=2).position
    V = cv.polytope_vertices(body)
    expected = {(0, 1), (2, 1), (2, -1), (0, -1), (-2, 0)}
    assert {tuple(np.round(v, 12) + 0.0) for v in V} == expected


def test_contains_point_examples():
    assert not pr.contains_point(pr.standard_domain("punctured_cube_diamond"), [0, 0, 0.2, 0.3])
    assert pr.contains_point(pr.standard_domain("annulus_disk", delta=0.5), [0.7, 0, 0, 0.5])
    assert not pr.contains_point(pr.standard_domain("disk_square"), [0.9, 0.9, 0, 0])
    with pytest.raises(InvalidArgument):
        pr.contains_point(pr.standard_domain("disk_disk"), [0, 0, 0])


def test_annulus_closed_convention():
    ann = pr.Annulus(cv.ball(1, 2), 0.5)
    assert ann.contains([0.5, 0.0]) and not ann.contains([0.49, 0.0])
    punct = pr.Annulus(cv.ball(1, 2), 0.0)
    assert not punct.contains([0.0, 0.0]) and punct.contains([1e-9, 0.0])
    with pytest.raises(InvalidArgument):
        pr.Annulus(cv.ball(1, 2), 1.0)
    with pytest.raises(InvalidArgument):
        pr.PuncturedBody(cv.cube(1, 1), ((2.0, 0.0),))


@pytest.mark.parametrize("did", pr.STANDARD_IDS)
def test_membership_agrees_with_factors(did):
    dom = pr.standard_domain(did, delta=0.4)
    rng = np.random.default_rng(8)
    n = dom.dim
    z = 2.2 * rng.random((1000, 2 * n)) - 1.1
    got = pr.contains_point(dom, z)
    pos, mom = dom.position, dom.momentum
    want = pr.position_contains(pos, z[:, :n]) & cv.contains(mom, z[:, n:])
    assert np.array_equal(got, want)


def test_sampling_lands_in_domain():
    rng = np.random.Generator(np.random.Philox(1))
    for did in pr.STANDARD_IDS:
        dom = pr.standard_domain(did, delta=0.3)
        assert np.all(pr.contains_point(dom, pr.sample_domain(dom, rng, 500)))


def test_balance_stretch():
    assert np.allclose(pr.balance_stretch(1, 1).analytic_jacobian(np.zeros((1, 2)))[0], np.eye(2))
    m = pr.balance_stretch(4, 1)
    img = m.eval(np.array([[4.0, 0.0], [0.0, 1.0]]))
    assert np.allclose(img, [[2, 0], [0, 2]])
    rep = sp.verify_map(pr.balance_stretch(0.3, 2.0, n=2), lambda rng, k: rng.random((k, 4)), 50)
    assert rep.max_symplectic_defect <= 1e-15


def test_balance_stretch_sandwich_scaling():
    # D(k_min) x D(1/k_max) -> sqrt(k_min/k_max) (D x D)
    kmin, kmax = 1.0, 1.3
    m = pr.balance_stretch(kmin, 1 / kmax)
    s = math.sqrt(kmin / kmax)
    pts = np.array([[kmin, 0.0], [0.0, 1 / kmax]])
    assert np.allclose(np.abs(m.eval(pts)).max(axis=0), [s, s])


def test_scale_domain():
    dom = pr.scale_domain(pr.standard_domain("annulus_disk", delta=0.3), 2)
    assert dom.scale == 2 and dom.position.outer.params[0] == pytest.approx(2)
    assert pr.contains_point(dom, [1.5, 0, 0, 1.5])
    with pytest.raises(InvalidArgument):
        pr.scale_domain(dom, 0)


def test_domain_file_round_trip():
    for did in ("annulus_disk", "punctured_cube_diamond", "a_r_diamond"):
        dom = pr.standard_domain(did, delta=0.2)
        back = pr.domain_from_dict(pr.domain_to_dict(dom))
        z = pr.sample_domain(dom, np.random.default_rng(0), 50)
        assert np.all(pr.contains_point(back, z))
    with pytest.raises(InvalidArgument):
        pr.domain_from_dict({"position": {}})
