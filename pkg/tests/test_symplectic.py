import math

import numpy as np
import pytest

from lagbarrier import cotangent as ct
from lagbarrier import symplectic as sp
from lagbarrier.errors import DomainError, InvalidArgument


def identity(n):
    c = sp.standard_chart(n)
    return sp.linear_map(np.eye(2 * n), c, c, "id")


def box_sampler(dim, scale=1.0):
    return lambda rng, k: scale * (2 * rng.random((k, dim)) - 1)


def test_standard_form_matrix():
    om = sp.form_matrix(sp.standard_chart(2), np.zeros(4))
    # dy_i ^ dx_i: Omega[y_i, x_i] = 1
    expected = np.zeros((4, 4))
    expected[2, 0] = expected[3, 1] = 1
    expected[0, 2] = expected[1, 3] = -1
    assert np.array_equal(om, expected)


def test_polar_first_coefficient():
    om = sp.form_matrix(sp.polar_first_chart(2), [2.0, 0.3, 0.1, 0.2])
    assert om[0, 1] == pytest.approx(-2)
    with pytest.raises(DomainError):
        sp.form_matrix(sp.polar_first_chart(2), [-1.0, 0, 0, 0])


def test_cotangent_cylinder_form():
    om = sp.form_matrix(sp.cotangent_cylinder_chart(), [0.3, 1.0, 0.2, 0.1])
    # (z, th, p_z, p_th): dp_th ^ dth + dp_z ^ dz
    assert om[3, 1] == 1 and om[2, 0] == 1 and om[1, 3] == -1
    assert np.allclose(om, -om.T)


def test_identity_defect_zero():
    m = identity(2)
    assert np.allclose(sp.jacobian(m, np.ones(4) * 0.3), np.eye(4))
    rep = sp.verify_map(m, box_sampler(4), 100, tol=1e-9)
    assert rep.max_symplectic_defect == 0 and rep.containment_failures == 0 and rep.samples == 100


def test_stretch_jacobian_and_scaling_defect():
    c = sp.standard_chart(1)
    t = 1.7
    st = sp.linear_map(np.diag([t, 1 / t]), c, c)
    assert np.allclose(sp.jacobian(st, [0.1, 0.2]), np.diag([t, 1 / t]))
    assert sp.symplecticity_defect(st, [0.1, 0.2]) <= 1e-15
    double = sp.SymplecticMapSpec(c, c, lambda q: 2 * np.asarray(q))
    assert sp.symplecticity_defect(double, [0.3, -0.2]) == pytest.approx(3, abs=1e-6)


def test_fd_jacobian_matches_analytic():
    m = ct.cylinder_f_spec(math.pi)
    q = np.array([0.0, 0.0, 0.0, 0.0])
    analytic = ct.cylinder_f_jacobian(math.pi, q[None])[0]
    assert np.max(np.abs(sp.jacobian(m, q) - analytic)) <= 1e-7


def test_two_dim_area_and_symplectic_defects_agree():
    c = sp.standard_chart(1)
    shear = sp.SymplecticMapSpec(c, c, lambda q: np.stack([q[..., 0] + np.sin(q[..., 1]), 1.01 * q[..., 1]], -1))
    rep = sp.verify_map(shear, box_sampler(2), 500)
    assert abs(rep.max_symplectic_defect - rep.max_area_defect) <= 1e-8


def test_composition_defect_bound():
    c = sp.standard_chart(1)
    eps = 1e-4
    a = sp.SymplecticMapSpec(c, c, lambda q: np.stack([q[..., 0] * (1 + eps), q[..., 1] + q[..., 0] ** 2], -1))
    b = sp.SymplecticMapSpec(c, c, lambda q: np.stack([q[..., 0] + np.sin(q[..., 1]), q[..., 1]], -1))
    sampler = box_sampler(2, 0.5)
    da = sp.verify_map(a, sampler, 300, seed=1).max_symplectic_defect
    db = sp.verify_map(b, sampler, 300, seed=1).max_symplectic_defect
    dc = sp.verify_map(sp.compose(a, b), sampler, 300, seed=1).max_symplectic_defect
    assert dc <= 10 * max(da, db, 1e-12)


def test_verify_map_counts_skipped():
    pc = sp.polar_first_chart(1)
    m = sp.SymplecticMapSpec(pc, pc, lambda q: np.asarray(q))
    rep = sp.verify_map(m, lambda rng, k: np.column_stack([rng.random(k) - 0.5, rng.random(k)]), 400)
    assert rep.skipped > 0 and rep.samples + rep.skipped == 400
    with pytest.raises(InvalidArgument):
        sp.verify_map(m, box_sampler(2), 0)


def test_report_merge_and_keys():
    a = sp.VerificationReport(samples=3, max_symplectic_defect=1e-9, containment_failures=1)
    b = sp.VerificationReport(samples=2, max_symplectic_defect=2e-9, seam_max_gap=1e-12)
    m = a.merge(b)
    assert m.samples == 5 and m.max_symplectic_defect == 2e-9 and m.containment_failures == 1
    assert list(m.to_dict())[:5] == ["samples", "max_symplectic_defect", "max_area_defect",
                                     "containment_failures", "seam_max_gap"]
