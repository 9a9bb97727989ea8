import math

import numpy as np
import pytest
from scipy import optimize

from lagbarrier import billiards as bl
from lagbarrier import convex as cv
from lagbarrier.errors import DomainError, InvalidArgument

DIAMOND = cv.cross_polytope(1, n=2)


def test_minkowski_action_examples():
    assert bl.minkowski_action(DIAMOND, [(0, 0), (1, 1)]) == pytest.approx(2)
    assert bl.minkowski_action(DIAMOND, [(-1, 0), (1, 0)]) == pytest.approx(4)
    d = 0.35
    assert bl.minkowski_action(cv.ball(1, 2), [(1, 0), (d, 0)]) == pytest.approx(2 * (1 - d))
    with pytest.raises(InvalidArgument):
        bl.minkowski_action(DIAMOND, [(0, 0)])


def test_trajectory_invariants():
    tr = bl.make_trajectory(DIAMOND, [(0.2, 0.1), (-0.3, 0.5), (0.1, -0.7)], ["outer"] * 3)
    P = tr.bounce_points
    assert np.allclose(tr.chord_lengths, np.linalg.norm(np.roll(P, -1, 0) - P, axis=1))
    assert tr.action == pytest.approx(bl.minkowski_action(DIAMOND, P), abs=1e-10)


def test_disk_orbit_examples():
    assert bl.disk_orbit(2, 1).action == pytest.approx(4)
    assert bl.disk_orbit(3, 1).action == pytest.approx(3 * math.sqrt(3))
    assert bl.disk_orbit(5, 2).action == pytest.approx(10 * math.sin(2 * math.pi / 5))
    for k, m in ((4, 2), (3, 2), (1, 1)):
        with pytest.raises(InvalidArgument):
            bl.disk_orbit(k, m)


def test_disk_orbit_matches_polygon_length():
    for k in range(2, 13):
        for m in range(1, k):
            if math.gcd(k, m) != 1 or not (2 * m < k or (k, m) == (2, 1)):
                continue
            tr = bl.disk_orbit(k, m)
            length = float(np.sum(np.linalg.norm(np.roll(tr.bounce_points, -1, 0) - tr.bounce_points, axis=1)))
            assert abs(tr.action - length) <= 1e-10
            assert np.allclose(tr.chord_lengths, np.sqrt(2 * (1 - np.cos(tr.central_angles))))


def test_disk_orbit_brute_force_perimeter():
    # maximal perimeter of inscribed k-gons is attained by the regular polygon
    rng = np.random.default_rng(0)
    for k in range(2, 9):
        def neg_perimeter(t):
            P = np.column_stack([np.cos(t), np.sin(t)])
            return -np.sum(np.linalg.norm(np.roll(P, -1, 0) - P, axis=1))
        best = min(optimize.minimize(neg_perimeter, np.sort(rng.uniform(0, 2 * math.pi, k))).fun
                   for _ in range(5))
        assert -best == pytest.approx(bl.disk_orbit(k, 1).action, abs=1e-6)


def test_critical_orbit_disk_diameter():
    rep = bl.find_critical_orbit(bl.BilliardTable(cv.ball(1, 2)), 2, ["outer", "outer"], [0.3, 2.9])
    assert rep.converged and rep.gradient_norm <= 1e-9
    assert rep.trajectory.action == pytest.approx(4, abs=1e-9)
    assert rep.extras["reflection_max"] <= 1e-6


def test_critical_orbit_annulus_radial():
    table = bl.annulus_table(0.5)
    rep = bl.find_critical_orbit(table, 2, ["outer", "obstacle0"], [0.1, 0.15])
    assert rep.converged and rep.trajectory.action == pytest.approx(1.0, abs=1e-9)
    assert rep.extras["reflection_max"] <= 1e-6


def test_critical_orbit_square_with_diamond_geometry():
    table = bl.BilliardTable(cv.cube(1, 1), (), DIAMOND)
    rep = bl.find_critical_orbit(table, 2, ["outer", "outer"], np.array([[1.0, 0.1], [-1.0, -0.05]]))
    assert rep.trajectory.action == pytest.approx(4, abs=1e-8)


def test_reflection_law_at_converged_orbits():
    table = bl.annulus_table(0.3)
    for labels in (["outer", "obstacle0"], ["outer", "outer", "outer"], ["outer", "obstacle0", "outer", "obstacle0"]):
        for rep in bl.multistart_orbits(table, labels, starts=8):
            if rep.converged:
                assert rep.extras["reflection_max"] <= 1e-6


@pytest.mark.parametrize("delta", [0.0, 0.1, 0.3, 0.5, 0.8])
def test_annulus_min_action(delta):
    value, tr = bl.annulus_min_action(delta, 8)
    assert value == pytest.approx(2 * (1 - delta), abs=1e-4)
    assert tr.k == 2


def test_annulus_candidates_pure_outer():
    delta = 0.5
    c = bl.annulus_candidates(delta, 6)
    caustic = {d["k"]: d["value"] for d in c["caustic"]}
    assert caustic[2] == pytest.approx(2 * math.sqrt(3))
    # every enumerated pure-outer orbit is at least the radial value
    assert all(s.action >= 2 * (1 - delta) for s in c["stars"])
    assert all(v >= 2 * (1 - delta) for v in caustic.values())
    assert c["radial"].action == pytest.approx(2 * (1 - delta))


def test_annulus_min_action_monotone_in_budget():
    vals = [bl.annulus_min_action(0.3, k)[0] for k in (2, 4, 6)]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


def test_annulus_three_dim():
    value, tr = bl.annulus_min_action(0.5, 4, n=3)
    assert value == pytest.approx(1.0, abs=1e-4) and tr.bounce_points.shape[1] == 3


def test_action_symmetries_and_scaling():
    rng = np.random.default_rng(4)
    P = rng.normal(size=(5, 2))
    a = bl.minkowski_action(DIAMOND, P)
    assert bl.minkowski_action(DIAMOND, np.roll(P, 2, axis=0)) == pytest.approx(a)
    assert bl.minkowski_action(DIAMOND, P[::-1]) == pytest.approx(a)
    assert bl.minkowski_action(DIAMOND, 2.5 * P) == pytest.approx(2.5 * a)


@pytest.mark.parametrize("k", [2, 10])
def test_two_scatterers(k):
    x0 = (k - 1) / k
    value, tr = bl.scatterer_min_action([[x0, 0.0], [-x0, 0.0]], cv.ball(1, 2), cv.ball(1, 2))
    assert value == pytest.approx(2 / k, abs=1e-6)
    assert "outer" in tr.component_labels


def test_single_scatterer_origin():
    value, _ = bl.scatterer_min_action([[0.0, 0.0]], cv.ball(1, 2), cv.ball(1, 2))
    assert value == pytest.approx(2, abs=1e-9)
    with pytest.raises(InvalidArgument):
        bl.scatterer_min_action([], cv.ball(1, 2), cv.ball(1, 2))


def test_punctured_cube_half_diagonal():
    value, tr = bl.scatterer_min_action([[0.0, 0.0]], cv.cube(1, 1), DIAMOND)
    assert value == pytest.approx(2, abs=1e-9)
    outer = tr.bounce_points[tr.component_labels.index("outer")]
    assert np.allclose(np.abs(outer), [1, 1])


def test_lagrange_critical_check():
    rep = bl.lagrange_critical_check(0.5, 2)
    assert rep.converged
    assert np.allclose(rep.extras["cos_alpha"], -0.5, atol=1e-9)
    assert np.allclose(rep.trajectory.central_angles, 2 * math.pi / 3)
    assert rep.extras["total_length"] == pytest.approx(2 * math.sqrt(3))
    assert np.allclose(rep.multipliers, rep.extras["multiplier_closed_form"], atol=1e-8)
    rep = bl.lagrange_critical_check(0.9, 3)
    assert np.allclose(rep.extras["cos_alpha"], 0.62, atol=1e-9)
    with pytest.raises(InvalidArgument):
        bl.lagrange_critical_check(1.0, 2)


def test_trajectory_csv():
    assert bl.trajectory_csv([]) == "index,x,y,component_label\n"
    text = bl.trajectory_csv([bl.disk_orbit(3)])
    lines = text.strip().splitlines()
    assert lines[0] == "index,x,y,component_label" and len(lines) == 4
    assert lines[1].endswith(",outer")


def test_table_validation():
    with pytest.raises(InvalidArgument):
        bl.BilliardTable(cv.ball(1, 2), (bl.ScaledObstacle(1.2),))
    with pytest.raises(InvalidArgument):
        bl.BilliardTable(cv.ball(1, 2), (bl.PointObstacle((1.0, 0.0)),))
    with pytest.raises(InvalidArgument):
        bl.BilliardTable(cv.ball(1, 2), (bl.PointObstacle((0.1, 0.0)), bl.PointObstacle((0.1, 0.0))))
