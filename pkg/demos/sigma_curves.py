"""The disk-to-square transport behind the cube x diamond embedding.

Circles of action a go to rectangle boundaries of the same area; the script
writes a few of them as polylines and checks the preimage bounds.
"""
import numpy as np

from lagbarrier import rearrangements as ra

sm = ra.SigmaMap(n=2, eps=0.2)
rows = []
for a in (0.5, 1.0, 2.0, 3.0, 3.9):
    pts = sm.curve_points(a, 400, corners=True)
    print(f"a={a:.1f}  half width {sm.X(a):.4f}  half height {sm.H(a):.4f}  area {ra.shoelace(pts):.12f}")
    rows += [(a, x, y) for x, y in pts]
np.savetxt("sigma_curves.csv", np.array(rows), delimiter=",", header="action,x,y", comments="")

rep = ra.verify_sigma(sm)
for key in ("item1_restricted_failures", "item1_unrestricted_lower_violations", "item1_upper_failures",
            "item2_failures", "item3_coverage", "cell_area_max_rel_error"):
    print(key, rep[key])

lam = 0.9
rng = np.random.Generator(np.random.Philox(0))
out = ra.phi_lambda_batch(2, lam, 0.05, ra.sample_lambda_cube_diamond(rng, 1000, 2, lam, 0.2))
print("preimages in B^4(4):", out["in_ball"].all(), " x = 0 fibers in L:", out["in_L"][out["x_zero"]].all())
