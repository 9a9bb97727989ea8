"""Disk cotangent bundle of a cylinder of height 2a, and the camel map.

The capacity is min(4a, 4 pi): a box x diamond sits inside for the lower
bound, and splitting off the (theta, p_theta) annulus gives the upper bound.
"""
import math

import numpy as np

from lagbarrier import cotangent as ct

for a in (0.5, 1.0, math.pi, 5.0):
    res = ct.cylinder_capacity(math.pi, a, eps=0.1)
    print(f"a={a:7.4f}  lower={res['lower_cert']['lower']:8.4f}  g={res['g']:8.4f}  "
          f"upper={res['upper_cert']['upper']:8.4f}  literal f defect="
          f"{res['defects']['literal_f']['max_symplectic_defect']:.1e}")

# the literal f is symplectic but wraps the angle many times near r = 0
res = ct.cylinder_capacity(math.pi, 1.0)
print("literal f angular span over samples:", round(res["literal_f_max_angular_span"], 1))

rep = ct.verify_camel(1.0)
print("camel defect", rep["max_symplectic_defect"], "seam gap", rep["seam_max_gap"])
for label, s in rep["separation"].items():
    print(label, s)
print("hole constant", rep["hole_constant"], "=", 4 * np.pi)
