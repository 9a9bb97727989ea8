"""Two point scatterers at +-((k-1)/k, 0) in the unit disk.

The shortest closed orbit bounces between a scatterer and the nearest point
of the circle, so its action 2/k goes to zero while sqrt((k-1)/k) stays near 1.
"""
import math

from lagbarrier import billiards as bl
from lagbarrier import convex as cv

disk = cv.ball(1, 2)
for k in (2, 3, 5, 10, 100):
    x0 = (k - 1) / k
    value, tr = bl.scatterer_min_action([[x0, 0], [-x0, 0]], disk, disk)
    print(f"k={k:4d}  A_min={value:.8f}  2/k={2 / k:.8f}  sqrt((k-1)/k)={math.sqrt((k - 1) / k):.6f}  "
          f"labels={tr.component_labels}")

# a punctured square with diamond geometry: the half diagonal has action 2
value, tr = bl.scatterer_min_action([[0, 0]], cv.cube(1, 1), cv.cross_polytope(1, n=2))
print("punctured square:", value, tr.bounce_points.tolist())

with open("scatterer_orbits.csv", "w") as fh:
    fh.write(bl.trajectory_csv([tr]))
