"""Capacity of (D^2 minus D^2(delta)) x_L D^2 against the shortest billiard orbit.

The lower bound comes from a translated copy of (1 - delta)/2 times the disk,
the upper bound from squeezing the radial pair (r, p_r) into a disk.  The
minimal action is the radial bounce between the two circles.
"""
from lagbarrier import capacities as cp
from lagbarrier import products as pr

print(f"{'delta':>6} {'lower':>9} {'upper':>9} {'A_min':>9}  2(1-delta)")
for delta in (0.0, 0.1, 0.3, 0.5, 0.8):
    iv = cp.capacity_of(pr.standard_domain("annulus_disk", n=2, delta=delta))
    print(f"{delta:6.2f} {iv.lower:9.6f} {iv.upper:9.6f} {iv.a_min:9.6f}  {2 * (1 - delta):.6f}")

# which constructions bind
iv = cp.capacity_of(pr.standard_domain("annulus_disk", n=2, delta=0.5))
for c in iv.certificates:
    print(c.kind, c.theorem, c.axioms, f"value={c.value:.6f}", f"samples={c.samples}", f"failures={c.failures}")

# the same squeeze in dimension 3 leaves points with r < delta, so it is rejected
iv3 = cp.capacity_of(pr.standard_domain("annulus_disk", n=3, delta=0.3), with_a_min=False)
print("n=3 interval:", iv3.lower, iv3.upper)
