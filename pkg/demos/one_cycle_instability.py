"""A single unstable crossing cycle.

The inner piece is the constant field (2, -1) and the outer piece a linear
center.  The closing equations have exactly one solution; the half-maps
compose to a return map whose slope at the cycle exceeds one, and a
trajectory started next to the cycle drifts away on each return.

Run:  python demos/one_cycle_instability.py
"""

import numpy as np

from pwcycles import AffineField, PiecewiseSystem, find_cycles, integrate_filippov
from pwcycles.switching import classify_point

Z = PiecewiseSystem(
    inner=AffineField(2, 0, 0, -1, 0, 0),
    outer=AffineField(2, -1, 2, -1, -4, 1),
)
print("class:", Z.class_tag.value)

report = find_cycles(Z)
cyc = report.cycles[0]
print("cycle points:", np.round(cyc.point_a, 12), np.round(cyc.point_b, 12))
for p in (cyc.point_a, cyc.point_b):
    c = classify_point(Z, p)
    print(f"  Xh = {c.lie_inner:+.6f}  Yh = {c.lie_outer:+.6f}  -> {c.kind.value}")
print(f"return map slope P' = {cyc.poincare_derivative:.6f} ({cyc.stability.value})")

# follow a point 1e-3 rad away from the cycle for three returns
phi = Z.conic.angle_of(*cyc.point_a)
start = Z.conic.angle_point(phi + 1e-3)
traj = integrate_filippov(Z, start, 1e3, max_events=6)
a = np.array(cyc.point_a)
print("distance to the cycle point at each return:")
print(f"  start     {np.linalg.norm(np.array(start) - a):.4e}")
for k in (2, 4, 6):
    q = np.array(Z.conic.angle_point(traj.events[k].angle))
    print(f"  return {k // 2}  {np.linalg.norm(q - a):.4e}")
