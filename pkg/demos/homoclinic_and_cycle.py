"""A saddle loop next to a genuine limit cycle.

The inner saddle sits at (1, 0), on the unit circle itself.  Its separatrices cut
the circle at (-1/sqrt(17), 4/sqrt(17)) and (1/sqrt(17), -4/sqrt(17)), and
an outer center arc joins those two points, closing a homoclinic loop.  The
closing equations also have a second solution, an ordinary crossing cycle.

Run:  python demos/homoclinic_and_cycle.py
"""

import math

from pwcycles import AffineField, PiecewiseSystem, detect_homoclinic, find_cycles

Z = PiecewiseSystem(
    inner=AffineField(-1, 1, -4, 4, -4, -1),
    outer=AffineField(-1, -1, -4, 4, 4, 1),
)

for hc in detect_homoclinic(Z):
    print(f"homoclinic: {hc.piece} saddle {hc.saddle} at level {hc.level:g}")
    print(f"  points {hc.point_a} {hc.point_b}")
    print(f"  expected +-(1, -4)/sqrt(17) = +-({1 / math.sqrt(17):.12f}, {-4 / math.sqrt(17):.12f})")
    if hc.advisory:
        print("  (the saddle lies outside its own piece's region)")

report = find_cycles(Z)
for cyc in report.cycles:
    label = "homoclinic loop" if cyc.is_homoclinic else "limit cycle"
    print(f"{label}: {cyc.point_a} {cyc.point_b}  stability {cyc.stability.value}")
