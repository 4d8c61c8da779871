"""SVG phase portraits and CSV cycle samples.

Output is a pure function of the inputs: no timestamps, fixed number
formatting, fixed drawing order.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .cycles import SolutionSetReport
from .errors import PWCyclesError
from .fields import first_integral
from .flow import ArcPiece, integrate_filippov
from .switching import SigmaKind, classify_on_sigma
from .system import PiecewiseSystem

VIEW = 2.2
COLORS = {
    "conic": "#333333",
    "Sliding": "#d62728",
    "Escape": "#ff7f0e",
    "orbit": "#9aa7b8",
    "Stable": "#1f77b4",
    "Unstable": "#e377c2",
    "Neutral": "#2ca02c",
    "Undetermined": "#7f7f7f",
    "homoclinic": "#8c564b",
}


@dataclass
class CycleSample:
    arc_index: int
    t: float
    x: float
    y: float
    piece: str


def cycle_samples(system: PiecewiseSystem, report: SolutionSetReport,
                  samples: int = 256) -> List[CycleSample]:
    """Dense samples of every flow-validated limit cycle, one Filippov loop each."""
    rows: List[CycleSample] = []
    arc_index = 0
    for cyc in report.limit_cycles:
        traj = integrate_filippov(system, cyc.point_a, 1e3, samples=samples, max_events=2)
        for arc in traj.arcs:
            for t, (x, y) in zip(arc.times, arc.samples):
                rows.append(CycleSample(arc_index, float(t), float(x), float(y), arc.piece.value))
            arc_index += 1
    return rows


def samples_to_csv(rows: Sequence[CycleSample]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["arc_index", "t", "x", "y", "piece"])
    for r in rows:
        writer.writerow([r.arc_index, repr(r.t), repr(r.x), repr(r.y), r.piece])
    return buf.getvalue()


def read_samples_csv(text: str) -> List[CycleSample]:
    reader = csv.DictReader(io.StringIO(text))
    return [CycleSample(int(r["arc_index"]), float(r["t"]), float(r["x"]), float(r["y"]), r["piece"])
            for r in reader]


def check_samples(system: PiecewiseSystem, rows: Sequence[CycleSample]) -> float:
    """Largest deviation of a sample from its arc's first-integral level."""
    integrals = {"Inner": first_integral(system.inner), "Outer": first_integral(system.outer)}
    worst = 0.0
    by_arc = {}
    for r in rows:
        by_arc.setdefault(r.arc_index, []).append(r)
    for arc in by_arc.values():
        H = integrals.get(arc[0].piece)
        if H is None:
            continue
        level = H(arc[0].x, arc[0].y)
        for r in arc:
            worst = max(worst, abs(H(r.x, r.y) - level))
    return worst


# --- SVG ------------------------------------------------------------------

class _Canvas:
    def __init__(self, width: int):
        self.width = width
        self.items: List[str] = []

    def px(self, x, y):
        s = self.width / (2 * VIEW)
        return (x + VIEW) * s, (VIEW - y) * s

    def polyline(self, pts, color, width=1.0, dash: Optional[str] = None, opacity=1.0):
        pts = np.asarray(pts, dtype=float)
        if pts.shape[0] < 2:
            return
        pts = pts[np.all(np.isfinite(pts), axis=1)]
        # keep the path finite; the viewBox clips anything beyond the window
        pts = np.clip(pts, -50 * VIEW, 50 * VIEW)
        coords = " ".join("%.3f,%.3f" % self.px(x, y) for x, y in pts)
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        if opacity != 1.0:
            extra += f' stroke-opacity="{opacity:.2f}"'
        self.items.append(f'<polyline points="{coords}" fill="none" stroke="{color}" '
                          f'stroke-width="{width:.2f}"{extra}/>')

    def circle(self, x, y, r, color):
        cx, cy = self.px(x, y)
        self.items.append(f'<circle cx="{cx:.3f}" cy="{cy:.3f}" r="{r:.2f}" fill="{color}"/>')

    def render(self) -> str:
        w = self.width
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{w}" '
                f'viewBox="0 0 {w} {w}">\n<rect width="{w}" height="{w}" fill="white"/>\n')
        return head + "\n".join(self.items) + "\n</svg>\n"


def _sigma_runs(system: PiecewiseSystem, n: int = 720) -> List[Tuple[str, np.ndarray]]:
    phis = np.linspace(0.0, 2 * np.pi, n + 1)
    kinds = [classify_on_sigma(system, float(p)).kind.value for p in phis]
    runs, start = [], 0
    for i in range(1, n + 2):
        if i == n + 1 or kinds[i] != kinds[start]:
            runs.append((kinds[start], phis[start:i + 1 if i <= n else i]))
            start = i
    return runs


def _seed_points(k: int) -> np.ndarray:
    if k <= 0:
        return np.zeros((0, 2))
    g = np.linspace(-2.0, 2.0, k + 2)[1:-1]
    xx, yy = np.meshgrid(g, g, indexing="xy")
    return np.column_stack([xx.ravel(), yy.ravel()])


def render_svg(system: PiecewiseSystem, report: Optional[SolutionSetReport],
               width: int = 600, seeds: int = 6, samples: int = 128,
               t_max: float = 8.0) -> str:
    """Portrait: seed orbits, the conic with sliding/escape arcs, and found cycles."""
    cv = _Canvas(width)
    for p in _seed_points(seeds):
        try:
            traj = integrate_filippov(system, p, t_max, samples=samples, max_events=40)
        except PWCyclesError:
            continue
        for arc in traj.arcs:
            cv.polyline(arc.samples, COLORS["orbit"], 0.8, opacity=0.8)

    for kind, phis in _sigma_runs(system):
        pts = np.column_stack(system.conic.angle_point(phis))
        if kind in (SigmaKind.SLIDING.value, SigmaKind.ESCAPE.value):
            cv.polyline(pts, COLORS[kind], 3.0)
        else:
            cv.polyline(pts, COLORS["conic"], 1.5)

    if report is not None:
        for cyc in report.limit_cycles:
            traj = integrate_filippov(system, cyc.point_a, 1e3, samples=4 * samples, max_events=2)
            color = COLORS[cyc.stability.value]
            dash = "6,4" if cyc.stability.value == "Unstable" else None
            for arc in traj.arcs:
                cv.polyline(arc.samples, color, 2.5, dash=dash)
        for hc in report.homoclinic:
            # the separatrices of a saddle of an affine field are straight lines
            cv.polyline([hc.point_a, hc.saddle, hc.point_b], COLORS["homoclinic"], 2.5)
            piece = ArcPiece.OUTER if hc.piece == "inner" else ArcPiece.INNER
            for start in (hc.point_a, hc.point_b):
                try:
                    traj = integrate_filippov(system, start, 1e3, samples=4 * samples, max_events=1)
                except PWCyclesError:
                    continue
                for arc in traj.arcs:
                    if arc.piece is piece:
                        cv.polyline(arc.samples, COLORS["homoclinic"], 2.5)
            cv.circle(*hc.saddle, 3.5, COLORS["homoclinic"])
        for cyc in report.cycles:
            for pt in (cyc.point_a, cyc.point_b):
                cv.circle(*pt, 2.5, "#000000")
    return cv.render()
