"""Bundled reference scenarios and their checker.

Every JSON file in ``corpus/`` is a scenario with an ``expected`` block::

    "expected": {
      "class": "ConstantCenter",
      "kind": "Finite",
      "cycle_count": 1,
      "cycles": [{"points": [x1, y1, x2, y2], "lie_signs": [[sx, sy], [sx, sy]],
                  "stability": "Unstable", "homoclinic": false, "closed_orbit": true}],
      "homoclinic": 0,
      "lie_values": [{"field": "outer", "point": [x, y], "value": "2/5+2*sqrt(5)"}]
    }
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from importlib import resources
from typing import List, Optional, Sequence

import numpy as np

from .cycles import SolutionSetReport, find_cycles
from .errors import PWCyclesError
from .scenario import Scenario, parse_number, parse_scenario
from .switching import classify_point, lie_derivative

POINT_TOL = 1e-8
LIE_TOL = 1e-10


def case_names() -> List[str]:
    root = resources.files(__package__) / "corpus"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_case(name: str) -> Scenario:
    root = resources.files(__package__) / "corpus"
    path = root / f"{name}.json"
    if not path.is_file():
        raise KeyError(f"no corpus case named {name!r}")
    return parse_scenario(path.read_text(encoding="utf-8"), source=name)


@dataclass
class Check:
    label: str
    ok: bool
    detail: str = ""


@dataclass
class CaseResult:
    name: str
    checks: List[Check] = dc_field(default_factory=list)
    seconds: float = 0.0
    report: Optional[SolutionSetReport] = None
    max_point_error: float = 0.0

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def _match_cycle(report, pts):
    target = np.array(pts)
    best, best_err = None, np.inf
    for cyc in report.cycles:
        here = np.r_[cyc.point_a, cyc.point_b]
        swapped = np.r_[cyc.point_b, cyc.point_a]
        err = min(np.abs(here - target).max(), np.abs(swapped - target).max())
        if err < best_err:
            best, best_err = cyc, err
    return best, best_err


def check_case(scn: Scenario) -> CaseResult:
    exp = scn.expected
    res = CaseResult(scn.name)
    t0 = time.perf_counter()
    sys_ = scn.system
    try:
        report = find_cycles(sys_, scn.solver)
    except PWCyclesError as exc:
        res.checks.append(Check("solve", False, f"{type(exc).__name__}: {exc}"))
        res.seconds = time.perf_counter() - t0
        return res
    res.report = report

    if "class" in exp:
        res.checks.append(Check("class", sys_.class_tag.value == exp["class"],
                                f"got {sys_.class_tag.value}"))
    if "kind" in exp:
        res.checks.append(Check("kind", report.kind.value == exp["kind"],
                                f"got {report.kind.value}"))
    if "cycle_count" in exp:
        res.checks.append(Check("cycle count", len(report.cycles) == exp["cycle_count"],
                                f"got {len(report.cycles)}"))
    if "max_cycles" in exp:
        res.checks.append(Check("bound", report.bounded_count <= exp["max_cycles"],
                                f"got {report.bounded_count}"))
    for k, spec in enumerate(exp.get("cycles", [])):
        pts = [parse_number(v) for v in spec["points"]]
        cyc, err = _match_cycle(report, pts)
        res.max_point_error = max(res.max_point_error, err)
        res.checks.append(Check(f"cycle {k} points", err < POINT_TOL, f"max error {err:.2e}"))
        if cyc is None:
            continue
        if "lie_signs" in spec:
            got = []
            for p in (pts[:2], pts[2:]):
                cl = classify_point(sys_, p)
                got.append([int(np.sign(cl.lie_inner)), int(np.sign(cl.lie_outer))])
            res.checks.append(Check(f"cycle {k} lie signs", got == spec["lie_signs"], f"got {got}"))
        if "stability" in spec:
            res.checks.append(Check(f"cycle {k} stability", cyc.stability.value == spec["stability"],
                                    f"got {cyc.stability.value}"))
        if "homoclinic" in spec:
            res.checks.append(Check(f"cycle {k} homoclinic", cyc.is_homoclinic == spec["homoclinic"],
                                    f"got {cyc.is_homoclinic}"))
        if spec.get("closed_orbit") is not None:
            res.checks.append(Check(f"cycle {k} closed orbit", cyc.orbit_ok == spec["closed_orbit"],
                                    f"got {cyc.orbit_ok}"))
    if "homoclinic" in exp:
        res.checks.append(Check("homoclinic count", len(report.homoclinic) == exp["homoclinic"],
                                f"got {len(report.homoclinic)}"))
    for spec in exp.get("lie_values", []):
        field = sys_.inner if spec["field"] == "inner" else sys_.outer
        p = [parse_number(v) for v in spec["point"]]
        got = float(lie_derivative(field, sys_.conic, p, 1))
        want = parse_number(spec["value"])
        res.checks.append(Check(f"{spec['field']} Lie value", abs(got - want) < LIE_TOL,
                                f"got {got:.12g}, want {want:.12g}"))
    res.seconds = time.perf_counter() - t0
    return res


def worker_count() -> int:
    """Parallel workers, capped by the ``FC_THREADS`` environment variable."""
    cap = os.environ.get("FC_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = max(1, min(n, int(cap)))
        except ValueError:
            pass
    return n


def run_corpus(names: Optional[Sequence[str]] = None) -> List[CaseResult]:
    """Check the selected cases concurrently; results keep the input order."""
    names = list(names) if names else case_names()
    scenarios = [load_case(n) for n in names]
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        return list(pool.map(check_case, scenarios))
