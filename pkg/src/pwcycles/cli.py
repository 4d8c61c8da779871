"""Command line front end: ``pwcycles analyze|cycles|portrait|verify|flow``."""

from __future__ import annotations

import argparse
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from . import corpus
from .cycles import find_cycles
from .errors import (BoundViolation, DegenerateField, NotDivergenceFree, PWCyclesError,
                     ScenarioError, TooManyRoots)
from .fields import classify_singularity, divergence, first_integral
from .flow import integrate_filippov
from .portrait import cycle_samples, render_svg, samples_to_csv
from .scenario import Scenario, load_scenario
from .switching import classify_on_sigma, tangency_points

EXIT_OK = 0
EXIT_FAILED = 1          # verify found a mismatch
EXIT_USAGE = 2           # argparse's own code
EXIT_INVALID = 3         # scenario could not be parsed or validated
EXIT_BOUND = 4           # more cycles than the class bound
EXIT_UNSUPPORTED = 5     # solver preconditions not met (e.g. no first integral)

log = logging.getLogger("pwcycles")


def _fmt(x: float) -> str:
    return f"{x + 0.0:.12g}"


def _pt(p) -> str:
    return f"({_fmt(p[0])}, {_fmt(p[1])})"


def sigma_regions(system, n: int = 720):
    """Angle intervals of the conic grouped by classification (tangencies as cut points)."""
    cuts = []
    for field in (system.inner, system.outer):
        try:
            cuts.extend(phi for phi, _ in tangency_points(field, system.conic))
        except (DegenerateField, TooManyRoots):
            pass
    cuts = sorted(set(round(c, 12) for c in cuts))
    if not cuts:
        mid = classify_on_sigma(system, 0.0).kind.value
        return [(0.0, 2 * math.pi, mid)]
    out = []
    for i, a in enumerate(cuts):
        b = cuts[(i + 1) % len(cuts)]
        if b <= a:
            b += 2 * math.pi
        kind = classify_on_sigma(system, 0.5 * (a + b)).kind.value
        out.append((a, b, kind))
    return out


def cmd_analyze(scn: Scenario, out) -> int:
    sys_ = scn.system
    print(f"scenario: {scn.name}", file=out)
    print(f"class: {sys_.class_tag.value} (bound {sys_.bound})", file=out)
    c = sys_.conic
    print(f"conic: {_fmt(c.inv_u2)}*x^2 + {_fmt(c.inv_v2)}*y^2 - {_fmt(c.level)}", file=out)
    for label, field in (("inner", sys_.inner), ("outer", sys_.outer)):
        rep = classify_singularity(field)
        where = f" at {_pt(rep.location)}" if rep.location is not None else ""
        print(f"{label}: F = ({_fmt(field.e0)} + {_fmt(field.e1)}x + {_fmt(field.e2)}y, "
              f"{_fmt(field.f0)} + {_fmt(field.f1)}x + {_fmt(field.f2)}y)", file=out)
        print(f"  divergence: {_fmt(divergence(field))}", file=out)
        print(f"  singularity: {rep.kind.value}{where}", file=out)
        try:
            print(f"  first integral: H = {first_integral(field)}", file=out)
        except NotDivergenceFree:
            print("  first integral: none (nonzero divergence)", file=out)
        try:
            tps = tangency_points(field, c)
            desc = ", ".join(f"{_fmt(phi)} [{t.order.value}]" for phi, t in tps) or "none"
        except TooManyRoots:
            desc = "field tangent along the whole conic"
        print(f"  tangencies (angle): {desc}", file=out)
    print("regions of the conic (angle intervals):", file=out)
    for a, b, kind in sigma_regions(sys_):
        print(f"  [{_fmt(a)}, {_fmt(b)}]  {kind}", file=out)
    return EXIT_OK


def _print_report(report, out):
    print(f"kind: {report.kind.value}", file=out)
    if report.continuum_witness is not None:
        a, t = report.continuum_witness[0]
        print(f"continuum through angles ({_fmt(a)}, {_fmt(t)})", file=out)
    for k, cyc in enumerate(report.cycles):
        tag = "closed orbit" if cyc.orbit_ok else ("homoclinic" if cyc.is_homoclinic
                                                   else "closing solution only")
        print(f"cycle {k}: angles ({_fmt(cyc.alpha)}, {_fmt(cyc.theta)}) "
              f"points {_pt(cyc.point_a)} {_pt(cyc.point_b)}", file=out)
        print(f"  stability: {cyc.stability.value}  P' = {_fmt(cyc.poincare_derivative)}  "
              f"homoclinic: {str(cyc.is_homoclinic).lower()}  [{tag}]", file=out)
    for hc in report.homoclinic:
        adv = " (advisory)" if hc.advisory else ""
        print(f"homoclinic connection ({hc.piece} saddle {_pt(hc.saddle)}, level "
              f"{_fmt(hc.level)}): {_pt(hc.point_a)} {_pt(hc.point_b)}{adv}", file=out)
    if report.non_crossing:
        print(f"non-crossing closing solutions: {len(report.non_crossing)}", file=out)
    if report.tangential:
        print(f"tangential closing solutions: {len(report.tangential)}", file=out)


def _solver_cfg(scn: Scenario, args):
    cfg = scn.solver
    for flag, key in (("grid", "grid"), ("newton_tol", "newton_tol"), ("min_sep", "min_sep")):
        value = getattr(args, flag, None)
        if value is not None:
            cfg = replace(cfg, **{key: value})
    return cfg


def cmd_cycles(scn: Scenario, args, out) -> int:
    report = find_cycles(scn.system, _solver_cfg(scn, args))
    _print_report(report, out)
    return EXIT_OK


def cmd_portrait(scn: Scenario, args, out) -> int:
    cfg = replace(_solver_cfg(scn, args), enforce_bounds=False)
    report = find_cycles(scn.system, cfg)
    svg = render_svg(scn.system, report, width=args.width, seeds=args.seeds,
                     samples=args.samples)
    Path(args.out).write_text(svg, encoding="utf-8")
    print(f"wrote {args.out}", file=out)
    if args.csv:
        rows = cycle_samples(scn.system, report, samples=args.samples)
        Path(args.csv).write_text(samples_to_csv(rows), encoding="utf-8")
        print(f"wrote {args.csv} ({len(rows)} samples)", file=out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    names = corpus.case_names()
    if args.case:
        unknown = [n for n in args.case if n not in names]
        if unknown:
            print(f"unknown case(s): {', '.join(unknown)}", file=sys.stderr)
            print(f"available: {', '.join(names)}", file=sys.stderr)
            return EXIT_INVALID
        names = args.case
    results = corpus.run_corpus(names)
    width = max(len(n) for n in names)
    for res in results:
        status = "PASS" if res.ok else "FAIL"
        kind = res.report.kind.value if res.report else "-"
        print(f"{status}  {res.name:<{width}}  {kind:<9}  max point error "
              f"{res.max_point_error:.1e}  {res.seconds:.2f}s", file=out)
        for chk in res.checks:
            if not chk.ok:
                print(f"      {chk.label}: {chk.detail}", file=out)
    failed = sum(not r.ok for r in results)
    print(f"{len(results) - failed}/{len(results)} cases passed", file=out)
    return EXIT_OK if failed == 0 else EXIT_FAILED


def _parse_point(text: str):
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y but got {text!r}") from None
    if not (math.isfinite(x) and math.isfinite(y)):
        raise argparse.ArgumentTypeError("start point must be finite")
    return x, y


def cmd_flow(scn: Scenario, args, out) -> int:
    mode = "backward" if args.backward else "forward"
    traj = integrate_filippov(scn.system, args.start, args.tmax, mode=mode, samples=args.samples)
    for k, arc in enumerate(traj.arcs):
        print(f"arc {k}: {arc.piece.value:<7} t=[{_fmt(arc.t0)}, {_fmt(arc.t1)}] "
              f"{_pt(arc.start)} -> {_pt(arc.end)}", file=out)
    for ev in traj.events:
        alt = f" alternatives: {'/'.join(ev.alternatives)}" if ev.alternatives else ""
        print(f"event t={_fmt(ev.time)} angle={_fmt(ev.angle)} "
              f"{ev.classification.kind.value}{alt}", file=out)
    if traj.stationary:
        print("orbit reached a stationary point", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pwcycles",
                                 description="Crossing limit cycles of piecewise affine systems.")
    ap.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="fields, integrals, tangencies and conic regions")
    p.add_argument("file")

    p = sub.add_parser("cycles", help="solve the closing equations")
    p.add_argument("file")
    p.add_argument("--grid", type=int)
    p.add_argument("--newton-tol", dest="newton_tol", type=float)
    p.add_argument("--min-sep", dest="min_sep", type=float)

    p = sub.add_parser("portrait", help="SVG portrait and optional CSV of cycle samples")
    p.add_argument("file")
    p.add_argument("--out", required=True)
    p.add_argument("--csv")
    p.add_argument("--seeds", type=int, default=6, help="seed grid is seeds x seeds")
    p.add_argument("--width", type=int, default=600)
    p.add_argument("--samples", type=int, default=128)
    p.add_argument("--grid", type=int)

    p = sub.add_parser("verify", help="check the bundled reference cases")
    p.add_argument("--case", action="append", help="case name (repeatable)")

    p = sub.add_parser("flow", help="integrate a Filippov trajectory")
    p.add_argument("file")
    p.add_argument("--start", type=_parse_point, required=True, help="x,y")
    p.add_argument("--tmax", type=float, required=True)
    p.add_argument("--backward", action="store_true")
    p.add_argument("--samples", type=int, default=64)
    return ap


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "verify":
            return cmd_verify(args, out)
        scn = load_scenario(args.file)
        if args.command == "analyze":
            return cmd_analyze(scn, out)
        if args.command == "cycles":
            return cmd_cycles(scn, args, out)
        if args.command == "portrait":
            return cmd_portrait(scn, args, out)
        return cmd_flow(scn, args, out)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except BoundViolation as exc:
        print(f"bound violation: {exc}", file=sys.stderr)
        if exc.report is not None:
            _print_report(exc.report, sys.stderr)
        return EXIT_BOUND
    except PWCyclesError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED


if __name__ == "__main__":
    sys.exit(main())
